#pragma once

// Batch evaluation of holonomy around many H^2 geodesic triangles.

#include <array>
#include <cstdint>
#include <vector>

#include "hyperspace/geometry.hpp"

namespace hyperspace {

using H2Triangle = std::array<MPoint, 3>;

struct TriangleHolonomy {
    double signedHolonomy = 0.0;  // transported frame rotation, counterclockwise positive
    double angleSum = 0.0;        // interior angles from the tangents at the vertices
    double area = 0.0;            // pi - angleSum
};

/// Triangles with vertices uniform in angle and distance up to maxRadius from
/// the origin, drawn from a seeded mt19937_64. Degenerate triangles are redrawn.
std::vector<H2Triangle> randomH2Triangles(std::size_t count, std::uint64_t seed, double maxRadius = 2.0);

/// OpenMP kernel.
std::vector<TriangleHolonomy> triangleHolonomies(const std::vector<H2Triangle>& triangles);
/// Single-threaded reference.
std::vector<TriangleHolonomy> triangleHolonomiesSerial(const std::vector<H2Triangle>& triangles);

}  // namespace hyperspace
