#include "hyperspace/batch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace hyperspace {

namespace {

double interiorAngle(const MPoint& at, const MPoint& a, const MPoint& b) {
    const MTangent u = directionTo(at, a);
    const MTangent v = directionTo(at, b);
    return std::acos(std::clamp(minkowskiDot(u.vec(), v.vec()), -1.0, 1.0));
}

TriangleHolonomy evaluate(const H2Triangle& t) {
    const std::array<MPoint, 4> loop = {t[0], t[1], t[2], t[0]};
    TriangleHolonomy out;
    out.signedHolonomy = holonomyOfLoop(loop).signedAngle.value_or(0.0);
    out.angleSum = interiorAngle(t[0], t[1], t[2]) + interiorAngle(t[1], t[2], t[0]) + interiorAngle(t[2], t[0], t[1]);
    out.area = std::numbers::pi - out.angleSum;
    return out;
}

}  // namespace

std::vector<H2Triangle> randomH2Triangles(std::size_t count, std::uint64_t seed, double maxRadius) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> radius(0.0, maxRadius);
    auto point = [&] {
        const double a = angle(rng);
        const double r = radius(rng);
        return MPoint::fromH2(Vec3(std::sinh(r) * std::cos(a), std::sinh(r) * std::sin(a), std::cosh(r)));
    };
    std::vector<H2Triangle> out;
    out.reserve(count);
    while (out.size() < count) {
        H2Triangle t = {point(), point(), point()};
        const double ab = distance(t[0], t[1]);
        const double bc = distance(t[1], t[2]);
        const double ca = distance(t[2], t[0]);
        // Skip slivers whose angles are ill-conditioned.
        if (std::min({ab, bc, ca}) < 1e-3 || ab + bc - ca < 1e-3 || bc + ca - ab < 1e-3 || ca + ab - bc < 1e-3) continue;
        out.push_back(t);
    }
    return out;
}

std::vector<TriangleHolonomy> triangleHolonomies(const std::vector<H2Triangle>& triangles) {
    std::vector<TriangleHolonomy> out(triangles.size());
    const long n = static_cast<long>(triangles.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = evaluate(triangles[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::vector<TriangleHolonomy> triangleHolonomiesSerial(const std::vector<H2Triangle>& triangles) {
    std::vector<TriangleHolonomy> out;
    out.reserve(triangles.size());
    for (const H2Triangle& t : triangles) out.push_back(evaluate(t));
    return out;
}

}  // namespace hyperspace
