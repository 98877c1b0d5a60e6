#pragma once

// Regular tilings and honeycombs from Coxeter reflection groups.
//
// Cells are cosets of the cell stabilizer; a cell is stored as one matrix
// carrying the fundamental cell (centred at the origin, faces orthogonal to
// the coordinate axes for cubes) onto it. Hyperbolic cells use Lorentz
// matrices; Euclidean cells use affine 4x4 matrices. 2-D tilings live in the
// x3 = 0 slice with x3 left fixed.

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hyperspace/geometry.hpp"

namespace hyperspace {

struct SchlafliSymbol {
    std::vector<int> entries;

    /// Parses "4,3,6" or "{4,3,6}".
    static SchlafliSymbol parse(const std::string& text);
    std::string str() const;
    int dimension() const { return static_cast<int>(entries.size()); }
    bool operator==(const SchlafliSymbol&) const = default;
};

enum class GeometryClass { Spherical, Euclidean, Hyperbolic };
std::string_view toString(GeometryClass g);

/// G_ii = 1, G_ij = -cos(pi / m_ij) with m from the symbol for neighbours, 2 otherwise.
Eigen::MatrixXd gramMatrix(const SchlafliSymbol& symbol);

/// Spherical if positive definite, Euclidean if positive semidefinite with a
/// one-dimensional kernel, hyperbolic for signature (n, 1).
GeometryClass classifyGram(const Eigen::MatrixXd& gram);

struct Mirror {
    Eigen::VectorXd normal;  // Minkowski-unit (hyperbolic) or Euclidean-unit (affine) normal
    double offset = 0.0;     // affine mirrors: { x : normal . x = offset }
};

struct MirrorSystem {
    GeometryClass geometry = GeometryClass::Hyperbolic;
    std::vector<Mirror> mirrors;

    /// Reflection matrices: (n x n) Lorentz matrices, or (n+1 x n+1) affine ones.
    std::vector<Eigen::MatrixXd> reflections() const;
};

/// Realizes the Coxeter simplex whose mirror Gram matrix is `gram`.
MirrorSystem mirrorsFromGram(const Eigen::MatrixXd& gram);

/// Shape of the fundamental cell derived from the Coxeter simplex.
struct FundamentalCell {
    GeometryClass geometry = GeometryClass::Hyperbolic;
    int dimension = 3;          // 2 or 3
    int faceCount = 6;
    double inradius = 0.0;      // centre to face centre
    double kleinHalfSide = 0.0; // tanh(inradius) for hyperbolic cells, half side for Euclidean ones
    bool idealVertices = false;
};

FundamentalCell fundamentalCell(const SchlafliSymbol& symbol);

struct TilingCell {
    Mat4 toCell = Mat4::Identity();
    std::vector<int> word;  // face-pairing generator indices applied left to right
    int shell = 0;
};

struct TilingGraph {
    SchlafliSymbol symbol;
    FundamentalCell cell;
    std::vector<Mat4> generators;                    // face pairings, one per face
    std::vector<Vec4> faceNormals;                   // outward face normals (hyperbolic cells)
    std::vector<TilingCell> cells;                   // cells[0] is the identity
    std::map<std::pair<int, int>, int> adjacency;    // (cell, face) -> cell
    std::vector<int> shellSizes;
    bool truncated = false;

    GeometryClass geometry() const { return cell.geometry; }
    int faceCount() const { return static_cast<int>(generators.size()); }
    int oppositeFace(int face) const;

    /// Positive when `point` (homogeneous for Euclidean cells) lies beyond face f
    /// of the fundamental cell.
    double faceExcess(int face, const Vec4& point) const;

    /// Index of the cell whose centre is within 1e-4 of `centre`, or -1.
    int findCell(const Vec4& centre) const;
    void indexCell(int index);

private:
    std::map<std::array<long, 3>, std::vector<int>> centreIndex_;
};

/// Breadth-first enumeration over face-pairing generators from the identity.
/// Stops adding cells after maxCells (reported through `truncated`).
TilingGraph generateCells(const SchlafliSymbol& symbol, int maxWordLength, int maxCells = 200000);

/// Recomputes a cell matrix from its word with the same arithmetic as generation.
Mat4 replayWord(const TilingGraph& graph, const std::vector<int>& word);

/// Composition used during generation (renormalizes hyperbolic products).
Mat4 composeCells(const TilingGraph& graph, const Mat4& a, const Mat4& b);

/// Export format: {schlafli, cellCount, cells:[{word, matrix}], adjacency:[[c,f,c'],...]}.
nlohmann::json toJson(const TilingGraph& graph);

}  // namespace hyperspace
