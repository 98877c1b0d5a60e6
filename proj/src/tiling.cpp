#include "hyperspace/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hyperspace {

namespace {

constexpr double kBucket = 0.25;         // distinct cell centres are >= 1 apart
constexpr double kSameCentre = 1e-4;

Eigen::MatrixXd lorentzMetric(Eigen::Index n) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n);
    j(n - 1, n - 1) = -1.0;
    return j;
}

double dotN(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const auto n = a.size();
    return a.head(n - 1).dot(b.head(n - 1)) - a[n - 1] * b[n - 1];
}

// Unit outward directions of the faces of the fundamental cell at the origin.
std::vector<Vec3> faceDirections(int dimension, int p) {
    std::vector<Vec3> dirs;
    if (dimension == 3) {
        for (int axis = 0; axis < 3; ++axis) {
            dirs.push_back(Vec3::Unit(axis));
            dirs.push_back(-Vec3::Unit(axis));
        }
        return dirs;
    }
    for (int k = 0; k < p; ++k) {
        const double a = 2.0 * std::numbers::pi * k / p;
        dirs.emplace_back(std::cos(a), std::sin(a), 0.0);
    }
    return dirs;
}

std::array<long, 3> bucketOf(const Vec4& c) {
    return {static_cast<long>(std::floor(c[0] / kBucket)), static_cast<long>(std::floor(c[1] / kBucket)),
            static_cast<long>(std::floor(c[2] / kBucket))};
}

}  // namespace

// --- Symbols -------------------------------------------------------------------

SchlafliSymbol SchlafliSymbol::parse(const std::string& text) {
    std::string cleaned;
    for (char ch : text) {
        if (ch != '{' && ch != '}' && ch != ' ') cleaned.push_back(ch);
    }
    SchlafliSymbol out;
    std::stringstream in(cleaned);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size() || v < 3) throw std::invalid_argument(item);
            out.entries.push_back(v);
        } catch (const std::exception&) {
            throw GeometryError(ErrorKind::Parse, "bad Schlafli entry '" + item + "'");
        }
    }
    if (out.entries.size() < 2 || out.entries.size() > 3) {
        throw GeometryError(ErrorKind::Parse, "Schlafli symbol needs 2 or 3 entries: '" + text + "'");
    }
    return out;
}

std::string SchlafliSymbol::str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(entries[i]);
    }
    return s + "}";
}

std::string_view toString(GeometryClass g) {
    switch (g) {
        case GeometryClass::Spherical: return "spherical";
        case GeometryClass::Euclidean: return "euclidean";
        case GeometryClass::Hyperbolic: return "hyperbolic";
    }
    return "hyperbolic";
}

Eigen::MatrixXd gramMatrix(const SchlafliSymbol& symbol) {
    for (int m : symbol.entries) {
        if (m < 2) {
            throw GeometryError(ErrorKind::Precondition, "Schlafli entries must be >= 2");
        }
    }
    const auto n = static_cast<Eigen::Index>(symbol.entries.size()) + 1;
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const double v = -std::cos(std::numbers::pi / symbol.entries[static_cast<std::size_t>(i)]);
        g(i, i + 1) = v;
        g(i + 1, i) = v;
    }
    return g;
}

GeometryClass classifyGram(const Eigen::MatrixXd& gram) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const auto& ev = eig.eigenvalues();
    int negative = 0;
    int zero = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev[i]) < 1e-10) {
            ++zero;
        } else if (ev[i] < 0) {
            ++negative;
        }
    }
    if (negative == 0 && zero == 0) return GeometryClass::Spherical;
    if (negative == 0 && zero == 1) return GeometryClass::Euclidean;
    if (negative == 1 && zero == 0) return GeometryClass::Hyperbolic;
    throw GeometryError(ErrorKind::UnsupportedGeometry, "Gram matrix has an unsupported signature");
}

// --- Mirrors -------------------------------------------------------------------

MirrorSystem mirrorsFromGram(const Eigen::MatrixXd& gram) {
    const GeometryClass geometry = classifyGram(gram);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd& ev = eig.eigenvalues();  // ascending
    const Eigen::MatrixXd& v = eig.eigenvectors();
    const auto n = gram.rows();

    MirrorSystem out;
    out.geometry = geometry;
    if (geometry == GeometryClass::Hyperbolic) {
        // Spacelike coordinates from the positive eigenvalues, timelike one last.
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd normal(n);
            for (Eigen::Index k = 1; k < n; ++k) {
                normal[k - 1] = std::sqrt(ev[k]) * v(i, k);
            }
            normal[n - 1] = std::sqrt(-ev[0]) * v(i, 0);
            out.mirrors.push_back({normal, 0.0});
        }
        return out;
    }
    if (geometry == GeometryClass::Euclidean) {
        // Affine chart of dimension n-1; the last mirror is pushed off the origin.
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd normal(n - 1);
            for (Eigen::Index k = 1; k < n; ++k) {
                normal[k - 1] = std::sqrt(std::max(0.0, ev[k])) * v(i, k);
            }
            out.mirrors.push_back({normal, i == n - 1 ? 1.0 : 0.0});
        }
        return out;
    }
    throw GeometryError(ErrorKind::UnsupportedGeometry, "spherical Coxeter groups are not supported");
}

std::vector<Eigen::MatrixXd> MirrorSystem::reflections() const {
    std::vector<Eigen::MatrixXd> out;
    for (const Mirror& m : mirrors) {
        const auto n = m.normal.size();
        if (geometry == GeometryClass::Hyperbolic) {
            const Eigen::MatrixXd j = lorentzMetric(n);
            const Eigen::VectorXd lowered = j * m.normal;
            out.push_back(Eigen::MatrixXd::Identity(n, n) -
                          2.0 * m.normal * lowered.transpose() / dotN(m.normal, m.normal));
        } else {
            const Eigen::VectorXd unit = m.normal / m.normal.norm();
            const double c = m.offset / m.normal.norm();
            Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n + 1, n + 1);
            r.topLeftCorner(n, n) -= 2.0 * unit * unit.transpose();
            r.topRightCorner(n, 1) = 2.0 * c * unit;
            out.push_back(r);
        }
    }
    return out;
}

// --- Fundamental cell ------------------------------------------------------------

FundamentalCell fundamentalCell(const SchlafliSymbol& symbol) {
    const int dim = symbol.dimension();
    const auto& e = symbol.entries;
    if (dim == 3 && !(e[0] == 4 && e[1] == 3)) {
        throw GeometryError(ErrorKind::UnsupportedGeometry,
                            "honeycombs are supported for cubic cells {4,3,r} only, got " + symbol.str());
    }
    if (dim == 2 && e[0] % 2 != 0) {
        throw GeometryError(ErrorKind::UnsupportedGeometry,
                            "2-D tilings need centrally symmetric cells (even p), got " + symbol.str());
    }
    const Eigen::MatrixXd gram = gramMatrix(symbol);
    FundamentalCell cell;
    cell.dimension = dim;
    cell.faceCount = dim == 3 ? 6 : e[0];
    cell.geometry = classifyGram(gram);
    if (cell.geometry == GeometryClass::Spherical) {
        throw GeometryError(ErrorKind::UnsupportedGeometry, symbol.str() + " is spherical");
    }
    if (cell.geometry == GeometryClass::Euclidean) {
        cell.inradius = 0.5;
        cell.kleinHalfSide = 0.5;
        return cell;
    }

    // Simplex vertices are the dual basis of the mirror normals.
    const MirrorSystem mirrors = mirrorsFromGram(gram);
    const auto n = gram.rows();
    Eigen::MatrixXd normals(n, n);
    for (Eigen::Index i = 0; i < n; ++i) normals.col(i) = mirrors.mirrors[static_cast<std::size_t>(i)].normal;
    const Eigen::MatrixXd dual = normals * gram.inverse();
    auto vertex = [&](Eigen::Index k) {
        Eigen::VectorXd w = dual.col(k);
        if (w[n - 1] < 0) w = -w;
        return w;
    };
    const Eigen::VectorXd centre = vertex(n - 1);
    const Eigen::VectorXd faceCentre = vertex(n - 2);
    const Eigen::VectorXd corner = vertex(0);
    const double c = -dotN(centre, faceCentre) / std::sqrt(dotN(centre, centre) * dotN(faceCentre, faceCentre));
    cell.inradius = std::acosh(std::max(1.0, c));
    cell.kleinHalfSide = std::tanh(cell.inradius);
    cell.idealVertices = dotN(corner, corner) >= -1e-9 * corner.squaredNorm();
    return cell;
}

// --- Graph -----------------------------------------------------------------------

int TilingGraph::oppositeFace(int face) const {
    const int count = faceCount();
    if (cell.dimension == 3) return face ^ 1;
    return (face + count / 2) % count;
}

double TilingGraph::faceExcess(int face, const Vec4& point) const {
    const Vec4& n = faceNormals[static_cast<std::size_t>(face)];
    if (geometry() == GeometryClass::Hyperbolic) {
        return minkowskiDot(point, n);
    }
    return n.head<3>().dot(point.head<3>()) - cell.inradius * point[3];
}

int TilingGraph::findCell(const Vec4& centre) const {
    const auto key = bucketOf(centre);
    const bool hyperbolic = geometry() == GeometryClass::Hyperbolic;
    for (long dx = -1; dx <= 1; ++dx) {
        for (long dy = -1; dy <= 1; ++dy) {
            for (long dz = -1; dz <= 1; ++dz) {
                const auto it = centreIndex_.find({key[0] + dx, key[1] + dy, key[2] + dz});
                if (it == centreIndex_.end()) continue;
                for (int idx : it->second) {
                    const Vec4 other = cells[static_cast<std::size_t>(idx)].toCell.col(3);
                    const double d = hyperbolic ? distance(centre, other) : (centre - other).head<3>().norm();
                    if (d < kSameCentre) return idx;
                }
            }
        }
    }
    return -1;
}

void TilingGraph::indexCell(int index) {
    centreIndex_[bucketOf(cells[static_cast<std::size_t>(index)].toCell.col(3))].push_back(index);
}

Mat4 composeCells(const TilingGraph& graph, const Mat4& a, const Mat4& b) {
    Mat4 m = a * b;
    if (graph.geometry() == GeometryClass::Hyperbolic && lorentzDefect(m) > tol::invariant) {
        m = gramSchmidtMinkowski(m);
    }
    return m;
}

Mat4 replayWord(const TilingGraph& graph, const std::vector<int>& word) {
    Mat4 m = Mat4::Identity();
    for (int f : word) {
        if (f < 0 || f >= graph.faceCount()) {
            throw GeometryError(ErrorKind::Precondition, "word references an unknown face");
        }
        m = composeCells(graph, m, graph.generators[static_cast<std::size_t>(f)]);
    }
    return m;
}

TilingGraph generateCells(const SchlafliSymbol& symbol, int maxWordLength, int maxCells) {
    if (maxWordLength < 0 || maxCells < 1) {
        throw GeometryError(ErrorKind::Precondition, "tiling bounds must be positive");
    }
    TilingGraph graph;
    graph.symbol = symbol;
    graph.cell = fundamentalCell(symbol);
    const double r = graph.cell.inradius;
    const int p = symbol.entries[0];

    for (const Vec3& u : faceDirections(graph.cell.dimension, p)) {
        if (graph.geometry() == GeometryClass::Hyperbolic) {
            const Vec4 normal(std::cosh(r) * u[0], std::cosh(r) * u[1], std::cosh(r) * u[2], std::sinh(r));
            const Isometry pairing = reflection(normal) * reflection(Vec4(u[0], u[1], u[2], 0.0));
            graph.generators.push_back(pairing.matrix());
            graph.faceNormals.push_back(normal);
        } else {
            Mat4 t = Mat4::Identity();
            t.block<3, 1>(0, 3) = 2.0 * r * u;
            graph.generators.push_back(t);
            graph.faceNormals.push_back(Vec4(u[0], u[1], u[2], 0.0));
        }
    }

    graph.cells.push_back({Mat4::Identity(), {}, 0});
    graph.indexCell(0);
    graph.shellSizes.push_back(1);

    std::size_t shellBegin = 0;
    for (int depth = 1; depth <= maxWordLength && !graph.truncated; ++depth) {
        const std::size_t shellEnd = graph.cells.size();
        for (std::size_t c = shellBegin; c < shellEnd && !graph.truncated; ++c) {
            for (int f = 0; f < graph.faceCount(); ++f) {
                const Mat4 m = composeCells(graph, graph.cells[c].toCell, graph.generators[static_cast<std::size_t>(f)]);
                if (graph.findCell(m.col(3)) >= 0) continue;
                if (static_cast<int>(graph.cells.size()) >= maxCells) {
                    graph.truncated = true;
                    break;
                }
                TilingCell cell{m, graph.cells[c].word, depth};
                cell.word.push_back(f);
                graph.cells.push_back(std::move(cell));
                graph.indexCell(static_cast<int>(graph.cells.size()) - 1);
            }
        }
        graph.shellSizes.push_back(static_cast<int>(graph.cells.size() - shellEnd));
        shellBegin = shellEnd;
    }

    for (std::size_t c = 0; c < graph.cells.size(); ++c) {
        for (int f = 0; f < graph.faceCount(); ++f) {
            const Mat4 m = composeCells(graph, graph.cells[c].toCell, graph.generators[static_cast<std::size_t>(f)]);
            const int other = graph.findCell(m.col(3));
            if (other >= 0) graph.adjacency[{static_cast<int>(c), f}] = other;
        }
    }
    return graph;
}

nlohmann::json toJson(const TilingGraph& graph) {
    nlohmann::json cells = nlohmann::json::array();
    for (const TilingCell& c : graph.cells) {
        std::vector<double> entries(c.toCell.data(), c.toCell.data() + 16);
        cells.push_back({{"word", c.word}, {"matrix", entries}});
    }
    nlohmann::json adjacency = nlohmann::json::array();
    for (const auto& [key, other] : graph.adjacency) {
        adjacency.push_back({key.first, key.second, other});
    }
    return {{"schlafli", graph.symbol.entries},
            {"geometry", toString(graph.geometry())},
            {"cellCount", graph.cells.size()},
            {"truncated", graph.truncated},
            {"cells", cells},
            {"adjacency", adjacency}};
}

}  // namespace hyperspace
