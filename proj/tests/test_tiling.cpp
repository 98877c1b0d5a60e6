#include <chrono>
#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "hyperspace/tiling.hpp"
#include "support.hpp"

using namespace hyperspace;

namespace {

// Integer points with |x|_1 <= r.
std::set<std::array<long, 3>> latticeBall(int r) {
    std::set<std::array<long, 3>> out;
    for (long x = -r; x <= r; ++x) {
        for (long y = -r; y <= r; ++y) {
            for (long z = -r; z <= r; ++z) {
                if (std::abs(x) + std::abs(y) + std::abs(z) <= r) out.insert({x, y, z});
            }
        }
    }
    return out;
}

}  // namespace

TEST(Schlafli, ParsesBothSpellings) {
    EXPECT_EQ(SchlafliSymbol::parse("4,3,6").entries, (std::vector<int>{4, 3, 6}));
    EXPECT_EQ(SchlafliSymbol::parse("{4,6}").entries, (std::vector<int>{4, 6}));
    EXPECT_EQ(SchlafliSymbol::parse("{4,3,6}").str(), "{4,3,6}");
    EXPECT_THROW(SchlafliSymbol::parse("4,x"), GeometryError);
    EXPECT_THROW(SchlafliSymbol::parse(""), GeometryError);
    EXPECT_THROW(SchlafliSymbol::parse("4,1"), GeometryError);
}

TEST(Gram, ClassifiesTheThreeGeometries) {
    EXPECT_EQ(classifyGram(gramMatrix(SchlafliSymbol::parse("3,3,3"))), GeometryClass::Spherical);
    EXPECT_EQ(classifyGram(gramMatrix(SchlafliSymbol::parse("4,3,4"))), GeometryClass::Euclidean);
    EXPECT_EQ(classifyGram(gramMatrix(SchlafliSymbol::parse("4,3,5"))), GeometryClass::Hyperbolic);
    EXPECT_EQ(classifyGram(gramMatrix(SchlafliSymbol::parse("4,3,6"))), GeometryClass::Hyperbolic);
    EXPECT_EQ(classifyGram(gramMatrix(SchlafliSymbol::parse("4,4"))), GeometryClass::Euclidean);
    EXPECT_EQ(classifyGram(gramMatrix(SchlafliSymbol::parse("4,6"))), GeometryClass::Hyperbolic);
    EXPECT_EQ(classifyGram(gramMatrix(SchlafliSymbol::parse("4,3"))), GeometryClass::Spherical);
}

TEST(Gram, EntriesAreMinusCosines) {
    const Eigen::MatrixXd g = gramMatrix(SchlafliSymbol::parse("4,3,6"));
    EXPECT_NEAR(g(0, 1), -std::cos(std::numbers::pi / 4), 1e-15);
    EXPECT_NEAR(g(1, 2), -std::cos(std::numbers::pi / 3), 1e-15);
    EXPECT_NEAR(g(2, 3), -std::cos(std::numbers::pi / 6), 1e-15);
    EXPECT_NEAR(g(0, 2), 0.0, 1e-15);
    EXPECT_NEAR(g(0, 3), 0.0, 1e-15);
}

TEST(Mirrors, ReproduceTheGramMatrix) {
    const auto gram = gramMatrix(SchlafliSymbol::parse("4,3,6"));
    const MirrorSystem m = mirrorsFromGram(gram);
    ASSERT_EQ(m.mirrors.size(), 4u);
    const Eigen::Matrix4d j = Eigen::Vector4d(1, 1, 1, -1).asDiagonal();
    for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
            const double ip = m.mirrors[a].normal.dot(j * m.mirrors[b].normal);
            EXPECT_NEAR(ip, gram(a, b), 1e-12);
        }
    }
}

TEST(Mirrors, SixCellsAroundAnEdge) {
    const auto r = mirrorsFromGram(gramMatrix(SchlafliSymbol::parse("4,3,6"))).reflections();
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(4, 4);
    const Eigen::MatrixXd pair = r[2] * r[3];
    for (int k = 0; k < 6; ++k) p = p * pair;
    EXPECT_LT((p - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-7);
    // ... and not fewer.
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(4, 4);
    for (int k = 1; k < 6; ++k) {
        q = q * pair;
        EXPECT_GT((q - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.1) << k;
    }
}

TEST(Cells, KleinHalfSideMatchesDihedralAngle) {
    // A cube {x_i = +-k} in the Klein ball has dihedral angle theta with
    // cos theta = k^2 / (1 - k^2); r cubes around an edge need theta = 2 pi / r.
    for (int r : {5, 6}) {
        const double c = std::cos(2 * std::numbers::pi / r);
        const FundamentalCell cell = fundamentalCell(SchlafliSymbol{{4, 3, r}});
        EXPECT_NEAR(cell.kleinHalfSide, std::sqrt(c / (1 + c)), 1e-12);
        EXPECT_NEAR(cell.inradius, std::atanh(cell.kleinHalfSide), 1e-12);
        // Corners sit on the sphere at infinity exactly when 3 k^2 = 1.
        EXPECT_EQ(cell.idealVertices, r == 6);
    }
    EXPECT_NEAR(fundamentalCell(SchlafliSymbol{{4, 3, 4}}).inradius, 0.5, 1e-15);
    // Squares with six at a vertex: same relation with the corner angle 2 pi / 6.
    const FundamentalCell sq = fundamentalCell(SchlafliSymbol{{4, 6}});
    EXPECT_EQ(sq.faceCount, 4);
    const double k = sq.kleinHalfSide;
    EXPECT_NEAR(k * k / (1 - k * k), std::cos(2 * std::numbers::pi / 6), 1e-12);
}

TEST(Generation, EuclideanCubesMatchTheLattice) {
    const TilingGraph g = generateCells(SchlafliSymbol::parse("4,3,4"), 4);
    std::size_t total = 0;
    for (int r = 0; r <= 4; ++r) {
        total += static_cast<std::size_t>(g.shellSizes[static_cast<std::size_t>(r)]);
        EXPECT_EQ(total, latticeBall(r).size()) << "radius " << r;
    }
    std::set<std::array<long, 3>> centres;
    for (const TilingCell& c : g.cells) {
        const Vec4 x = c.toCell.col(3);
        centres.insert({std::lround(x[0]), std::lround(x[1]), std::lround(x[2])});
        EXPECT_NEAR(x[0], std::round(x[0]), 1e-12);
    }
    EXPECT_EQ(centres, latticeBall(4));
    EXPECT_EQ(generateCells(SchlafliSymbol::parse("4,3,4"), 1).cells.size(), 7u);
}

TEST(Generation, HyperbolicShellsGrowExponentially) {
    const TilingGraph g = generateCells(SchlafliSymbol::parse("4,3,6"), 6);
    ASSERT_EQ(g.shellSizes.size(), 7u);
    for (int s = 3; s <= 6; ++s) {
        const double ratio = static_cast<double>(g.shellSizes[s]) / g.shellSizes[s - 1];
        EXPECT_GT(ratio, 1.5) << "shell " << s;
    }
}

TEST(Generation, NeighboursShareAFace) {
    const TilingGraph g = generateCells(SchlafliSymbol::parse("4,3,6"), 3);
    const double twoR = 2 * g.cell.inradius;
    int checked = 0;
    for (const auto& [key, other] : g.adjacency) {
        const int cell = key.first;
        const Vec4 a = g.cells[cell].toCell.col(3), b = g.cells[other].toCell.col(3);
        EXPECT_NEAR(std::acosh(std::max(1.0, -oracle::mdot(a, b))), twoR, 1e-7);
        // Face labels follow each cell's own frame, so look for the way back through any face.
        bool back = false;
        for (int f = 0; f < g.faceCount(); ++f) {
            const auto it = g.adjacency.find({other, f});
            back = back || (it != g.adjacency.end() && it->second == cell);
        }
        EXPECT_TRUE(back) << cell << " -> " << other;
        ++checked;
    }
    EXPECT_GT(checked, 100);
}

TEST(Generation, CellsAreDistinctAndValid) {
    const TilingGraph g = generateCells(SchlafliSymbol::parse("4,3,6"), 4);
    for (std::size_t i = 0; i < g.cells.size(); ++i) {
        EXPECT_LT(lorentzDefect(g.cells[i].toCell), 1e-8);
        EXPECT_EQ(g.findCell(g.cells[i].toCell.col(3)), static_cast<int>(i));
    }
    // Words replay to the stored matrices.
    for (std::size_t i = 0; i < g.cells.size(); i += 37) {
        EXPECT_LT((replayWord(g, g.cells[i].word) - g.cells[i].toCell).cwiseAbs().maxCoeff(), 1e-9 * g.cells[i].toCell(3, 3));
    }
}

TEST(Generation, DepthFiveIsFast) {
    const auto t0 = std::chrono::steady_clock::now();
    const TilingGraph g = generateCells(SchlafliSymbol::parse("4,3,6"), 5);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_FALSE(g.truncated);
    EXPECT_LT(s, 10.0);
}

TEST(Generation, BudgetTruncates) {
    const TilingGraph g = generateCells(SchlafliSymbol::parse("4,3,6"), 6, 500);
    EXPECT_TRUE(g.truncated);
    EXPECT_EQ(g.cells.size(), 500u);
}

TEST(Generation, RejectsUnsupportedSymbols) {
    EXPECT_THROW(generateCells(SchlafliSymbol::parse("3,3,3"), 2), GeometryError);
    EXPECT_THROW(generateCells(SchlafliSymbol::parse("5,3,4"), 2), GeometryError);
    EXPECT_THROW(generateCells(SchlafliSymbol::parse("4,3,6"), -1), GeometryError);
}

TEST(Generation, PlanarTilingLivesInTheSlice) {
    const TilingGraph g = generateCells(SchlafliSymbol::parse("4,6"), 4);
    EXPECT_EQ(g.cells.size(), 133u);
    for (const TilingCell& c : g.cells) {
        EXPECT_NEAR(c.toCell(2, 2), 1.0, 1e-12);
        EXPECT_NEAR(c.toCell.col(3)[2], 0.0, 1e-12);
    }
}

TEST(Export, FollowsTheSchema) {
    const TilingGraph g = generateCells(SchlafliSymbol::parse("4,3,6"), 2);
    const nlohmann::json j = nlohmann::json::parse(toJson(g).dump());
    EXPECT_EQ(j.at("schlafli"), nlohmann::json({4, 3, 6}));
    EXPECT_EQ(j.at("geometry"), "hyperbolic");
    EXPECT_EQ(j.at("cellCount").get<std::size_t>(), g.cells.size());
    EXPECT_EQ(j.at("truncated"), false);
    ASSERT_EQ(j.at("cells").size(), g.cells.size());
    for (const auto& c : j["cells"]) {
        ASSERT_EQ(c.at("matrix").size(), 16u);
        EXPECT_TRUE(c.at("word").is_array());
    }
    const auto m = oracle::cellMatrix(j["cells"][3]["matrix"]);
    EXPECT_LT((m - g.cells[3].toCell).cwiseAbs().maxCoeff(), 1e-12);
    for (const auto& e : j.at("adjacency")) {
        ASSERT_EQ(e.size(), 3u);
        EXPECT_EQ(g.adjacency.at({e[0].get<int>(), e[1].get<int>()}), e[2].get<int>());
    }
}
