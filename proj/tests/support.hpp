#pragma once

// Independent oracles and helpers shared by the unit tests and the
// acceptance binary. Nothing here calls into the engine's transport or
// classification code; matrices are built from cosh/sinh by hand.

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hyperspace/image.hpp"
#include "hyperspace/render.hpp"

namespace oracle {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

inline double mdot(const Vec4& a, const Vec4& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3]; }

/// Boost along coordinate axis k (0, 1, 2) by t.
inline Mat4 boost(int k, double t) {
    Mat4 m = Mat4::Identity();
    m(k, k) = std::cosh(t);
    m(k, 3) = std::sinh(t);
    m(3, k) = std::sinh(t);
    m(3, 3) = std::cosh(t);
    return m;
}

/// Rotation in the (i, j) coordinate plane.
inline Mat4 rotation(int i, int j, double a) {
    Mat4 m = Mat4::Identity();
    m(i, i) = std::cos(a);
    m(i, j) = -std::sin(a);
    m(j, i) = std::sin(a);
    m(j, j) = std::cos(a);
    return m;
}

/// Rotation angle of an elliptic Lorentz 4x4 matrix: trace = 2 + 2 cos theta.
inline double ellipticAngle(const Mat4& m) { return std::acos(std::clamp((m.trace() - 2.0) / 2.0, -1.0, 1.0)); }

/// Interior angles of a hyperbolic triangle with side lengths a, b, c
/// (opposite the respective vertices) by the hyperbolic law of cosines.
inline double lawOfCosinesAngle(double opposite, double b, double c) {
    return std::acos((std::cosh(b) * std::cosh(c) - std::cosh(opposite)) / (std::sinh(b) * std::sinh(c)));
}

/// Step length of the closed [turn, step] walk with n moves: a regular
/// n-gon with interior angle pi - turn, cosh(s / 2) = cos(pi / n) / cos(turn / 2).
inline double closingStep(int n, double turn) { return 2.0 * std::acosh(std::cos(std::numbers::pi / n) / std::cos(turn / 2.0)); }

/// Algebraic (Kasa) circle fit; returns centre, radius and rms residual.
struct Circle {
    Eigen::Vector2d centre;
    double radius = 0.0;
    double residual = 0.0;
};
inline Circle fitCircle(const std::vector<Eigen::Vector2d>& pts) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(pts.size()), 3);
    Eigen::VectorXd b(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        a(r, 0) = pts[i][0];
        a(r, 1) = pts[i][1];
        a(r, 2) = 1.0;
        b(r) = pts[i].squaredNorm();
    }
    const Eigen::Vector3d x = a.colPivHouseholderQr().solve(b);
    Circle c;
    c.centre = Eigen::Vector2d(x[0] / 2.0, x[1] / 2.0);
    c.radius = std::sqrt(x[2] + c.centre.squaredNorm());
    double ss = 0.0;
    for (const auto& p : pts) ss += std::pow((p - c.centre).norm() - c.radius, 2);
    c.residual = std::sqrt(ss / static_cast<double>(pts.size()));
    return c;
}

/// Largest perpendicular distance of points from the line through the two
/// points farthest apart.
inline double collinearityResidual(const std::vector<Eigen::Vector2d>& pts) {
    const Eigen::Vector2d a = pts.front();
    const Eigen::Vector2d b = pts.back();
    const Eigen::Vector2d d = (b - a).normalized();
    double worst = 0.0;
    for (const auto& p : pts) worst = std::max(worst, std::abs(d[0] * (p - a)[1] - d[1] * (p - a)[0]));
    return worst;
}

/// Distance from the point at height h above a plane after walking t along
/// a sight line parallel to it, by minimizing over the plane. The plane is
/// {y = -h} through the foot point; sight line is the forward axis.
/// Golden-section search on each coordinate of the plane's own chart.
inline double floorDistanceBruteForce(double h, double t) {
    const Vec4 eye = boost(2, t) * Vec4(0, 0, 0, 1);
    // Plane through the foot F = boost_y(-h) o, spanned by the boosts along x and z at F.
    const Mat4 foot = boost(1, -h);
    auto dist = [&](double u, double w) {
        const Vec4 q = foot * boost(2, w) * boost(0, u) * Vec4(0, 0, 0, 1);
        return std::acosh(std::max(1.0, -mdot(eye, q)));
    };
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    auto minimize = [&](auto f, double lo, double hi) {
        double a = lo, b = hi;
        double c = b - g * (b - a), d = a + g * (b - a);
        for (int i = 0; i < 200; ++i) {
            if (f(c) < f(d)) {
                b = d;
            } else {
                a = c;
            }
            c = b - g * (b - a);
            d = a + g * (b - a);
        }
        return 0.5 * (a + b);
    };
    // The nearest point lies at u = 0 by symmetry in x; search w, then confirm in u.
    const double w = minimize([&](double x) { return dist(0.0, x); }, -2.0 * t - 5.0, 2.0 * t + 5.0);
    const double u = minimize([&](double x) { return dist(x, w); }, -5.0, 5.0);
    return dist(u, w);
}

// --- Protocol schema ------------------------------------------------------------------

/// Checks a frame message against the published schema. Returns an empty
/// string when valid, otherwise the first problem found.
inline std::string validateFrame(const nlohmann::json& j) {
    if (!j.is_object()) return "not an object";
    if (j.value("type", "") != "frame") return "type is not frame";
    if (!j.contains("cells") || !j["cells"].is_array() || j["cells"].empty()) return "cells missing";
    for (const auto& c : j["cells"]) {
        if (!c.is_array() || c.size() != 16) return "cell is not 16 numbers";
        for (const auto& x : c) {
            if (!x.is_number()) return "cell entry not a number";
        }
    }
    if (!j.contains("hud") || !j["hud"].is_object()) return "hud missing";
    const auto& h = j["hud"];
    for (const char* k : {"holonomyDeg", "vergenceDeg", "floorDropExtra"}) {
        if (!h.contains(k) || !h[k].is_number()) return std::string("hud.") + k + " missing";
    }
    if (!h.contains("loopClosed") || !h["loopClosed"].is_boolean()) return "hud.loopClosed missing";
    if (!h.contains("space") || !h["space"].is_string()) return "hud.space missing";
    const std::string space = h["space"];
    if (space != "h3" && space != "h2e" && space != "euclidean") return "hud.space unknown";
    for (const auto& [k, v] : j.items()) {
        if (k != "type" && k != "cells" && k != "hud" && k != "tilt") return "unexpected key " + k;
    }
    if (j.contains("tilt") && (space != "h2e" || !j["tilt"].is_array() || j["tilt"].size() != 9)) return "bad tilt";
    return "";
}

inline Mat4 cellMatrix(const nlohmann::json& c) {
    Mat4 m;
    for (int k = 0; k < 16; ++k) m(k % 4, k / 4) = c[static_cast<std::size_t>(k)].get<double>();
    return m;
}

/// Deviation of a protocol matrix from being an isometry of its space.
inline double isometryDefect(const std::string& space, const Mat4& m) {
    if (space == "h3") {
        const Mat4 j = Eigen::Vector4d(1, 1, 1, -1).asDiagonal();
        return (m.transpose() * j * m - j).cwiseAbs().maxCoeff() / std::max(1.0, m(3, 3) * m(3, 3));
    }
    if (space == "euclidean") {
        const Eigen::Matrix3d r = m.topLeftCorner<3, 3>();
        double d = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
        d = std::max(d, (m.row(3) - Eigen::RowVector4d(0, 0, 0, 1)).cwiseAbs().maxCoeff());
        return d;
    }
    // h2e wire encoding: H^2 block in {0,1,3}, z slot 2.
    const int idx[3] = {0, 1, 3};
    Eigen::Matrix3d h;
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) h(i, k) = m(idx[i], idx[k]);
    }
    const Eigen::Matrix3d j = Eigen::Vector3d(1, 1, -1).asDiagonal();
    double d = (h.transpose() * j * h - j).cwiseAbs().maxCoeff() / std::max(1.0, h(2, 2) * h(2, 2));
    d = std::max(d, std::abs(std::abs(m(2, 2)) - 1.0));
    // Row 2 is (0, 0, +-1, zShift); column 2 is (0, 0, +-1, 0).
    for (int i : idx) d = std::max(d, std::abs(m(i, 2)));
    d = std::max({d, std::abs(m(2, 0)), std::abs(m(2, 1))});
    return d;
}

// --- Render fixtures ------------------------------------------------------------------

struct Fixture {
    std::string name;
    hyperspace::Scene scene;
    hyperspace::CameraFrame camera;
    double fovY = 1.2;
    int width = 200;
    int height = 150;
};

inline Fixture loadFixture(const std::string& dir, const std::string& name) {
    std::ifstream in(dir + "/fixtures/" + name + ".json");
    if (!in) throw std::runtime_error("missing fixture " + name);
    nlohmann::json j;
    in >> j;
    Fixture f;
    f.name = name;
    f.scene = hyperspace::sceneFromJson(j);
    const auto& c = j.at("camera");
    const auto off = c.value("offset", std::vector<double>{0, 0, 0});
    f.camera = hyperspace::CameraFrame::placed(f.scene.space, Eigen::Vector3d(off[0], off[1], off[2]),
                                               c.value("yaw", 0.0), c.value("pitch", 0.0));
    f.fovY = j.value("fovY", f.fovY);
    f.width = j.value("width", f.width);
    f.height = j.value("height", f.height);
    return f;
}

inline const std::vector<std::string>& fixtureNames() {
    static const std::vector<std::string> names = {"h3_room",      "h3_corridor", "h2e_room",
                                                   "h2e_tilted",   "euclid_grid", "h3_marker"};
    return names;
}

/// Mean x of pixels that differ from the background, or NaN if none.
inline double markerCentroidX(const hyperspace::Image& img, hyperspace::Rgb background) {
    double sum = 0.0;
    long n = 0;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const auto p = img.at(x, y);
            if (p.r != background.r || p.g != background.g || p.b != background.b) {
                sum += x + 0.5;
                ++n;
            }
        }
    }
    return n ? sum / static_cast<double>(n) : std::nan("");
}

}  // namespace oracle
