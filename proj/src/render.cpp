#include "hyperspace/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace hyperspace {

namespace {

constexpr double kBand = 0.12;          // cube frame border width in cell coordinates
constexpr double kVertexCutoff = 0.995; // Klein radius of truncated ideal vertices
constexpr double kKleinClip = 0.9999;
constexpr double kNear = 1e-4;
constexpr double kDepthQuantum = 1e-9;
constexpr int kSubpixel = 256;
constexpr int kTile = 32;

// --- Meshes in cell coordinates [-1, 1]^3 ----------------------------------------

struct MeshTri {
    std::array<Vec3, 3> u;
    double tint = 1.0;
};

double faceTint(int axis) {
    static constexpr double tints[3] = {0.8, 1.0, 0.65};
    return tints[axis];
}

int subdivisions(double length) { return std::max(1, static_cast<int>(std::ceil(4.0 * length - 1e-9))); }

// Rectangle [b0,b1] x [c0,c1] on the face u_axis = side.
void addPatch(std::vector<MeshTri>& out, int axis, double side, double b0, double b1, double c0, double c1) {
    const int bAxis = (axis + 1) % 3;
    const int cAxis = (axis + 2) % 3;
    const int nb = subdivisions(b1 - b0);
    const int nc = subdivisions(c1 - c0);
    auto corner = [&](int i, int j) {
        Vec3 u;
        u[axis] = side;
        u[bAxis] = b0 + (b1 - b0) * i / nb;
        u[cAxis] = c0 + (c1 - c0) * j / nc;
        return u;
    };
    for (int i = 0; i < nb; ++i) {
        for (int j = 0; j < nc; ++j) {
            const Vec3 a = corner(i, j);
            const Vec3 b = corner(i + 1, j);
            const Vec3 c = corner(i + 1, j + 1);
            const Vec3 d = corner(i, j + 1);
            out.push_back({{a, b, c}, faceTint(axis)});
            out.push_back({{a, c, d}, faceTint(axis)});
        }
    }
}

std::vector<MeshTri> buildMesh(MeshKind kind) {
    std::vector<MeshTri> out;
    switch (kind) {
        case MeshKind::CubeFrame:
            for (int axis = 0; axis < 3; ++axis) {
                for (double side : {-1.0, 1.0}) {
                    const double in0 = -1.0 + kBand;
                    const double in1 = 1.0 - kBand;
                    addPatch(out, axis, side, -1.0, 1.0, -1.0, in0);
                    addPatch(out, axis, side, -1.0, 1.0, in1, 1.0);
                    addPatch(out, axis, side, -1.0, in0, in0, in1);
                    addPatch(out, axis, side, in1, 1.0, in0, in1);
                }
            }
            break;
        case MeshKind::FloorTile:
            addPatch(out, 1, -1.0, -1.0, 1.0, -1.0, 1.0);
            break;
        case MeshKind::Marker:
            for (int axis = 0; axis < 3; ++axis) {
                for (double side : {-1.0, 1.0}) addPatch(out, axis, side, -1.0, 1.0, -1.0, 1.0);
            }
            break;
    }
    return out;
}

Vec4 kleinLift(const Vec3& k) {
    Vec3 q = k;
    const double r = q.norm();
    if (r > kVertexCutoff) q *= kVertexCutoff / r;
    return Vec4(q[0], q[1], q[2], 1.0) / std::sqrt(1.0 - q.squaredNorm());
}

Vec3 kleinLift2(double a, double b) {
    const double r = std::hypot(a, b);
    if (r > kVertexCutoff) {
        a *= kVertexCutoff / r;
        b *= kVertexCutoff / r;
    }
    return Vec3(a, b, 1.0) / std::sqrt(1.0 - a * a - b * b);
}

// One prop's triangles in the fundamental cell, in scene coordinates.
struct LiftedProp {
    int cell = -1;
    Rgb color;
    std::vector<std::array<Vec4, 3>> tris;
    std::vector<double> tint;
};

LiftedProp liftProp(const Scene& scene, const Prop& prop) {
    const TilingGraph& graph = *scene.tiling;
    const double half = graph.cell.kleinHalfSide;
    const double r = graph.cell.inradius;
    const bool marker = prop.mesh == MeshKind::Marker;
    const double atLen = prop.at.norm();

    auto lift = [&](const Vec3& u) -> Vec4 {
        switch (scene.space) {
            case Space::H3: {
                if (!marker) return kleinLift(u * half);
                Vec4 x = kleinLift(u * std::tanh(prop.size));
                if (atLen > 0) x = translationAtOrigin(prop.at / atLen, atLen).apply(x);
                return x;
            }
            case Space::Euclidean:
                return marker ? Vec4(prop.at[0] + prop.size * u[0], prop.at[1] + prop.size * u[1],
                                     prop.at[2] + prop.size * u[2], 1.0)
                              : Vec4(half * u[0], half * u[1], half * u[2], 1.0);
            case Space::H2E: {
                if (!marker) {
                    const Vec3 h = kleinLift2(half * u[0], half * u[2]);
                    return {h[0], h[1], r * u[1], h[2]};
                }
                const double t = std::tanh(prop.size);
                Vec3 h = kleinLift2(t * u[0], t * u[2]);
                const double horizontal = std::hypot(prop.at[0], prop.at[2]);
                if (horizontal > 0) {
                    h = h2Translation(Vec2(prop.at[0], prop.at[2]) / horizontal, horizontal) * h;
                }
                return {h[0], h[1], prop.at[1] + prop.size * u[1], h[2]};
            }
        }
        return Vec4::Zero();
    };

    LiftedProp out;
    out.cell = prop.cell;
    out.color = prop.color;
    for (const MeshTri& t : buildMesh(prop.mesh)) {
        out.tris.push_back({lift(t.u[0]), lift(t.u[1]), lift(t.u[2])});
        out.tint.push_back(t.tint);
    }
    return out;
}

// --- Camera-relative maps -----------------------------------------------------------

Mat4 affineInverse(const Mat4& m) {
    Mat4 out = Mat4::Identity();
    const Mat3 rt = m.topLeftCorner<3, 3>().transpose();
    out.topLeftCorner<3, 3>() = rt;
    out.block<3, 1>(0, 3) = -rt * m.block<3, 1>(0, 3);
    return out;
}

Mat3 block013(const Mat4& m) {
    Mat3 h;
    const int idx[3] = {0, 1, 3};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) h(i, j) = m(idx[i], idx[j]);
    }
    return h;
}

// Scene coordinates -> coordinates relative to the camera's pose.
struct CellMap {
    Space space = Space::H3;
    Mat4 m = Mat4::Identity();   // H^3, Euclidean
    Mat3 h = Mat3::Identity();   // H^2 x E
    double zScale = 1.0;
    double zShift = 0.0;

    Vec4 apply(const Vec4& v) const {
        if (space != Space::H2E) return m * v;
        const Vec3 hv = h * Vec3(v[0], v[1], v[3]);
        return {hv[0], hv[1], zScale * v[2] + zShift, hv[2]};
    }
};

CellMap viewMap(const CameraFrame& camera) {
    CellMap map;
    map.space = camera.space();
    switch (camera.space()) {
        case Space::H3: {
            const Mat4& j = minkowskiMetric();
            map.m = j * camera.pose().transpose() * j;
            break;
        }
        case Space::Euclidean:
            map.m = affineInverse(camera.pose());
            break;
        case Space::H2E: {
            const ProductIsometry inv = camera.productPose().inverse();
            map.h = inv.hPart();
            map.zScale = inv.zFlip() ? -1.0 : 1.0;
            map.zShift = inv.zShift();
            break;
        }
    }
    return map;
}

CellMap compose(const CellMap& view, const Mat4& world, const Mat4& cell) {
    CellMap out = view;
    if (view.space == Space::H2E) {
        out.h = view.h * block013(cell);
    } else {
        out.m = view.m * world * cell;
    }
    return out;
}

// Camera-relative point -> eye chart (right, up, forward).
Vec3 chart(Space space, const Mat3& tilt, const Vec4& x) {
    switch (space) {
        case Space::H3: return x.head<3>() / x[3];
        case Space::Euclidean: return x.head<3>();
        case Space::H2E: {
            const double rho = std::acosh(std::max(1.0, x[3]));
            const double s = std::hypot(x[0], x[1]);
            const double k = s > 0.0 ? rho / s : 1.0;
            return tilt.transpose() * Vec3(k * x[0], x[2], k * x[1]);
        }
    }
    return Vec3::Zero();
}

double chartDepth(Space space, const Vec3& q) {
    if (space == Space::H3) return std::atanh(std::min(q.norm(), 1.0 - 1e-15));
    return q.norm();
}

double quantize(double d) { return std::round(d / kDepthQuantum) * kDepthQuantum; }

double cellDistance(const CellMap& map) {
    switch (map.space) {
        case Space::H3: return std::acosh(std::max(1.0, map.m(3, 3)));
        case Space::Euclidean: return map.m.block<3, 1>(0, 3).norm();
        case Space::H2E: return std::hypot(std::acosh(std::max(1.0, map.h(2, 2))), map.zShift);
    }
    return 0.0;
}

// --- Pipeline -------------------------------------------------------------------------

struct EyeTri {
    std::array<Vec3, 3> p;
    std::array<double, 3> color;
};

std::vector<EyeTri> eyeTriangles(const Scene& scene, const CameraFrame& camera, bool parallel, RenderStats* stats) {
    const TilingGraph& graph = *scene.tiling;
    if (scene.space == Space::H2E && !scene.worldTransform.isIdentity()) {
        throw GeometryError(ErrorKind::Precondition, "world transforms are not supported for H^2 x E scenes");
    }
    std::vector<LiftedProp> props;
    props.reserve(scene.props.size());
    for (const Prop& p : scene.props) props.push_back(liftProp(scene, p));

    const CellMap view = viewMap(camera);
    const int n = static_cast<int>(graph.cells.size());
    std::vector<CellMap> maps(static_cast<std::size_t>(n));
    std::vector<double> dist(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
        maps[static_cast<std::size_t>(c)] = compose(view, scene.worldTransform, graph.cells[static_cast<std::size_t>(c)].toCell);
        dist[static_cast<std::size_t>(c)] = cellDistance(maps[static_cast<std::size_t>(c)]);
    }
    // Near cells first; ties by index keep the order deterministic.
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return dist[static_cast<std::size_t>(a)] < dist[static_cast<std::size_t>(b)]; });

    const Mat3 tilt = scene.space == Space::H2E ? camera.tilt() : Mat3::Identity();
    std::vector<std::vector<EyeTri>> perCell(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(dynamic, 4) if (parallel)
    for (int k = 0; k < n; ++k) {
        const int c = order[static_cast<std::size_t>(k)];
        const CellMap& map = maps[static_cast<std::size_t>(c)];
        auto& out = perCell[static_cast<std::size_t>(k)];
        for (const LiftedProp& prop : props) {
            if (prop.cell != -1 && prop.cell != c) continue;
            for (std::size_t t = 0; t < prop.tris.size(); ++t) {
                EyeTri tri;
                bool keep = true;
                for (int v = 0; v < 3; ++v) {
                    tri.p[static_cast<std::size_t>(v)] = chart(scene.space, tilt, map.apply(prop.tris[t][static_cast<std::size_t>(v)]));
                    if (scene.space == Space::H3 && tri.p[static_cast<std::size_t>(v)].norm() > kKleinClip) keep = false;
                }
                if (!keep) continue;
                const double s = prop.tint[t];
                tri.color = {prop.color.r * s, prop.color.g * s, prop.color.b * s};
                out.push_back(tri);
            }
        }
    }
    std::vector<EyeTri> all;
    for (auto& v : perCell) all.insert(all.end(), v.begin(), v.end());
    if (stats) {
        stats->cells = n;
        stats->truncated = graph.truncated;
    }
    return all;
}

struct ScreenTri {
    std::array<std::int64_t, 3> x;
    std::array<std::int64_t, 3> y;
    std::array<double, 3> depth;
    std::array<double, 3> fog;
    std::array<double, 3> color;
    std::int64_t area = 0;
    int minX = 0, maxX = 0, minY = 0, maxY = 0;
};

struct View {
    Space space = Space::H3;
    Vec3 offset = Vec3::Zero();  // eye position in the chart
    bool modelDepth = false;     // Euclidean depth in the chart, fog from the chart's own metric
    double focal = 1.0;
    int width = 1;
    int height = 1;
};

// Sutherland-Hodgman against the near plane and a guard band twice the viewport.
std::vector<Vec3> clipPolygon(const std::array<Vec3, 3>& tri, const View& view) {
    const double gx = view.width / view.focal;
    const double gy = view.height / view.focal;
    std::vector<Vec3> poly(tri.begin(), tri.end());
    auto clipAgainst = [&poly](auto dist) {
        std::vector<Vec3> out;
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3& a = poly[i];
            const Vec3& b = poly[(i + 1) % n];
            const double da = dist(a);
            const double db = dist(b);
            if (da >= 0) out.push_back(a);
            if ((da >= 0) != (db >= 0)) {
                const double t = da / (da - db);
                out.push_back(a + t * (b - a));
            }
        }
        poly.swap(out);
    };
    clipAgainst([](const Vec3& v) { return v[2] - kNear; });
    if (poly.size() < 3) return {};
    clipAgainst([gx](const Vec3& v) { return gx * v[2] - v[0]; });
    clipAgainst([gx](const Vec3& v) { return gx * v[2] + v[0]; });
    clipAgainst([gy](const Vec3& v) { return gy * v[2] - v[1]; });
    clipAgainst([gy](const Vec3& v) { return gy * v[2] + v[1]; });
    if (poly.size() < 3) return {};
    return poly;
}

std::int64_t edge(std::int64_t ax, std::int64_t ay, std::int64_t bx, std::int64_t by, std::int64_t px, std::int64_t py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

bool topLeft(std::int64_t ax, std::int64_t ay, std::int64_t bx, std::int64_t by) {
    const std::int64_t dx = bx - ax;
    const std::int64_t dy = by - ay;
    return dy < 0 || (dy == 0 && dx > 0);
}

std::vector<ScreenTri> setupTriangles(const std::vector<EyeTri>& tris, const View& view, bool parallel) {
    const int chunks = std::max(1, static_cast<int>(tris.size() / 2048));
    std::vector<std::vector<ScreenTri>> parts(static_cast<std::size_t>(chunks));

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int ch = 0; ch < chunks; ++ch) {
        const std::size_t begin = tris.size() * static_cast<std::size_t>(ch) / static_cast<std::size_t>(chunks);
        const std::size_t end = tris.size() * static_cast<std::size_t>(ch + 1) / static_cast<std::size_t>(chunks);
        auto& out = parts[static_cast<std::size_t>(ch)];
        for (std::size_t t = begin; t < end; ++t) {
            std::array<Vec3, 3> local;
            for (std::size_t v = 0; v < 3; ++v) local[v] = tris[t].p[v] - view.offset;
            const std::vector<Vec3> poly = clipPolygon(local, view);
            if (poly.empty()) continue;

            const std::size_t n = poly.size();
            std::vector<std::int64_t> px(n), py(n);
            std::vector<double> depth(n), fog(n);
            for (std::size_t i = 0; i < n; ++i) {
                const Vec3& q = poly[i];
                const double sx = 0.5 * view.width + view.focal * q[0] / q[2];
                const double sy = 0.5 * view.height - view.focal * q[1] / q[2];
                px[i] = std::llround(sx * kSubpixel);
                py[i] = std::llround(sy * kSubpixel);
                if (view.modelDepth) {
                    depth[i] = quantize(q.norm());
                    fog[i] = quantize(chartDepth(view.space, q + view.offset));
                } else {
                    depth[i] = quantize(chartDepth(view.space, q));
                    fog[i] = depth[i];
                }
            }
            for (std::size_t i = 1; i + 1 < n; ++i) {
                std::array<std::size_t, 3> idx = {0, i, i + 1};
                std::int64_t area = edge(px[idx[0]], py[idx[0]], px[idx[1]], py[idx[1]], px[idx[2]], py[idx[2]]);
                if (area == 0) continue;
                if (area < 0) {
                    std::swap(idx[1], idx[2]);
                    area = -area;
                }
                ScreenTri s;
                s.area = area;
                s.color = tris[t].color;
                std::int64_t x0 = std::numeric_limits<std::int64_t>::max(), x1 = std::numeric_limits<std::int64_t>::min();
                std::int64_t y0 = x0, y1 = x1;
                for (std::size_t v = 0; v < 3; ++v) {
                    s.x[v] = px[idx[v]];
                    s.y[v] = py[idx[v]];
                    s.depth[v] = depth[idx[v]];
                    s.fog[v] = fog[idx[v]];
                    x0 = std::min(x0, s.x[v]);
                    x1 = std::max(x1, s.x[v]);
                    y0 = std::min(y0, s.y[v]);
                    y1 = std::max(y1, s.y[v]);
                }
                s.minX = static_cast<int>(std::max<std::int64_t>(0, (x0 >> 8) - 1));
                s.maxX = static_cast<int>(std::min<std::int64_t>(view.width - 1, (x1 >> 8) + 1));
                s.minY = static_cast<int>(std::max<std::int64_t>(0, (y0 >> 8) - 1));
                s.maxY = static_cast<int>(std::min<std::int64_t>(view.height - 1, (y1 >> 8) + 1));
                if (s.minX > s.maxX || s.minY > s.maxY) continue;
                out.push_back(s);
            }
        }
    }
    std::vector<ScreenTri> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return all;
}

struct Target {
    Image* image;
    std::vector<double>* zbuf;
    Rgb background;
    double fogScale;
};

// Shared by both rasterizers so that every pixel sees identical arithmetic.
inline void shadePixel(const ScreenTri& s, int x, int y, Target& target) {
    const std::int64_t sx = static_cast<std::int64_t>(x) * kSubpixel + kSubpixel / 2;
    const std::int64_t sy = static_cast<std::int64_t>(y) * kSubpixel + kSubpixel / 2;
    const std::int64_t w0 = edge(s.x[1], s.y[1], s.x[2], s.y[2], sx, sy);
    const std::int64_t w1 = edge(s.x[2], s.y[2], s.x[0], s.y[0], sx, sy);
    const std::int64_t w2 = edge(s.x[0], s.y[0], s.x[1], s.y[1], sx, sy);
    if (w0 < 0 || w1 < 0 || w2 < 0) return;
    if (w0 == 0 && !topLeft(s.x[1], s.y[1], s.x[2], s.y[2])) return;
    if (w1 == 0 && !topLeft(s.x[2], s.y[2], s.x[0], s.y[0])) return;
    if (w2 == 0 && !topLeft(s.x[0], s.y[0], s.x[1], s.y[1])) return;
    const double area = static_cast<double>(s.area);
    const double b0 = static_cast<double>(w0) / area;
    const double b1 = static_cast<double>(w1) / area;
    const double b2 = static_cast<double>(w2) / area;
    const double depth = b0 * s.depth[0] + b1 * s.depth[1] + b2 * s.depth[2];
    double& z = (*target.zbuf)[static_cast<std::size_t>(y) * static_cast<std::size_t>(target.image->width()) +
                               static_cast<std::size_t>(x)];
    if (!(depth < z)) return;
    z = depth;
    const double fogDepth = b0 * s.fog[0] + b1 * s.fog[1] + b2 * s.fog[2];
    const double k = std::exp(-fogDepth / target.fogScale);
    const Rgb bg = target.background;
    auto channel = [k](double bgc, double c) {
        return static_cast<std::uint8_t>(std::clamp<long>(std::lround(bgc + (c - bgc) * k), 0, 255));
    };
    target.image->set(x, y, {channel(bg.r, s.color[0]), channel(bg.g, s.color[1]), channel(bg.b, s.color[2])});
}

void rasterizeSerial(const std::vector<ScreenTri>& tris, Target& target) {
    for (const ScreenTri& s : tris) {
        for (int y = s.minY; y <= s.maxY; ++y) {
            for (int x = s.minX; x <= s.maxX; ++x) shadePixel(s, x, y, target);
        }
    }
}

void rasterizeTiled(const std::vector<ScreenTri>& tris, Target& target) {
    const int w = target.image->width();
    const int h = target.image->height();
    const int tilesX = (w + kTile - 1) / kTile;
    const int tilesY = (h + kTile - 1) / kTile;
    std::vector<std::vector<int>> bins(static_cast<std::size_t>(tilesX * tilesY));
    for (int i = 0; i < static_cast<int>(tris.size()); ++i) {
        const ScreenTri& s = tris[static_cast<std::size_t>(i)];
        for (int ty = s.minY / kTile; ty <= s.maxY / kTile; ++ty) {
            for (int tx = s.minX / kTile; tx <= s.maxX / kTile; ++tx) {
                bins[static_cast<std::size_t>(ty * tilesX + tx)].push_back(i);
            }
        }
    }
#pragma omp parallel for schedule(dynamic)
    for (int tile = 0; tile < tilesX * tilesY; ++tile) {
        const int x0 = (tile % tilesX) * kTile;
        const int y0 = (tile / tilesX) * kTile;
        const int x1 = std::min(w, x0 + kTile) - 1;
        const int y1 = std::min(h, y0 + kTile) - 1;
        for (int i : bins[static_cast<std::size_t>(tile)]) {
            const ScreenTri& s = tris[static_cast<std::size_t>(i)];
            const int ya = std::max(y0, s.minY);
            const int yb = std::min(y1, s.maxY);
            const int xa = std::max(x0, s.minX);
            const int xb = std::min(x1, s.maxX);
            for (int y = ya; y <= yb; ++y) {
                for (int x = xa; x <= xb; ++x) shadePixel(s, x, y, target);
            }
        }
    }
}

double focalLength(double fovY, int height) {
    if (!(fovY > 0.0) || !(fovY < std::numbers::pi)) {
        throw GeometryError(ErrorKind::Precondition, "fovY must lie in (0, pi)");
    }
    return 0.5 * height / std::tan(0.5 * fovY);
}

Image drawView(const Scene& scene, const std::vector<EyeTri>& tris, const View& view, bool serial, RenderStats* stats) {
    Image image(view.width, view.height, scene.background);
    std::vector<double> zbuf(static_cast<std::size_t>(view.width) * static_cast<std::size_t>(view.height),
                             std::numeric_limits<double>::infinity());
    const std::vector<ScreenTri> screen = setupTriangles(tris, view, !serial);
    if (stats) stats->triangles = static_cast<long>(screen.size());
    Target target{&image, &zbuf, scene.background, scene.fogScale};
    if (serial) {
        rasterizeSerial(screen, target);
    } else {
        rasterizeTiled(screen, target);
    }
    return image;
}

void checkRenderable(const Scene& scene, const CameraFrame& camera, int width, int height) {
    if (!scene.tiling) throw GeometryError(ErrorKind::Precondition, "scene has no tiling; call buildTiling");
    if (camera.space() != scene.space) throw GeometryError(ErrorKind::Precondition, "camera and scene spaces differ");
    if (width <= 0 || height <= 0) throw GeometryError(ErrorKind::Precondition, "image size must be positive");
    if (!(scene.fogScale > 0.0)) throw GeometryError(ErrorKind::Precondition, "fogScale must be positive");
}

Rgb parseColor(const nlohmann::json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s.size() != 7 || s[0] != '#') throw GeometryError(ErrorKind::Parse, "colors are #rrggbb or [r,g,b]");
        const unsigned long v = std::stoul(s.substr(1), nullptr, 16);
        return {static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>((v >> 8) & 0xff),
                static_cast<std::uint8_t>(v & 0xff)};
    }
    if (!j.is_array() || j.size() != 3) throw GeometryError(ErrorKind::Parse, "colors are #rrggbb or [r,g,b]");
    auto c = [](const nlohmann::json& x) {
        const int v = x.get<int>();
        if (v < 0 || v > 255) throw GeometryError(ErrorKind::Parse, "color channel out of range");
        return static_cast<std::uint8_t>(v);
    };
    return {c(j[0]), c(j[1]), c(j[2])};
}

}  // namespace

// --- Names -------------------------------------------------------------------------------

std::string_view toString(MeshKind kind) {
    switch (kind) {
        case MeshKind::CubeFrame: return "cubeFrame";
        case MeshKind::FloorTile: return "floorTile";
        case MeshKind::Marker: return "marker";
    }
    return "cubeFrame";
}

MeshKind parseMeshKind(std::string_view text) {
    if (text == "cubeFrame") return MeshKind::CubeFrame;
    if (text == "floorTile") return MeshKind::FloorTile;
    if (text == "marker") return MeshKind::Marker;
    throw GeometryError(ErrorKind::Parse, "unknown mesh '" + std::string(text) + "'");
}

std::string_view toString(StereoMode mode) { return mode == StereoMode::InSpace ? "inSpace" : "modelSpace"; }

StereoMode parseStereoMode(std::string_view text) {
    if (text == "inSpace") return StereoMode::InSpace;
    if (text == "modelSpace") return StereoMode::ModelSpace;
    throw GeometryError(ErrorKind::Parse, "unknown stereo mode '" + std::string(text) + "'");
}

// --- Scenes ------------------------------------------------------------------------------

SchlafliSymbol defaultSchlafli(Space space) {
    switch (space) {
        case Space::H3: return {{4, 3, 6}};
        case Space::H2E: return {{4, 6}};
        case Space::Euclidean: return {{4, 3, 4}};
    }
    return {{4, 3, 6}};
}

void buildTiling(Scene& scene) {
    if (scene.schlafli.entries.empty()) scene.schlafli = defaultSchlafli(scene.space);
    const int dim = scene.schlafli.dimension();
    if ((scene.space == Space::H2E) != (dim == 2)) {
        throw GeometryError(ErrorKind::Precondition, "H^2 x E scenes use 2-D tilings; the other spaces use honeycombs");
    }
    if (scene.tilingDepth < 0) throw GeometryError(ErrorKind::Precondition, "tilingDepth must be nonnegative");
    auto graph = std::make_shared<TilingGraph>(generateCells(scene.schlafli, scene.tilingDepth, scene.maxCells));
    const bool flat = graph->geometry() == GeometryClass::Euclidean;
    if (flat != (scene.space == Space::Euclidean)) {
        throw GeometryError(ErrorKind::Precondition, scene.schlafli.str() + " does not tile " + std::string(toString(scene.space)));
    }
    for (const Prop& p : scene.props) {
        if (p.cell < -1 || p.cell >= static_cast<int>(graph->cells.size())) {
            throw GeometryError(ErrorKind::Precondition, "prop cell " + std::to_string(p.cell) + " is not in the tiling");
        }
        if (!(p.size > 0.0)) throw GeometryError(ErrorKind::Precondition, "prop size must be positive");
    }
    scene.tiling = std::move(graph);
}

Scene sceneFromJson(const nlohmann::json& j) {
    Scene scene;
    try {
        scene.space = parseSpace(j.at("space").get<std::string>());
        if (j.contains("schlafli")) {
            const auto& s = j["schlafli"];
            scene.schlafli = s.is_string() ? SchlafliSymbol::parse(s.get<std::string>())
                                           : SchlafliSymbol{s.get<std::vector<int>>()};
        }
        scene.tilingDepth = j.value("tilingDepth", scene.tilingDepth);
        scene.maxCells = j.value("maxCells", scene.maxCells);
        scene.fogScale = j.value("fogScale", scene.fogScale);
        scene.portal = j.value("portal", scene.portal);
        if (j.contains("background")) scene.background = parseColor(j["background"]);
        for (const auto& pj : j.value("props", nlohmann::json::array())) {
            Prop p;
            p.cell = pj.value("cell", -1);
            p.mesh = parseMeshKind(pj.at("mesh").get<std::string>());
            if (pj.contains("color")) p.color = parseColor(pj["color"]);
            if (pj.contains("at")) {
                const auto at = pj["at"].get<std::vector<double>>();
                if (at.size() != 3) throw GeometryError(ErrorKind::Parse, "prop `at` needs three numbers");
                p.at = Vec3(at[0], at[1], at[2]);
            }
            p.size = pj.value("size", p.size);
            scene.props.push_back(p);
        }
    } catch (const nlohmann::json::exception& e) {
        throw GeometryError(ErrorKind::Parse, std::string("scene: ") + e.what());
    }
    buildTiling(scene);
    return scene;
}

Scene loadScene(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GeometryError(ErrorKind::Parse, "cannot read scene " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw GeometryError(ErrorKind::Parse, path + ": " + e.what());
    }
    return sceneFromJson(j);
}

nlohmann::json toJson(const Scene& scene) {
    nlohmann::json props = nlohmann::json::array();
    for (const Prop& p : scene.props) {
        props.push_back({{"cell", p.cell},
                         {"mesh", toString(p.mesh)},
                         {"color", {p.color.r, p.color.g, p.color.b}},
                         {"at", {p.at[0], p.at[1], p.at[2]}},
                         {"size", p.size}});
    }
    return {{"space", toString(scene.space)},
            {"schlafli", scene.schlafli.entries},
            {"tilingDepth", scene.tilingDepth},
            {"maxCells", scene.maxCells},
            {"fogScale", scene.fogScale},
            {"background", {scene.background.r, scene.background.g, scene.background.b}},
            {"portal", scene.portal},
            {"props", props}};
}

// --- Cameras -----------------------------------------------------------------------------

CameraFrame portalReduce(const TilingGraph& tiling, const CameraFrame& camera) {
    CameraFrame c = camera;
    for (int iter = 0; iter < 1024; ++iter) {
        Vec4 p = c.position();
        if (c.space() == Space::H2E) p[2] = 0.0;
        int face = -1;
        double worst = 1e-12;
        for (int f = 0; f < tiling.faceCount(); ++f) {
            const double e = tiling.faceExcess(f, p);
            if (e > worst) {
                worst = e;
                face = f;
            }
        }
        if (face < 0) return c;
        const Mat4& g = tiling.generators[static_cast<std::size_t>(face)];
        switch (c.space()) {
            case Space::H3: {
                const Mat4& j = minkowskiMetric();
                c = CameraFrame::fromPose(Space::H3, gramSchmidtMinkowski(j * g.transpose() * j * c.pose()));
                break;
            }
            case Space::Euclidean:
                c = CameraFrame::fromPose(Space::Euclidean, affineInverse(g) * c.pose());
                break;
            case Space::H2E:
                c = CameraFrame::fromProduct(ProductIsometry::horizontal(h2Inverse(block013(g))) * c.productPose(), c.tilt())
                        .renormalized();
                break;
        }
    }
    throw GeometryError(ErrorKind::Precondition, "camera did not reduce into the fundamental cell");
}

Vec3 eyeCoordinates(Space space, const CameraFrame& camera, const Vec4& point) {
    if (camera.space() != space) throw GeometryError(ErrorKind::Precondition, "camera and point spaces differ");
    const Mat3 tilt = space == Space::H2E ? camera.tilt() : Mat3::Identity();
    return chart(space, tilt, viewMap(camera).apply(point));
}

ScreenPoint projectPoint(Space space, const CameraFrame& camera, const Vec4& point, double fovY, int width, int height) {
    const double f = focalLength(fovY, height);
    const Vec3 q = eyeCoordinates(space, camera, point);
    ScreenPoint s;
    s.depth = chartDepth(space, q);
    if (q[2] <= 0.0) return s;
    s.visible = true;
    s.x = 0.5 * width + f * q[0] / q[2];
    s.y = 0.5 * height - f * q[1] / q[2];
    return s;
}

// --- Rendering ---------------------------------------------------------------------------

Image renderFrame(const Scene& scene, const CameraFrame& camera, double fovY, int width, int height,
                  RenderOptions options, RenderStats* stats) {
    checkRenderable(scene, camera, width, height);
    const CameraFrame eye = scene.portal ? portalReduce(*scene.tiling, camera) : camera;
    const std::vector<EyeTri> tris = eyeTriangles(scene, eye, !options.serial, stats);
    View view;
    view.space = scene.space;
    view.focal = focalLength(fovY, height);
    view.width = width;
    view.height = height;
    return drawView(scene, tris, view, options.serial, stats);
}

Image renderFrameSerial(const Scene& scene, const CameraFrame& camera, double fovY, int width, int height) {
    return renderFrame(scene, camera, fovY, width, height, RenderOptions{true});
}

std::pair<Image, Image> renderStereo(const Scene& scene, const CameraFrame& camera, const EyeConfig& eye,
                                     StereoMode mode, double fovY, int width, int height, RenderOptions options) {
    checkRenderable(scene, camera, width, height);
    eye.validate();
    const CameraFrame head = scene.portal ? portalReduce(*scene.tiling, camera) : camera;
    View view;
    view.space = scene.space;
    view.focal = focalLength(fovY, height);
    view.width = width;
    view.height = height;

    if (mode == StereoMode::InSpace) {
        const auto [left, right] = eyeFrames(head, eye);
        const auto lt = eyeTriangles(scene, left, !options.serial, nullptr);
        const auto rt = eyeTriangles(scene, right, !options.serial, nullptr);
        return {drawView(scene, lt, view, options.serial, nullptr), drawView(scene, rt, view, options.serial, nullptr)};
    }
    const auto tris = eyeTriangles(scene, head, !options.serial, nullptr);
    const double a = 0.5 * eye.ipd * eye.worldScale;
    view.modelDepth = true;
    View leftView = view;
    leftView.offset = Vec3(-a, 0.0, 0.0);
    View rightView = view;
    rightView.offset = Vec3(a, 0.0, 0.0);
    return {drawView(scene, tris, leftView, options.serial, nullptr),
            drawView(scene, tris, rightView, options.serial, nullptr)};
}

}  // namespace hyperspace
