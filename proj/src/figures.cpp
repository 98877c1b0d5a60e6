#include "hyperspace/figures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "hyperspace/walkthrough.hpp"

namespace hyperspace {

namespace {

constexpr Rgb kInk{30, 30, 30};
constexpr Rgb kBlue{40, 90, 200};
constexpr Rgb kRed{200, 40, 40};
constexpr Rgb kGreen{30, 150, 60};
constexpr Rgb kGrey{170, 170, 170};

double cross2(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

// Parameters s with |a + s d| = 1.
std::pair<double, double> unitCircleHits(const Vec2& a, const Vec2& d) {
    const double qa = d.squaredNorm();
    const double qb = 2.0 * a.dot(d);
    const double qc = a.squaredNorm() - 1.0;
    const double disc = std::sqrt(qb * qb - 4.0 * qa * qc);
    return {(-qb - disc) / (2.0 * qa), (-qb + disc) / (2.0 * qa)};
}

std::vector<Vec2> sampleGeodesic(const MPoint& p, const MTangent& v, const Models2dParams& params, Model model) {
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(params.samples));
    for (int i = 0; i < params.samples; ++i) {
        const double t = -params.reach + 2.0 * params.reach * i / (params.samples - 1);
        out.push_back(projectToModel2d(geodesicPoint(p, v, t), model));
    }
    return out;
}

void fitWindow(Panel& panel, double pad = 0.15) {
    Vec2 lo(1e300, 1e300);
    Vec2 hi(-1e300, -1e300);
    auto take = [&](const Vec2& p) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    };
    for (const Curve& c : panel.curves) {
        for (const Vec2& p : c.points) take(p);
    }
    for (const Arrow& a : panel.arrows) {
        take(a.tail);
        take(a.head);
    }
    for (const Vec2& d : panel.dots) take(d);
    const Vec2 centre = 0.5 * (lo + hi);
    const double half = 0.5 * std::max(hi[0] - lo[0], hi[1] - lo[1]) * (1.0 + pad) + 1e-3;
    panel.lower = centre - Vec2(half, half);
    panel.upper = centre + Vec2(half, half);
}

std::string formatDeg(double rad) {
    std::ostringstream s;
    s.precision(4);
    s << rad * 180.0 / std::numbers::pi << " deg";
    return s.str();
}

// Path of a camera replaying a script, with frame arrows at command boundaries.
struct Trace {
    Curve path;
    std::vector<Arrow> arrows;
    CameraFrame end;
};

Trace traceScript(const CameraFrame& start, const std::vector<Command>& script,
                  const std::function<Vec2(const CameraFrame&)>& proj, const std::vector<int>& arrowAxes) {
    Trace t;
    t.path.role = "path";
    t.path.color = kInk;
    CameraFrame c = start;
    auto arrowsAt = [&](const CameraFrame& f) {
        for (int axis : arrowAxes) {
            const Rgb color = axis == 0 ? kRed : axis == 1 ? kGreen : kBlue;
            t.arrows.push_back({proj(f), proj(f.translated(Vec3::Unit(axis), 0.12)), color});
        }
    };
    t.path.points.push_back(proj(c));
    arrowsAt(c);
    for (const Command& cmd : script) {
        if (cmd.kind == Command::Kind::Translate) {
            constexpr int kSteps = 16;
            for (int i = 0; i < kSteps; ++i) {
                c = applyCommand(c, Command::translate(cmd.axis, cmd.amount / kSteps));
                t.path.points.push_back(proj(c));
            }
        } else {
            c = applyCommand(c, cmd);
        }
        arrowsAt(c);
    }
    t.end = c;
    return t;
}

// --- Raster helpers ---------------------------------------------------------------

struct Rect {
    double x0, y0, x1, y1;
};

// Liang-Barsky; false when the segment misses the rectangle.
bool clipSegment(Vec2& a, Vec2& b, const Rect& r) {
    if (!a.allFinite() || !b.allFinite()) return false;
    double t0 = 0.0;
    double t1 = 1.0;
    const Vec2 d = b - a;
    const double p[4] = {-d[0], d[0], -d[1], d[1]};
    const double q[4] = {a[0] - r.x0, r.x1 - a[0], a[1] - r.y0, r.y1 - a[1]};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] < 0.0) return false;
            continue;
        }
        const double t = q[i] / p[i];
        if (p[i] < 0.0) {
            t0 = std::max(t0, t);
        } else {
            t1 = std::min(t1, t);
        }
        if (t0 > t1) return false;
    }
    const Vec2 a0 = a;
    a = a0 + t0 * d;
    b = a0 + t1 * d;
    return true;
}

void drawSegment(Image& img, Vec2 a, Vec2 b, const Rect& clip, Rgb color) {
    if (!clipSegment(a, b, clip)) return;
    const int n = std::max(1, static_cast<int>(std::ceil(2.0 * (b - a).cwiseAbs().maxCoeff())));
    for (int i = 0; i <= n; ++i) {
        const Vec2 p = a + (b - a) * (static_cast<double>(i) / n);
        const int x = static_cast<int>(std::floor(p[0]));
        const int y = static_cast<int>(std::floor(p[1]));
        if (x >= 0 && y >= 0 && x < img.width() && y < img.height()) img.set(x, y, color);
    }
}

std::vector<std::pair<Vec2, Vec2>> arrowStrokes(const Vec2& tail, const Vec2& head) {
    std::vector<std::pair<Vec2, Vec2>> out = {{tail, head}};
    const Vec2 d = head - tail;
    const double len = d.norm();
    if (len < 1e-9) return out;
    const Vec2 u = d / len;
    const Vec2 n(-u[1], u[0]);
    const double k = std::min(8.0, 0.35 * len);
    out.push_back({head, head - k * u + 0.5 * k * n});
    out.push_back({head, head - k * u - 0.5 * k * n});
    return out;
}

}  // namespace

std::string_view toString(FigureKind kind) {
    switch (kind) {
        case FigureKind::Models2d: return "models2d";
        case FigureKind::SphereTransport: return "sphereTransport";
        case FigureKind::LoopPanels: return "loopPanels";
        case FigureKind::TransportCycle: return "transportCycle";
    }
    return "models2d";
}

FigureKind parseFigureKind(std::string_view text) {
    if (text == "models2d") return FigureKind::Models2d;
    if (text == "sphereTransport") return FigureKind::SphereTransport;
    if (text == "loopPanels") return FigureKind::LoopPanels;
    if (text == "transportCycle") return FigureKind::TransportCycle;
    throw GeometryError(ErrorKind::Parse, "unknown figure '" + std::string(text) + "'");
}

Vec2 Figure::toPixel(std::size_t index, const Vec2& model) const {
    const Panel& p = panels.at(index);
    const double x0 = margin + static_cast<double>(index) * (panelSize + margin);
    const double y0 = margin;
    const double scale = panelSize / std::max(p.upper[0] - p.lower[0], p.upper[1] - p.lower[1]);
    return {x0 + (model[0] - p.lower[0]) * scale, y0 + panelSize - (model[1] - p.lower[1]) * scale};
}

// --- Figures ------------------------------------------------------------------------

Figure models2dFigure(const Models2dParams& params, int panelSize) {
    const Vec2 a = params.lineA;
    const Vec2 b = params.lineB;
    const Vec2 p = params.point;
    if (std::max({a.norm(), b.norm(), p.norm()}) >= 1.0) {
        throw GeometryError(ErrorKind::Precondition, "points must lie inside the Klein disk");
    }
    if ((b - a).norm() < 1e-9) throw GeometryError(ErrorKind::Precondition, "line needs two distinct points");
    if (std::abs(cross2(b - a, p - a)) / (b - a).norm() < 1e-9) {
        throw GeometryError(ErrorKind::Precondition, "p lies on the line L");
    }
    if (params.parallels < 2 || params.samples < 2) {
        throw GeometryError(ErrorKind::Precondition, "need at least two parallels and two samples");
    }

    // Ideal endpoints of L; lines through p that avoid the chord between them are parallels.
    const auto [s1, s2] = unitCircleHits(a, b - a);
    const Vec2 xi1 = a + s1 * (b - a);
    const Vec2 xi2 = a + s2 * (b - a);
    double phi1 = std::atan2(xi1[1] - p[1], xi1[0] - p[0]);
    double phi2 = std::atan2(xi2[1] - p[1], xi2[0] - p[0]);
    double sweep = std::remainder(phi2 - phi1, 2.0 * std::numbers::pi);
    if (sweep < 0) {
        std::swap(phi1, phi2);
        sweep = -sweep;
    }

    const MPoint lp = liftFromModel2d(a, Model::Klein);
    const MTangent lv = directionTo(lp, liftFromModel2d(b, Model::Klein));
    const MPoint pp = liftFromModel2d(p, Model::Klein);
    std::vector<MTangent> fan;
    for (int k = 0; k < params.parallels; ++k) {
        const double psi = phi2 + (std::numbers::pi - sweep) * k / (params.parallels - 1);
        const Vec2 q = p + 1e-3 * Vec2(std::cos(psi), std::sin(psi));
        fan.push_back(directionTo(pp, liftFromModel2d(q, Model::Klein)));
    }

    Figure fig;
    fig.panelSize = panelSize;
    for (Model model : params.models) {
        Panel panel;
        panel.title = std::string(toString(model));
        if (model == Model::HalfSpace) {
            panel.lower = Vec2(-3.0, -0.25);
            panel.upper = Vec2(3.0, 5.75);
            panel.baseline = true;
        } else {
            panel.lower = Vec2(-1.05, -1.05);
            panel.upper = Vec2(1.05, 1.05);
            panel.unitCircle = true;
        }
        panel.curves.push_back({sampleGeodesic(lp, lv, params, model), kInk, "line"});
        for (int k = 0; k < params.parallels; ++k) {
            const bool limiting = k == 0 || k == params.parallels - 1;
            panel.curves.push_back({sampleGeodesic(pp, fan[static_cast<std::size_t>(k)], params, model),
                                    limiting ? kRed : kBlue, limiting ? "limiting" : "parallel"});
        }
        panel.dots.push_back(projectToModel2d(pp, model));
        fig.panels.push_back(std::move(panel));
    }
    return fig;
}

Figure sphereTransportFigure(int panelSize) {
    const Vec3 w = Vec3(1, 1, 1).normalized();
    const Vec3 ex = Vec3(-1, 1, 0).normalized();
    const Vec3 ey = w.cross(ex);
    auto proj = [&](const Vec3& x) { return Vec2(x.dot(ex), x.dot(ey)); };

    const std::vector<Vec3> corners = {Vec3(1, 0, 0), Vec3(0, 0, 1), Vec3(0, 1, 0), Vec3(1, 0, 0)};
    Panel panel;
    panel.title = "octant loop";
    panel.lower = Vec2(-1.1, -1.1);
    panel.upper = Vec2(1.1, 1.1);
    panel.unitCircle = true;
    Curve path{{}, kInk, "path"};

    const Vec3 v0(0, 0, 1);  // at (1,0,0), pointing along the first leg
    Vec3 v = v0;
    constexpr int kSteps = 6;
    for (std::size_t leg = 0; leg + 1 < corners.size(); ++leg) {
        const Vec3& from = corners[leg];
        const Vec3& to = corners[leg + 1];
        const double theta = std::acos(std::clamp(from.dot(to), -1.0, 1.0));
        auto slerp = [&](double t) {
            return ((std::sin((1 - t) * theta) * from + std::sin(t * theta) * to) / std::sin(theta)).eval();
        };
        for (int i = 0; i <= 64; ++i) path.points.push_back(proj(slerp(i / 64.0)));
        Vec3 at = from;
        for (int i = 0; i <= kSteps; ++i) {
            const Vec3 next = slerp(static_cast<double>(i) / kSteps).normalized();
            v = sphereParallelTransport(SpherePoint::fromCoords(at), SpherePoint::fromCoords(next), v);
            at = next;
            panel.arrows.push_back({proj(at), proj(at + 0.18 * v), kRed});
        }
    }
    panel.curves.push_back(std::move(path));

    std::vector<SpherePoint> loop;
    for (const Vec3& c : corners) loop.push_back(SpherePoint::fromCoords(c));
    Figure fig;
    fig.panelSize = panelSize;
    fig.measurements["finalArrowAngleDeg"] = std::acos(std::clamp(v.dot(v0), -1.0, 1.0)) * 180.0 / std::numbers::pi;
    fig.measurements["holonomyDeg"] = sphereHolonomyOfLoop(loop).angle * 180.0 / std::numbers::pi;
    panel.title += ", arrow turned " + formatDeg(std::acos(std::clamp(v.dot(v0), -1.0, 1.0)));
    fig.panels.push_back(std::move(panel));
    return fig;
}

Figure loopPanelsFigure(double length, int panelSize) {
    if (!(length > 0.0)) throw GeometryError(ErrorKind::Precondition, "loop length must be positive");
    const std::vector<Command> ruld = {Command::translate(Axis::Right, length), Command::translate(Axis::Up, length),
                                       Command::translate(Axis::Right, -length), Command::translate(Axis::Up, -length)};
    const std::vector<Command> flbr = {Command::translate(Axis::Forward, length), Command::translate(Axis::Right, -length),
                                       Command::translate(Axis::Forward, -length), Command::translate(Axis::Right, length)};
    auto klein = [](int i, int j) {
        return [i, j](const CameraFrame& c) {
            const Vec4 x = c.position();
            return Vec2(x[i] / x[3], x[j] / x[3]);
        };
    };
    struct Spec {
        std::string name;
        std::string key;
        Space space;
        const std::vector<Command>* script;
        std::function<Vec2(const CameraFrame&)> proj;
        std::vector<int> axes;
    };
    const std::vector<Spec> specs = {
        {"H3: right, up, left, down", "ruldH3", Space::H3, &ruld, klein(0, 1), {0, 1}},
        {"H2xE: right, up, left, down", "ruldH2E", Space::H2E, &ruld,
         [](const CameraFrame& c) { const Vec4 x = c.position(); return Vec2(x[0] / x[3], x[2]); }, {0, 1}},
        {"H2xE: forward, left, back, right", "horizontalH2E", Space::H2E, &flbr, klein(0, 1), {0, 2}},
        {"E3: right, up, left, down", "ruldEuclidean", Space::Euclidean, &ruld,
         [](const CameraFrame& c) { const Vec4 x = c.position(); return Vec2(x[0], x[1]); }, {0, 1}},
    };
    Figure fig;
    fig.panelSize = panelSize;
    for (const Spec& s : specs) {
        const CameraFrame start = CameraFrame::start(s.space);
        Trace t = traceScript(start, *s.script, s.proj, s.axes);
        const WalkReport report = runScript(start, *s.script);
        Panel panel;
        panel.title = s.name + " -> " + report.classification.describe();
        panel.curves.push_back(std::move(t.path));
        panel.arrows = std::move(t.arrows);
        panel.dots.push_back(s.proj(start));
        fitWindow(panel);
        fig.measurements[s.key + "AngleDeg"] = report.classification.angle * 180.0 / std::numbers::pi;
        fig.measurements[s.key + "Rotation"] = report.classification.kind == MotionKind::Rotation ? 1.0 : 0.0;
        fig.panels.push_back(std::move(panel));
    }
    return fig;
}

Figure transportCycleFigure(int panelSize) {
    const double turn = 0.5 * std::numbers::pi;
    Figure fig;
    fig.panelSize = panelSize;

    auto walkPanel = [&](Space space, double step, int moves, std::function<Vec2(const CameraFrame&)> proj,
                         const std::string& title) {
        std::vector<Command> script;
        for (int i = 0; i < moves; ++i) {
            script.push_back(Command::rotate(Turn::Yaw, turn));
            script.push_back(Command::translate(Axis::Forward, step));
        }
        Trace t = traceScript(CameraFrame::start(space), script, proj, {2});
        Panel panel;
        panel.title = title;
        panel.curves.push_back(std::move(t.path));
        panel.arrows = std::move(t.arrows);
        return panel;
    };

    const WalkReport flat = squareWalk(1.0, turn, Space::Euclidean, 12);
    Panel p1 = walkPanel(Space::Euclidean, 1.0, flat.movesToClose.value_or(12),
                         [](const CameraFrame& c) { const Vec4 x = c.position(); return Vec2(x[0], x[2]); },
                         "flat room: closes after " + std::to_string(flat.movesToClose.value_or(-1)) + " moves");
    fitWindow(p1);
    fig.panels.push_back(std::move(p1));

    const double step = solveClosingStep(6, turn);
    const WalkReport curved = squareWalk(step, turn, Space::H2E, 12);
    Panel p2 = walkPanel(Space::H2E, step, curved.movesToClose.value_or(12),
                         [](const CameraFrame& c) {
                             const Vec4 x = c.position();
                             return projectToModel2d(MPoint::fromH2(Vec3(x[0], x[1], x[3])), Model::Poincare);
                         },
                         "hyperbolic plane: closes after " + std::to_string(curved.movesToClose.value_or(-1)) + " moves");
    p2.lower = Vec2(-1.05, -1.05);
    p2.upper = Vec2(1.05, 1.05);
    p2.unitCircle = true;
    fig.panels.push_back(std::move(p2));

    // The same six commands replayed in the physical room.
    std::vector<Command> six;
    for (int i = 0; i < curved.movesMade; ++i) {
        six.push_back(Command::rotate(Turn::Yaw, turn));
        six.push_back(Command::translate(Axis::Forward, step));
    }
    Panel p3;
    p3.title = "room grid: ends " + std::to_string(curved.physicalSquaresAway) + " squares away";
    Curve grid{{}, kInk, "path"};
    grid.points.push_back(Vec2::Zero());
    std::vector<Command> prefix;
    for (const Command& c : six) {
        prefix.push_back(c);
        if (c.kind == Command::Kind::Translate) grid.points.push_back(gridReplay(prefix).cast<double>());
    }
    p3.dots = grid.points;
    p3.arrows.push_back({Vec2::Zero(), grid.points.back(), kRed});  // start to end of the replay
    p3.curves.push_back(std::move(grid));
    fitWindow(p3, 0.6);
    fig.panels.push_back(std::move(p3));

    fig.measurements["movesEuclidean"] = flat.movesToClose.value_or(-1);
    fig.measurements["movesHyperbolic"] = curved.movesToClose.value_or(-1);
    fig.measurements["step"] = step;
    fig.measurements["gridSquaresAway"] = curved.physicalSquaresAway;
    return fig;
}

Figure makeFigure(FigureKind kind, std::optional<Model> model, int panelSize) {
    switch (kind) {
        case FigureKind::Models2d: {
            Models2dParams params;
            if (model) params.models = {*model};
            return models2dFigure(params, panelSize);
        }
        case FigureKind::SphereTransport: return sphereTransportFigure(panelSize);
        case FigureKind::LoopPanels: return loopPanelsFigure(0.5, panelSize);
        case FigureKind::TransportCycle: return transportCycleFigure(panelSize);
    }
    return {};
}

// --- Output ---------------------------------------------------------------------------

Image rasterize(const Figure& fig) {
    Image img(fig.width(), fig.height(), {255, 255, 255});
    for (std::size_t i = 0; i < fig.panels.size(); ++i) {
        const Panel& p = fig.panels[i];
        const double x0 = fig.margin + static_cast<double>(i) * (fig.panelSize + fig.margin);
        const Rect clip{x0, static_cast<double>(fig.margin), x0 + fig.panelSize, static_cast<double>(fig.margin + fig.panelSize)};
        const Vec2 c00(clip.x0, clip.y0), c10(clip.x1 - 0.5, clip.y0), c11(clip.x1 - 0.5, clip.y1 - 0.5), c01(clip.x0, clip.y1 - 0.5);
        for (const auto& [a, b] : {std::pair{c00, c10}, std::pair{c10, c11}, std::pair{c11, c01}, std::pair{c01, c00}}) {
            drawSegment(img, a, b, clip, kGrey);
        }
        if (p.unitCircle) {
            for (int k = 0; k < 720; ++k) {
                const double t0 = 2.0 * std::numbers::pi * k / 720;
                const double t1 = 2.0 * std::numbers::pi * (k + 1) / 720;
                drawSegment(img, fig.toPixel(i, Vec2(std::cos(t0), std::sin(t0))),
                            fig.toPixel(i, Vec2(std::cos(t1), std::sin(t1))), clip, kGrey);
            }
        }
        if (p.baseline) {
            drawSegment(img, fig.toPixel(i, Vec2(p.lower[0], 0.0)), fig.toPixel(i, Vec2(p.upper[0], 0.0)), clip, kGrey);
        }
        for (const Curve& c : p.curves) {
            for (std::size_t k = 0; k + 1 < c.points.size(); ++k) {
                drawSegment(img, fig.toPixel(i, c.points[k]), fig.toPixel(i, c.points[k + 1]), clip, c.color);
            }
        }
        for (const Arrow& a : p.arrows) {
            for (const auto& [s, e] : arrowStrokes(fig.toPixel(i, a.tail), fig.toPixel(i, a.head))) {
                drawSegment(img, s, e, clip, a.color);
            }
        }
        for (const Vec2& d : p.dots) {
            const Vec2 c = fig.toPixel(i, d);
            for (int dy = -3; dy <= 3; ++dy) {
                for (int dx = -3; dx <= 3; ++dx) {
                    if (dx * dx + dy * dy > 9) continue;
                    const int x = static_cast<int>(std::floor(c[0])) + dx;
                    const int y = static_cast<int>(std::floor(c[1])) + dy;
                    if (x >= clip.x0 && x < clip.x1 && y >= clip.y0 && y < clip.y1) img.set(x, y, kInk);
                }
            }
        }
    }
    return img;
}

std::string toSvg(const Figure& fig) {
    std::ostringstream s;
    s.precision(6);
    auto rgb = [](Rgb c) {
        return "rgb(" + std::to_string(c.r) + "," + std::to_string(c.g) + "," + std::to_string(c.b) + ")";
    };
    const int titleBand = 24;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fig.width() << "\" height=\""
      << fig.height() + titleBand << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (std::size_t i = 0; i < fig.panels.size(); ++i) {
        const Panel& p = fig.panels[i];
        const double x0 = fig.margin + static_cast<double>(i) * (fig.panelSize + fig.margin);
        s << "<g>\n<clipPath id=\"c" << i << "\"><rect x=\"" << x0 << "\" y=\"" << fig.margin << "\" width=\""
          << fig.panelSize << "\" height=\"" << fig.panelSize << "\"/></clipPath>\n";
        s << "<rect x=\"" << x0 << "\" y=\"" << fig.margin << "\" width=\"" << fig.panelSize << "\" height=\""
          << fig.panelSize << "\" fill=\"none\" stroke=\"" << rgb(kGrey) << "\"/>\n";
        s << "<text x=\"" << x0 << "\" y=\"" << fig.height() + titleBand - 8 << "\" font-family=\"sans-serif\" font-size=\"13\">"
          << p.title << "</text>\n";
        s << "<g clip-path=\"url(#c" << i << ")\">\n";
        if (p.unitCircle) {
            const Vec2 c = fig.toPixel(i, Vec2::Zero());
            const double r = fig.toPixel(i, Vec2(1.0, 0.0))[0] - c[0];
            s << "<circle cx=\"" << c[0] << "\" cy=\"" << c[1] << "\" r=\"" << r << "\" fill=\"none\" stroke=\""
              << rgb(kGrey) << "\"/>\n";
        }
        if (p.baseline) {
            const Vec2 a = fig.toPixel(i, Vec2(p.lower[0], 0.0));
            const Vec2 b = fig.toPixel(i, Vec2(p.upper[0], 0.0));
            s << "<line x1=\"" << a[0] << "\" y1=\"" << a[1] << "\" x2=\"" << b[0] << "\" y2=\"" << b[1]
              << "\" stroke=\"" << rgb(kGrey) << "\"/>\n";
        }
        const double limit = 1e5;
        for (const Curve& c : p.curves) {
            s << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << rgb(c.color) << "\" points=\"";
            for (const Vec2& m : c.points) {
                const Vec2 q = fig.toPixel(i, m);
                if (!q.allFinite() || q.cwiseAbs().maxCoeff() > limit) continue;
                s << q[0] << ',' << q[1] << ' ';
            }
            s << "\"/>\n";
        }
        for (const Arrow& a : p.arrows) {
            for (const auto& [b, e] : arrowStrokes(fig.toPixel(i, a.tail), fig.toPixel(i, a.head))) {
                s << "<line x1=\"" << b[0] << "\" y1=\"" << b[1] << "\" x2=\"" << e[0] << "\" y2=\"" << e[1]
                  << "\" stroke=\"" << rgb(a.color) << "\" stroke-width=\"1.5\"/>\n";
            }
        }
        for (const Vec2& d : p.dots) {
            const Vec2 c = fig.toPixel(i, d);
            s << "<circle cx=\"" << c[0] << "\" cy=\"" << c[1] << "\" r=\"3\" fill=\"" << rgb(kInk) << "\"/>\n";
        }
        s << "</g>\n</g>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace hyperspace
