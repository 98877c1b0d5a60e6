// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "hyperspace/batch.hpp"
#include "hyperspace/geometry.hpp"
#include "hyperspace/perception.hpp"
#include "hyperspace/product_space.hpp"
#include "hyperspace/render.hpp"
#include "hyperspace/server.hpp"
#include "hyperspace/session.hpp"
#include "hyperspace/tiling.hpp"
#include "hyperspace/walkthrough.hpp"
#include "support.hpp"

using namespace hyperspace;
namespace beast = boost::beast;
namespace net = boost::asio;

namespace {

constexpr double kPi = std::numbers::pi;
const std::string kDir = HYPERSPACE_TEST_DIR;

using Clock = std::chrono::steady_clock;
double secondsSince(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Collects failed checks with a short note each.
class Checks {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) failures_.push_back(what);
    }
    void near(double got, double want, double tol, const std::string& what) {
        std::ostringstream s;
        s.precision(12);
        s << what << ": got " << got << ", want " << want << " +- " << tol;
        expect(std::abs(got - want) <= tol, s.str());
    }
    void less(double got, double bound, const std::string& what) {
        std::ostringstream s;
        s.precision(6);
        s << what << ": " << got << " not < " << bound;
        expect(got < bound, s.str());
    }
    bool ok() const { return failures_.empty(); }
    std::string summary() const {
        std::string out;
        for (const auto& f : failures_) out += (out.empty() ? "" : "; ") + f;
        return out;
    }

private:
    std::vector<std::string> failures_;
};

// --- Criteria ---------------------------------------------------------------------------

void sphericalHolonomy(Checks& c) {
    const std::vector<SpherePoint> loop = {SpherePoint::fromCoords({1, 0, 0}), SpherePoint::fromCoords({0, 1, 0}),
                                           SpherePoint::fromCoords({0, 0, 1}), SpherePoint::fromCoords({1, 0, 0})};
    const auto t0 = Clock::now();
    const SphereHolonomy h = sphereHolonomyOfLoop(loop);
    const double s = secondsSince(t0);
    c.near(h.angle, kPi / 2, 1e-9, "octant angle");
    c.less(s, 1e-3, "runtime s");
}

void gaussBonnet(Checks& c) {
    const auto tris = randomH2Triangles(1000, 2024);
    const auto t0 = Clock::now();
    const auto out = triangleHolonomies(tris);
    const double s = secondsSince(t0);
    double worst = 0.0;
    bool below = true;
    for (std::size_t i = 0; i < tris.size(); ++i) {
        const auto& t = tris[i];
        const double a = distance(t[1], t[2]), b = distance(t[0], t[2]), e = distance(t[0], t[1]);
        const double sum = oracle::lawOfCosinesAngle(a, b, e) + oracle::lawOfCosinesAngle(b, a, e) +
                           oracle::lawOfCosinesAngle(e, a, b);
        worst = std::max({worst, std::abs(std::abs(out[i].signedHolonomy) - (kPi - sum)),
                          std::abs(out[i].area - (kPi - sum)), std::abs(out[i].angleSum - sum)});
        below = below && sum < kPi && out[i].angleSum < kPi;
    }
    c.less(worst, 1e-8, "holonomy/defect/area mismatch");
    c.expect(below, "angle sum reached pi");
    c.less(s, 1.0, "runtime s");
}

std::vector<Command> ruld(double s) {
    return {Command::translate(Axis::Right, s), Command::translate(Axis::Up, s), Command::translate(Axis::Right, -s),
            Command::translate(Axis::Up, -s)};
}

void discrimination(Checks& c) {
    const WalkReport h3 = runScript(CameraFrame::start(Space::H3), ruld(0.5));
    const Mat4 byHand = oracle::boost(0, 0.5) * oracle::boost(1, 0.5) * oracle::boost(0, -0.5) * oracle::boost(1, -0.5);
    c.expect(h3.classification.kind == MotionKind::Rotation, "h3 RULD not a rotation");
    c.near(h3.classification.angle, oracle::ellipticAngle(byHand), 1e-9, "h3 RULD angle");

    const WalkReport h2e = runScript(CameraFrame::start(Space::H2E), ruld(0.5));
    c.expect(h2e.classification.kind == MotionKind::Identity, "h2e RULD not identity");
    c.less(h2e.closureResidual, 1e-9, "h2e RULD residual");

    const WalkReport flat = runScript(CameraFrame::start(Space::H2E),
                                      {Command::translate(Axis::Forward, 0.5), Command::translate(Axis::Right, -0.5),
                                       Command::translate(Axis::Forward, -0.5), Command::translate(Axis::Right, 0.5)});
    c.expect(flat.classification.kind == MotionKind::Rotation, "h2e horizontal loop not a rotation");
    c.expect(flat.classification.angle > 1e-3, "h2e horizontal angle too small");

    const WalkReport e3 = runScript(CameraFrame::start(Space::Euclidean), ruld(0.5));
    c.expect(e3.classification.kind == MotionKind::Identity, "euclidean RULD not identity");
    c.less(e3.closureResidual, 1e-9, "euclidean RULD residual");
}

void squareWalks(Checks& c) {
    const WalkReport e = squareWalk(1.0, kPi / 2, Space::Euclidean, 12);
    c.expect(e.movesToClose == 4, "euclidean walk does not close in 4");
    const double step = solveClosingStep(6, kPi / 2);
    c.near(step, 2 * std::acosh(std::sqrt(1.5)), 1e-9, "closing step");
    const WalkReport h = squareWalk(step, kPi / 2, Space::H2E, 12);
    c.expect(h.movesToClose == 6, "hyperbolic walk does not close in 6");
    c.less(h.closureResidual, 1e-6, "closure residual");
    c.expect(h.physicalSquaresAway == 2, "grid replay not two squares away");
}

void commutation(Checks& c) {
    double worst = 0.0;
    for (double t : {0.3, 0.5, 1.7}) {
        for (double z : {-2.0, 0.5, 3.0}) {
            const auto h = ProductIsometry::horizontal(h2Rotation(0.7 * t) * h2Translation(Vec2(0.6, 0.8), t));
            const auto v = ProductIsometry::vertical(z);
            worst = std::max(worst, (commutator(h, v).value.toMatrix4() - Mat4::Identity()).cwiseAbs().maxCoeff());
        }
    }
    c.less(worst, 1e-12, "product commutator defect");
    const Commutator k = commutator(translationAtOrigin(Vec3(1, 0, 0), 0.5), translationAtOrigin(Vec3(0, 1, 0), 0.5));
    c.expect(k.type.kind == MotionKind::Rotation, "h3 commutator not a rotation");
    c.expect(k.type.angle > 1e-3, "h3 commutator angle too small");
}

void modelProjections(Checks& c) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto randomPoint = [&](double r) {
        const Vec3 d = Vec3(u(rng), u(rng), u(rng)).normalized();
        return translationAtOrigin(d, r * std::abs(u(rng))).apply(MPoint::origin());
    };
    double klein = 0.0, conformal = 0.0, fit = 0.0, orthogonal = 0.0;
    for (int i = 0; i < 50; ++i) {
        const MPoint p = randomPoint(2.0);
        const MTangent v = MTangent::normalizedAt(p, Vec4(u(rng), u(rng), u(rng), 0));
        std::vector<Vec3> pts;
        for (int k = -20; k <= 20; ++k) pts.push_back(projectToModel(geodesicPoint(p, v, 0.2 * k), Model::Klein));
        const Vec3 d = (pts.back() - pts.front()).normalized();
        for (const Vec3& q : pts) klein = std::max(klein, (q - pts.front()).cross(d).norm());

        const MPoint q = randomPoint(1.5);
        const Isometry frame = translationAlong(MPoint::origin(), q);
        Mat3 jac;
        const double h = 1e-5;
        for (int k = 0; k < 3; ++k) {
            const MTangent e = MTangent::normalizedAt(q, frame.apply(Vec4::Unit(k)));
            jac.col(k) = (projectToModel(geodesicPoint(q, e, h), Model::Poincare) -
                          projectToModel(geodesicPoint(q, e, -h), Model::Poincare)) / (2 * h);
        }
        const Mat3 g = jac.transpose() * jac;
        conformal = std::max(conformal, (g / (g.trace() / 3.0) - Mat3::Identity()).cwiseAbs().maxCoeff());

        const double a = u(rng) * kPi, r = 0.2 + std::abs(u(rng));
        const MPoint base = MPoint::fromH2(Vec3(std::cos(a) * std::sinh(r), std::sin(a) * std::sinh(r), std::cosh(r)));
        const MTangent w = MTangent::normalizedAt(base, Vec4(u(rng), u(rng), 0, 0));
        std::vector<Eigen::Vector2d> arc;
        for (int k = -30; k <= 30; ++k) arc.push_back(projectToModel2d(geodesicPoint(base, w, 0.15 * k), Model::Poincare));
        if (oracle::collinearityResidual(arc) < 1e-6) continue;
        const oracle::Circle circle = oracle::fitCircle(arc);
        fit = std::max(fit, circle.residual);
        orthogonal = std::max(orthogonal, std::abs(circle.centre.squaredNorm() - 1.0 - circle.radius * circle.radius) /
                                              std::max(1.0, circle.radius * circle.radius));
    }
    c.less(klein, 1e-9, "klein collinearity");
    c.less(conformal, 1e-6, "poincare conformality");
    c.less(fit, 1e-6, "poincare arc fit");
    c.less(orthogonal, 1e-6, "poincare arc orthogonality");
}

void vergence(Checks& c) {
    EyeConfig eye;
    eye.ipd = 0.06221;
    bool exceeds = true;
    for (double d : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e4}) {
        exceeds = exceeds && vergenceAngle(eye, d, Space::H3) > vergenceAngle(eye, d, Space::Euclidean);
    }
    c.expect(exceeds, "h3 vergence not above euclidean");
    c.near(vergenceAngle(eye, 1e9, Space::H3), std::atan(std::sinh(0.06221 / 2)), 1e-9, "far limit");
}

void floorDrop(Checks& c) {
    double worst = 0.0;
    for (double h : {0.1, 0.5}) {
        for (double t : {1.0, 2.0, 3.0}) {
            worst = std::max(worst, std::abs(floorDropDistance(h, t) - oracle::floorDistanceBruteForce(h, t)));
            worst = std::max(worst, std::abs(std::sinh(floorDropDistance(h, t)) - std::sinh(h) * std::cosh(t)) / std::cosh(t));
        }
    }
    c.less(worst, 1e-4, "floor distance vs brute force");
    bool increasing = true;
    for (double h : {0.1, 0.5}) {
        for (double t = 0.05; t <= 3.0; t += 0.05) increasing = increasing && floorDropDistance(h, t) > floorDropDistance(h, t - 0.05);
    }
    c.expect(increasing, "floor distance not strictly increasing");
}

void tilingDichotomy(Checks& c) {
    c.expect(generateCells(SchlafliSymbol::parse("4,3,4"), 1).cells.size() == 7, "{4,3,4} radius 1 != 7");
    const TilingGraph flat = generateCells(SchlafliSymbol::parse("4,3,4"), 4);
    std::size_t total = 0;
    for (int r = 0; r <= 4; ++r) {
        total += static_cast<std::size_t>(flat.shellSizes[static_cast<std::size_t>(r)]);
        std::size_t lattice = 0;
        for (int x = -r; x <= r; ++x) {
            for (int y = -r; y <= r; ++y) {
                for (int z = -r; z <= r; ++z) lattice += std::abs(x) + std::abs(y) + std::abs(z) <= r;
            }
        }
        c.expect(total == lattice, "{4,3,4} count differs from lattice at radius " + std::to_string(r));
    }
    const TilingGraph hyp = generateCells(SchlafliSymbol::parse("4,3,6"), 6);
    for (int s = 3; s <= 6; ++s) {
        const double ratio = static_cast<double>(hyp.shellSizes[static_cast<std::size_t>(s)]) /
                             hyp.shellSizes[static_cast<std::size_t>(s - 1)];
        c.expect(ratio > 1.5, "{4,3,6} shell ratio " + std::to_string(ratio) + " at shell " + std::to_string(s));
    }
    const auto r = mirrorsFromGram(gramMatrix(SchlafliSymbol::parse("4,3,6"))).reflections();
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(4, 4);
    for (int k = 0; k < 6; ++k) p = p * (r[2] * r[3]);
    c.less((p - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-7, "(R3 R4)^6 defect");
    const auto t1 = Clock::now();
    const TilingGraph five = generateCells(SchlafliSymbol::parse("4,3,6"), 5);
    c.less(secondsSince(t1), 10.0, "depth 5 runtime s");
    c.expect(!five.truncated, "depth 5 truncated");
}

std::string readBytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void renderer(Checks& c) {
    for (const auto& name : oracle::fixtureNames()) {
        const oracle::Fixture f = oracle::loadFixture(kDir, name);
        const std::string bytes = encodePpm(renderFrame(f.scene, f.camera, f.fovY, f.width, f.height));
        c.expect(bytes == readBytes(kDir + "/golden/" + name + ".ppm"), "golden " + name + " differs");
    }
    for (const std::string name : {"h3_room", "euclid_grid"}) {
        oracle::Fixture f = oracle::loadFixture(kDir, name);
        f.scene.portal = false;
        const Image before = renderFrame(f.scene, f.camera, f.fovY, f.width, f.height);
        Mat4 w = f.scene.space == Space::H3 ? Mat4(oracle::boost(0, 0.7) * oracle::rotation(0, 2, 0.4) * oracle::boost(1, -0.3))
                                            : Mat4(oracle::rotation(0, 2, 0.4));
        if (f.scene.space == Space::Euclidean) w.col(3) = Vec4(1.25, -0.5, 2.0, 1.0);
        f.scene.worldTransform = w;
        const Image after = renderFrame(f.scene, CameraFrame::fromPose(f.scene.space, w * f.camera.pose()), f.fovY,
                                        f.width, f.height);
        c.expect(before == after, "equivariance " + name);
    }
    const oracle::Fixture m = oracle::loadFixture(kDir, "h3_marker");
    EyeConfig eye;
    eye.worldScale = 10;
    const auto disparity = [&](StereoMode mode) {
        const auto [l, r] = renderStereo(m.scene, m.camera, eye, mode, m.fovY, m.width, m.height);
        return oracle::markerCentroidX(l, m.scene.background) - oracle::markerCentroidX(r, m.scene.background);
    };
    const double in = disparity(StereoMode::InSpace), model = disparity(StereoMode::ModelSpace);
    std::ostringstream s;
    s << "disparity inSpace " << in << " <= modelSpace " << model;
    c.expect(in > model && model > 0.0, s.str());
}

class Client {
public:
    explicit Client(unsigned short port) : ws_(ioc_) {
        net::ip::tcp::resolver resolver(ioc_);
        net::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
        ws_.next_layer().set_option(net::ip::tcp::no_delay(true));
        ws_.handshake("127.0.0.1", "/");
        ws_.text(true);
    }
    std::string call(const std::string& text) {
        ws_.write(net::buffer(text));
        beast::flat_buffer buf;
        ws_.read(buf);
        return beast::buffers_to_string(buf.data());
    }

private:
    net::io_context ioc_;
    beast::websocket::stream<net::ip::tcp::socket> ws_;
};

std::string tickText(int client, int i) {
    const double a = 0.37 * i + client;
    return nlohmann::json({{"type", "input"},
                           {"dt", 0.05},
                           {"move", {std::sin(a), 0.2 * std::cos(2 * a), std::cos(a)}},
                           {"yaw", 0.05 * std::sin(3 * a)},
                           {"pitch", 0.02 * std::cos(5 * a)}})
        .dump();
}

std::string helloText(const char* space) {
    return nlohmann::json({{"type", "hello"}, {"space", space}, {"depth", 2}}).dump();
}

void protocol(Checks& c) {
    Server server(ServerConfig{});
    server.start();
    {
        for (const char* space : {"h3", "h2e", "euclidean"}) {
            Client client(server.port());
            int bad = 0;
            std::string first;
            for (int i = -1; i < 1000; ++i) {
                const auto j = nlohmann::json::parse(client.call(i < 0 ? helloText(space) : tickText(0, i)));
                std::string problem = oracle::validateFrame(j);
                if (problem.empty()) {
                    for (const auto& cell : j["cells"]) {
                        if (oracle::isometryDefect(space, oracle::cellMatrix(cell)) > 1e-6) problem = "cell not an isometry";
                    }
                }
                if (!problem.empty()) {
                    if (bad++ == 0) first = problem;
                }
            }
            c.expect(bad == 0, std::string(space) + ": " + std::to_string(bad) + " invalid frames (" + first + ")");
        }

        const char* spaces[4] = {"h3", "h2e", "euclidean", "h3"};
        std::vector<std::unique_ptr<Client>> clients;
        for (int k = 0; k < 4; ++k) clients.push_back(std::make_unique<Client>(server.port()));
        std::vector<std::vector<std::string>> got(4);
        for (int k = 0; k < 4; ++k) got[k].push_back(clients[k]->call(helloText(spaces[k])));
        for (int i = 0; i < 200; ++i) {
            for (int k = 0; k < 4; ++k) got[k].push_back(clients[k]->call(tickText(k, i)));
        }
        for (int k = 0; k < 4; ++k) {
            Session reference(SessionConfig{}, std::make_shared<TilingCache>());
            std::vector<std::string> want{reference.handle(helloText(spaces[k])).text};
            for (int i = 0; i < 200; ++i) want.push_back(reference.handle(tickText(k, i)).text);
            c.expect(got[k] == want, "interleaved client " + std::to_string(k) + " differs from its serial run");
        }
    }
    server.stop();
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Checks&)>>> criteria = {
        {"spherical holonomy: octant angle pi/2 within 1e-9, runtime < 1 ms", sphericalHolonomy},
        {"gauss-bonnet: 1000 triangles, |holonomy| = pi - sum = area within 1e-8, sum < pi, runtime < 1 s", gaussBonnet},
        {"discrimination: RULD(0.5) h3 rotation, h2e identity; horizontal h2e rotation; euclidean identity", discrimination},
        {"square walk: euclidean 4, hyperbolic 6 at 2 acosh(sqrt(3/2)) within 1e-9, residual < 1e-6, 2 squares", squareWalks},
        {"commutation: product commutator identity within 1e-12; h3 commutator rotation angle > 1e-3", commutation},
        {"model projections: klein < 1e-9, poincare conformal 1e-6, arcs fit < 1e-6 and orthogonal", modelProjections},
        {"vergence: h3 > euclidean at every d; far limit atan(sinh(ipd/2)) within 1e-9 at ipd 0.06221", vergence},
        {"floor drop: brute-force plane distance within 1e-4 at h {0.1,0.5}, t {1,2,3}; strictly increasing", floorDrop},
        {"tiling: {4,3,4} r1 = 7, lattice through r4; {4,3,6} shell ratio > 1.5; (R3R4)^6 within 1e-7; depth 5 < 10 s", tilingDichotomy},
        {"renderer: 6 byte-identical goldens; equivariance pixel identity; inSpace disparity > modelSpace", renderer},
        {"protocol: schema on 1000 ticks per space; 4 interleaved clients match serial sessions", protocol},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Checks c;
        try {
            run(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("threw: ") + e.what());
        }
        std::printf("%s  %s%s%s\n", c.ok() ? "PASS" : "FAIL", name.c_str(), c.ok() ? "" : "  -- ", c.summary().c_str());
        failed += !c.ok();
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
