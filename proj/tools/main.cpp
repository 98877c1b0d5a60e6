// hyperspace: figures, tilings, walk experiments, renders and the session server.

#include <csignal>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hyperspace/figures.hpp"
#include "hyperspace/perception.hpp"
#include "hyperspace/render.hpp"
#include "hyperspace/server.hpp"
#include "hyperspace/tiling.hpp"
#include "hyperspace/walkthrough.hpp"

using namespace hyperspace;

namespace {

constexpr int kExitComputation = 1;
constexpr int kExitUsage = 2;

std::string readFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GeometryError(ErrorKind::Parse, "cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string vecStr(const Vec4& v) {
    std::ostringstream s;
    s.precision(10);
    s << v[0] << ',' << v[1] << ',' << v[2] << ',' << v[3];
    return s.str();
}

void printReport(const WalkReport& r) {
    std::cout << "classification=" << r.classification.describe() << '\n'
              << "kind=" << toString(r.classification.kind) << '\n'
              << "angle=" << r.classification.angle << '\n'
              << "closed=" << (r.closed ? "true" : "false") << '\n'
              << "movesMade=" << r.movesMade << '\n'
              << "movesToClose=" << (r.movesToClose ? std::to_string(*r.movesToClose) : "none") << '\n'
              << "closureResidual=" << r.closureResidual << '\n'
              << "physicalEndpoint=" << r.physicalEndpoint[0] << ',' << r.physicalEndpoint[1] << '\n'
              << "physicalSquaresAway=" << r.physicalSquaresAway << '\n'
              << "finalPosition=" << vecStr(r.finalFrame.position()) << '\n';
}

// Scans argv for --config and applies its values as option defaults, so
// flags given on the command line still win. Keys at the top level apply to
// every subcommand that has the option; an object under a subcommand name
// applies to that subcommand only.
void applyConfig(CLI::App& app, int argc, char** argv) {
    std::string path;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) path = argv[i + 1];
        if (a.rfind("--config=", 0) == 0) path = a.substr(9);
    }
    if (path.empty()) return;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(readFile(path));
    } catch (const nlohmann::json::exception& e) {
        throw GeometryError(ErrorKind::Parse, path + ": " + e.what());
    }
    if (!j.is_object()) throw GeometryError(ErrorKind::Parse, path + ": config must be a JSON object");
    auto asText = [](const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
    auto setDefault = [&](CLI::App* sub, const std::string& key, const nlohmann::json& v) {
        CLI::Option* opt = nullptr;
        try {
            opt = sub->get_option("--" + key);
        } catch (const CLI::OptionNotFound&) {
            return false;
        }
        opt->default_val(asText(v));
        return true;
    };
    for (auto& [key, value] : j.items()) {
        if (CLI::App* sub = [&]() -> CLI::App* {
                try {
                    return app.get_subcommand(key);
                } catch (const CLI::OptionNotFound&) {
                    return nullptr;
                }
            }();
            sub && value.is_object()) {
            for (auto& [k, v] : value.items()) {
                if (!setDefault(sub, k, v)) throw GeometryError(ErrorKind::Parse, "config: unknown option " + key + "." + k);
            }
            continue;
        }
        bool used = false;
        for (CLI::App* sub : app.get_subcommands([](CLI::App*) { return true; })) used |= setDefault(sub, key, value);
        if (!used) throw GeometryError(ErrorKind::Parse, "config: unknown option " + key);
    }
}

Server* gServer = nullptr;
void onSignal(int) {
    if (gServer) std::thread([] { gServer->stop(); }).detach();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hyperbolic geometry engine: figures, tilings, walks, renders and the explorer server"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string configPath;
    app.add_option("--config", configPath, "JSON file of option defaults (flags win)");

    // figure
    auto* figure = app.add_subcommand("figure", "Draw a 2-D figure");
    std::string figureKind;
    std::string figureModel;
    std::string figureOut;
    int figureSize = 400;
    figure->add_option("kind", figureKind, "models2d | sphereTransport | loopPanels | transportCycle")->required();
    figure->add_option("--model", figureModel, "klein | poincare | halfplane (models2d only; default all)");
    figure->add_option("--size", figureSize, "panel size in pixels")->check(CLI::Range(50, 4000));
    figure->add_option("-o,--output", figureOut, "output .png, .ppm or .svg")->required();

    // tiling
    auto* tiling = app.add_subcommand("tiling", "Generate a tiling or honeycomb");
    std::string schlafli;
    int depth = 3;
    int maxCells = 200000;
    bool stats = false;
    std::string exportPath;
    tiling->add_option("--schlafli", schlafli, "e.g. 4,3,6")->required();
    tiling->add_option("--depth", depth, "maximum word length")->check(CLI::NonNegativeNumber);
    tiling->add_option("--max-cells", maxCells, "cell budget")->check(CLI::PositiveNumber);
    tiling->add_flag("--stats", stats, "print counts");
    tiling->add_option("--export", exportPath, "write tiling JSON");

    // walk
    auto* walk = app.add_subcommand("walk", "Run a command script and report the net motion");
    std::string walkSpace = "h3";
    std::string scriptPath;
    walk->add_option("--space", walkSpace, "h3 | h2e | euclidean");
    walk->add_option("--script", scriptPath, "one command per line: T right 0.5, R yaw 1.5708")->required();

    // square-walk
    auto* square = app.add_subcommand("square-walk", "Repeat [turn, step] until the walk closes");
    std::string squareSpace = "h2e";
    double step = 1.0;
    double turnDeg = 90.0;
    int maxMoves = 12;
    int targetMoves = 6;
    bool solve = false;
    square->add_option("--space", squareSpace, "h3 | h2e | euclidean");
    square->add_option("--step", step, "step length")->check(CLI::PositiveNumber);
    square->add_option("--turn", turnDeg, "left turn before each step, degrees");
    square->add_option("--max-moves", maxMoves)->check(CLI::PositiveNumber);
    square->add_flag("--solve-step", solve, "bisect for the step that closes after --moves moves");
    square->add_option("--moves", targetMoves, "moves to close for --solve-step")->check(CLI::Range(3, 1000));

    // vergence
    auto* vergence = app.add_subcommand("vergence", "Eye vergence for a target straight ahead");
    double ipdMm = 62.0;
    double distance = 1.0;
    double worldScale = 1.0;
    std::string vergenceSpace = "h3";
    vergence->add_option("--ipd", ipdMm, "interpupillary distance, millimetres");
    vergence->add_option("--distance", distance, "target distance, metres")->check(CLI::PositiveNumber);
    vergence->add_option("--world-scale", worldScale, "model units per metre");
    vergence->add_option("--space", vergenceSpace, "h3 | h2e | euclidean");

    // floor-drop
    auto* floor = app.add_subcommand("floor-drop", "Distance to the floor after walking t");
    double height = 0.5;
    double t = 1.0;
    floor->add_option("--height", height, "eye height")->check(CLI::NonNegativeNumber);
    floor->add_option("--t", t, "distance walked");

    // render
    auto* render = app.add_subcommand("render", "Render a scene");
    std::string scenePath;
    std::string cameraText = "0,0,0,0,0";
    std::string renderOut;
    int width = 640;
    int heightPx = 480;
    double fovDeg = 70.0;
    bool stereo = false;
    std::string mode = "inSpace";
    double renderIpdMm = 62.0;
    double renderScale = 1.0;
    bool serial = false;
    render->add_option("--scene", scenePath, "scene JSON")->required();
    render->add_option("--camera", cameraText, "right,up,forward offset then yaw,pitch in radians");
    render->add_option("-o,--output", renderOut, "output .png or .ppm")->required();
    render->add_option("--width", width)->check(CLI::Range(1, 16384));
    render->add_option("--height", heightPx)->check(CLI::Range(1, 16384));
    render->add_option("--fov", fovDeg, "vertical field of view, degrees")->check(CLI::Range(1.0, 179.0));
    render->add_flag("--stereo", stereo, "side-by-side left/right pair");
    render->add_option("--mode", mode, "inSpace | modelSpace");
    render->add_option("--ipd", renderIpdMm, "interpupillary distance, millimetres");
    render->add_option("--world-scale", renderScale, "model units per metre");
    render->add_flag("--serial", serial, "use the single-threaded reference rasterizer");

    // serve
    auto* serve = app.add_subcommand("serve", "WebSocket session server for the explorer");
    int port = 8080;
    std::string address = "127.0.0.1";
    std::string serveSpace = "h3";
    int serveDepth = 4;
    int serveMaxDepth = 6;
    std::string staticRoot;
    double moveSpeed = 1.0;
    double rotationSpeed = 1.5;
    serve->add_option("--port", port)->check(CLI::Range(0, 65535));
    serve->add_option("--address", address);
    serve->add_option("--space", serveSpace, "default space for hellos without one");
    serve->add_option("--depth", serveDepth, "default tiling depth")->check(CLI::NonNegativeNumber);
    serve->add_option("--max-depth", serveMaxDepth, "largest depth a client may request")->check(CLI::NonNegativeNumber);
    serve->add_option("--static", staticRoot, "directory served over plain HTTP");
    serve->add_option("--move-speed", moveSpeed, "model units per second")->check(CLI::PositiveNumber);
    serve->add_option("--rotation-speed", rotationSpeed, "rad/s")->check(CLI::PositiveNumber);

    try {
        applyConfig(app, argc, argv);
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*figure) {
            std::optional<Model> model;
            if (!figureModel.empty()) model = parseModel(figureModel);
            const Figure fig = makeFigure(parseFigureKind(figureKind), model, figureSize);
            if (figureOut.size() > 4 && figureOut.substr(figureOut.size() - 4) == ".svg") {
                std::ofstream out(figureOut);
                out << toSvg(fig);
                if (!out) throw GeometryError(ErrorKind::Precondition, "cannot write " + figureOut);
            } else {
                writeImage(rasterize(fig), figureOut);
            }
            for (const auto& [k, v] : fig.measurements) std::cout << k << '=' << v << '\n';
            std::cout << "wrote " << figureOut << '\n';
        } else if (*tiling) {
            const TilingGraph g = generateCells(SchlafliSymbol::parse(schlafli), depth, maxCells);
            if (stats || exportPath.empty()) {
                std::cout << "schlafli=" << g.symbol.str() << '\n'
                          << "geometry=" << toString(g.geometry()) << '\n'
                          << "cellCount=" << g.cells.size() << '\n'
                          << "truncated=" << (g.truncated ? "true" : "false") << '\n'
                          << "inradius=" << g.cell.inradius << '\n'
                          << "shells=";
                for (std::size_t i = 0; i < g.shellSizes.size(); ++i) std::cout << (i ? "," : "") << g.shellSizes[i];
                std::cout << '\n';
            }
            if (!exportPath.empty()) {
                std::ofstream out(exportPath);
                out << toJson(g).dump() << '\n';
                if (!out) throw GeometryError(ErrorKind::Precondition, "cannot write " + exportPath);
            }
        } else if (*walk) {
            const Space space = parseSpace(walkSpace);
            printReport(runScript(CameraFrame::start(space), parseScript(readFile(scriptPath))));
        } else if (*square) {
            const Space space = parseSpace(squareSpace);
            const double turn = turnDeg * std::numbers::pi / 180.0;
            if (solve) {
                if (space == Space::Euclidean) {
                    throw GeometryError(ErrorKind::Precondition, "every step closes in Euclidean space; nothing to solve");
                }
                step = solveClosingStep(targetMoves, turn);
            }
            std::cout.precision(12);
            std::cout << "step=" << step << '\n';
            printReport(squareWalk(step, turn, space, maxMoves));
        } else if (*vergence) {
            EyeConfig eye;
            eye.ipd = ipdMm / 1000.0;
            eye.worldScale = worldScale;
            eye.validate();
            if (eye.unusualIpd()) std::cerr << "warning: ipd " << ipdMm << " mm is outside 40-80 mm\n";
            const Space space = parseSpace(vergenceSpace);
            const double v = vergenceAngle(eye, distance, space);
            std::cout.precision(10);
            std::cout << "vergence=" << v << '\n'
                      << "vergenceDeg=" << v * 180.0 / std::numbers::pi << '\n'
                      << "euclidean=" << vergenceAngle(eye, distance, Space::Euclidean) << '\n';
            if (space != Space::Euclidean) std::cout << "limit=" << vergenceLimit(eye) << '\n';
        } else if (*floor) {
            const double d = floorDropDistance(height, t);
            std::cout.precision(10);
            std::cout << "distance=" << d << '\n' << "extra=" << d - height << '\n';
        } else if (*render) {
            const Scene scene = loadScene(scenePath);
            std::vector<double> c;
            std::stringstream ss(cameraText);
            for (std::string part; std::getline(ss, part, ',');) {
                try {
                    c.push_back(std::stod(part));
                } catch (const std::exception&) {
                    throw GeometryError(ErrorKind::Parse, "--camera needs five numbers");
                }
            }
            if (c.size() != 5) throw GeometryError(ErrorKind::Parse, "--camera needs five numbers");
            const CameraFrame camera = CameraFrame::placed(scene.space, Vec3(c[0], c[1], c[2]), c[3], c[4]);
            const double fov = fovDeg * std::numbers::pi / 180.0;
            RenderStats rs;
            if (stereo) {
                EyeConfig eye;
                eye.ipd = renderIpdMm / 1000.0;
                eye.worldScale = renderScale;
                const auto [l, r] = renderStereo(scene, camera, eye, parseStereoMode(mode), fov, width, heightPx,
                                                 RenderOptions{serial});
                writeImage(sideBySide(l, r), renderOut);
            } else {
                writeImage(renderFrame(scene, camera, fov, width, heightPx, RenderOptions{serial}, &rs), renderOut);
                std::cout << "cells=" << rs.cells << '\n' << "triangles=" << rs.triangles << '\n';
                if (rs.truncated) std::cerr << "warning: tiling hit its cell budget\n";
            }
            std::cout << "wrote " << renderOut << '\n';
        } else if (*serve) {
            ServerConfig cfg;
            cfg.address = address;
            cfg.port = static_cast<unsigned short>(port);
            cfg.staticRoot = staticRoot;
            cfg.session.defaultSpace = parseSpace(serveSpace);
            cfg.session.defaultDepth = serveDepth;
            cfg.session.maxDepth = std::max(serveMaxDepth, serveDepth);
            cfg.session.moveSpeed = moveSpeed;
            cfg.session.rotationSpeed = rotationSpeed;
            Server server(cfg);
            server.start();
            gServer = &server;
            std::signal(SIGINT, onSignal);
            std::signal(SIGTERM, onSignal);
            std::cout << "listening on ws://" << address << ':' << server.port() << '/' << std::endl;
            server.wait();
            gServer = nullptr;
        }
    } catch (const GeometryError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::Parse ? kExitUsage : kExitComputation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitComputation;
    }
    return 0;
}
