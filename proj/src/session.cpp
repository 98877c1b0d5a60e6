#include "hyperspace/session.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

namespace hyperspace {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;
constexpr double kLoopArm = 0.3;
constexpr double kLoopClose = 0.15;

Mat3 block013(const Mat4& m) {
    Mat3 h;
    const int idx[3] = {0, 1, 3};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) h(i, j) = m(idx[i], idx[j]);
    }
    return h;
}

Mat4 affineInverse(const Mat4& m) {
    Mat4 out = Mat4::Identity();
    const Mat3 rt = m.topLeftCorner<3, 3>().transpose();
    out.topLeftCorner<3, 3>() = rt;
    out.block<3, 1>(0, 3) = -rt * m.block<3, 1>(0, 3);
    return out;
}

void appendMatrix(std::string& out, const Mat4& m) {
    out += '[';
    for (int k = 0; k < 16; ++k) {
        if (k) out += ',';
        out += formatNumber(m(k % 4, k / 4));
    }
    out += ']';
}

double number(const nlohmann::json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    const auto& v = j[key];
    if (!v.is_number()) throw GeometryError(ErrorKind::Parse, std::string("`") + key + "` must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw GeometryError(ErrorKind::Parse, std::string("`") + key + "` must be finite");
    return x;
}

}  // namespace

std::string formatNumber(double value) {
    char buf[32];
    if (value == 0.0) value = 0.0;  // no "-0"
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 9);
    return std::string(buf, res.ptr);
}

std::string errorMessage(const std::string& message) {
    return nlohmann::json{{"type", "error"}, {"message", message}}.dump();
}

std::shared_ptr<const TilingGraph> TilingCache::get(Space space, const SchlafliSymbol& symbol, int depth, int maxCells) {
    const auto key = std::make_pair(std::string(toString(space)) + ":" + symbol.str(), depth);
    std::lock_guard lock(mutex_);
    if (auto it = tilings_.find(key); it != tilings_.end()) return it->second;
    Scene scene;
    scene.space = space;
    scene.schlafli = symbol;
    scene.tilingDepth = depth;
    scene.maxCells = maxCells;
    buildTiling(scene);
    tilings_[key] = scene.tiling;
    return scene.tiling;
}

std::size_t TilingCache::size() const {
    std::lock_guard lock(mutex_);
    return tilings_.size();
}

std::optional<double> distanceToWall(const TilingGraph& tiling, const CameraFrame& camera) {
    auto outside = [&](double t) {
        Vec4 p = camera.translated(Vec3::UnitZ(), t).position();
        if (camera.space() == Space::H2E) p[2] = 0.0;
        for (int f = 0; f < tiling.faceCount(); ++f) {
            if (tiling.faceExcess(f, p) > 0.0) return true;
        }
        return false;
    };
    if (outside(0.0)) return 0.0;
    constexpr double kStep = 0.05;
    constexpr double kReach = 30.0;
    double lo = 0.0;
    double hi = -1.0;
    for (double t = kStep; t <= kReach; t += kStep) {
        if (outside(t)) {
            hi = t;
            break;
        }
        lo = t;
    }
    if (hi < 0.0) return std::nullopt;
    for (int i = 0; i < 50; ++i) {
        const double mid = 0.5 * (lo + hi);
        (outside(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

Session::Session(SessionConfig config, std::shared_ptr<TilingCache> cache)
    : config_(config), cache_(cache ? std::move(cache) : std::make_shared<TilingCache>()) {}

Session::Reply Session::handle(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        return {errorMessage(std::string("malformed JSON: ") + e.what()), false};
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        return {errorMessage("message needs a string `type`"), false};
    }
    const std::string type = j["type"].get<std::string>();
    try {
        if (type == "hello") {
            if (started_) return {errorMessage("hello already received"), true};
            return {hello(j), false};
        }
        if (type == "input") {
            if (!started_) return {errorMessage("input before hello"), false};
            return {input(j), false};
        }
        return {errorMessage("unknown message type '" + type + "'"), false};
    } catch (const GeometryError& e) {
        return {errorMessage(e.what()), false};
    } catch (const nlohmann::json::exception& e) {
        return {errorMessage(e.what()), false};
    }
}

std::string Session::hello(const nlohmann::json& j) {
    Space space = config_.defaultSpace;
    if (j.contains("space")) {
        if (!j["space"].is_string()) throw GeometryError(ErrorKind::Parse, "`space` must be a string");
        space = parseSpace(j["space"].get<std::string>());
    }
    SchlafliSymbol symbol = defaultSchlafli(space);
    if (j.contains("schlafli")) {
        const auto& s = j["schlafli"];
        symbol = s.is_string() ? SchlafliSymbol::parse(s.get<std::string>()) : SchlafliSymbol{s.get<std::vector<int>>()};
    }
    int depth = config_.defaultDepth;
    if (j.contains("depth")) {
        if (!j["depth"].is_number_integer()) throw GeometryError(ErrorKind::Parse, "`depth` must be an integer");
        depth = j["depth"].get<int>();
    }
    if (depth < 0 || depth > config_.maxDepth) {
        throw GeometryError(ErrorKind::Precondition, "depth must be in [0, " + std::to_string(config_.maxDepth) + "]");
    }
    EyeConfig eye;
    eye.ipd = number(j, "ipd", eye.ipd);
    eye.validate();
    StereoMode mode = StereoMode::InSpace;
    if (j.contains("mode")) {
        if (!j["mode"].is_string()) throw GeometryError(ErrorKind::Parse, "`mode` must be a string");
        mode = parseStereoMode(j["mode"].get<std::string>());
    }

    tiling_ = cache_->get(space, symbol, depth, config_.maxCells);
    space_ = space;
    eye_ = eye;
    mode_ = mode;
    started_ = true;
    resetCamera();
    return frameMessage();
}

std::string Session::input(const nlohmann::json& j) {
    const double dt = number(j, "dt", 0.0);
    if (dt < 0.0 || dt > 10.0) throw GeometryError(ErrorKind::Precondition, "dt must be in [0, 10] seconds");
    Vec3 move = Vec3::Zero();
    if (j.contains("move")) {
        const auto& m = j["move"];
        if (!m.is_array() || m.size() != 3) throw GeometryError(ErrorKind::Parse, "`move` must be three numbers");
        for (int k = 0; k < 3; ++k) {
            if (!m[k].is_number()) throw GeometryError(ErrorKind::Parse, "`move` must be three numbers");
            move[k] = m[k].get<double>();
        }
        if (!move.allFinite() || move.cwiseAbs().maxCoeff() > 1.0) {
            throw GeometryError(ErrorKind::Precondition, "`move` components must lie in [-1, 1]");
        }
    }
    const double yaw = number(j, "yaw", 0.0);
    const double pitch = number(j, "pitch", 0.0);
    bool reset = false;
    if (j.contains("reset")) {
        if (!j["reset"].is_boolean()) throw GeometryError(ErrorKind::Parse, "`reset` must be a boolean");
        reset = j["reset"].get<bool>();
    }

    if (reset) resetCamera();
    CameraFrame c = camera_;
    const Vec3 v = move * (config_.moveSpeed * dt);
    const double len = v.norm();
    if (len > 0.0) c = c.translated(v / len, len);
    if (yaw != 0.0) c = applyCommand(c, Command::rotate(Turn::Yaw, yaw));
    if (pitch != 0.0) c = applyCommand(c, Command::rotate(Turn::Pitch, pitch));
    camera_ = c.renormalized();

    const double away = camera_.distanceTo(CameraFrame::start(space_));
    if (away > kLoopArm) {
        loopArmed_ = true;
        loopClosed_ = false;
    } else if (loopArmed_ && away < kLoopClose) {
        loopArmed_ = false;
        loopClosed_ = true;
    }
    return frameMessage();
}

void Session::resetCamera() {
    camera_ = CameraFrame::start(space_);
    loopArmed_ = false;
    loopClosed_ = false;
}

Hud Session::hud() const {
    Hud h;
    const CameraFrame start = CameraFrame::start(space_);
    h.holonomyDeg = holonomyAngle(start, camera_) * kDeg;
    h.loopClosed = loopClosed_;

    const CameraFrame room = portalReduce(*tiling_, camera_);
    const auto wall = distanceToWall(*tiling_, room);
    const double a = 0.5 * eye_.ipd * eye_.worldScale;
    if (mode_ == StereoMode::ModelSpace) {
        // Both eyes look at the chart image of the wall point.
        if (!wall) {
            h.vergenceDeg = 0.0;
        } else {
            const double chartDepth = space_ == Space::H3 ? std::tanh(*wall) : *wall;
            h.vergenceDeg = std::atan2(a, chartDepth) * kDeg;
        }
    } else if (wall) {
        h.vergenceDeg = vergenceAngle(eye_, *wall / eye_.worldScale, space_) * kDeg;
    } else {
        h.vergenceDeg = space_ == Space::Euclidean ? 0.0 : vergenceLimit(eye_) * kDeg;
    }

    const double r = tiling_->cell.inradius;
    const Vec4 p = camera_.position();
    switch (space_) {
        case Space::H3: {
            // Floor plane of the start room, unit normal n with <n, n> = 1.
            const Vec4 n(0.0, std::cosh(r), 0.0, -std::sinh(r));
            h.floorDropExtra = std::asinh(std::abs(minkowskiDot(p, n))) - r;
            break;
        }
        case Space::H2E:
        case Space::Euclidean:
            h.floorDropExtra = space_ == Space::H2E ? p[2] : p[1];
            break;
    }
    return h;
}

std::string Session::frameMessage() const {
    const CameraFrame room = portalReduce(*tiling_, camera_);
    std::string out;
    out.reserve(tiling_->cells.size() * 180 + 256);
    out += R"({"type":"frame","cells":[)";
    bool first = true;
    auto emit = [&](const Mat4& m) {
        if (!first) out += ',';
        first = false;
        appendMatrix(out, m);
    };
    switch (space_) {
        case Space::H3: {
            const Mat4& j = minkowskiMetric();
            const Mat4 view = j * room.pose().transpose() * j;
            for (const TilingCell& c : tiling_->cells) emit(view * c.toCell);
            break;
        }
        case Space::Euclidean: {
            const Mat4 view = affineInverse(room.pose());
            for (const TilingCell& c : tiling_->cells) emit(view * c.toCell);
            break;
        }
        case Space::H2E: {
            const ProductIsometry view = room.productPose().inverse();
            for (const TilingCell& c : tiling_->cells) {
                emit((view * ProductIsometry::horizontal(block013(c.toCell))).toMatrix4());
            }
            break;
        }
    }
    out += ']';
    if (space_ == Space::H2E) {
        // Pitch and roll live outside the isometry group of H^2 x E.
        out += R"(,"tilt":[)";
        for (int k = 0; k < 9; ++k) {
            if (k) out += ',';
            out += formatNumber(room.tilt()(k % 3, k / 3));
        }
        out += ']';
    }
    const Hud h = hud();
    out += R"(,"hud":{"holonomyDeg":)" + formatNumber(h.holonomyDeg);
    out += R"(,"vergenceDeg":)" + formatNumber(h.vergenceDeg);
    out += R"(,"floorDropExtra":)" + formatNumber(h.floorDropExtra);
    out += R"(,"loopClosed":)";
    out += h.loopClosed ? "true" : "false";
    out += R"(,"space":")" + std::string(toString(space_)) + "\"}}";
    return out;
}

}  // namespace hyperspace
