#pragma once

// One explorer session: the state behind a WebSocket connection.
//
// Messages are JSON text. After a hello, each input message advances the
// camera and is answered by exactly one frame message. Frame cells are the
// tiling's cell matrices relative to the camera after it has been reduced
// into the fundamental cell, printed with 9 significant digits.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "hyperspace/perception.hpp"
#include "hyperspace/render.hpp"
#include "hyperspace/tiling.hpp"
#include "hyperspace/walkthrough.hpp"

namespace hyperspace {

struct SessionConfig {
    double moveSpeed = 1.0;      // model units per second at |move| = 1
    double rotationSpeed = 1.5;  // rad/s; kept for config files, ticks carry radians
    Space defaultSpace = Space::H3;
    int defaultDepth = 4;
    int maxDepth = 6;
    int maxCells = 200000;
};

/// Tilings shared read-only between sessions, keyed by symbol and depth.
class TilingCache {
public:
    std::shared_ptr<const TilingGraph> get(Space space, const SchlafliSymbol& symbol, int depth, int maxCells);
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<std::pair<std::string, int>, std::shared_ptr<const TilingGraph>> tilings_;
};

struct Hud {
    double holonomyDeg = 0.0;
    double vergenceDeg = 0.0;
    double floorDropExtra = 0.0;
    bool loopClosed = false;
};

class Session {
public:
    explicit Session(SessionConfig config = {}, std::shared_ptr<TilingCache> cache = nullptr);

    struct Reply {
        std::string text;
        bool close = false;
    };

    /// Handles one client message. Protocol errors become error replies.
    Reply handle(const std::string& text);

    bool started() const { return started_; }
    Space space() const { return space_; }
    const CameraFrame& camera() const { return camera_; }
    StereoMode mode() const { return mode_; }
    const EyeConfig& eye() const { return eye_; }
    const TilingGraph& tiling() const { return *tiling_; }

    Hud hud() const;
    /// Current frame message.
    std::string frameMessage() const;

private:
    std::string hello(const nlohmann::json& j);
    std::string input(const nlohmann::json& j);
    void resetCamera();

    SessionConfig config_;
    std::shared_ptr<TilingCache> cache_;
    bool started_ = false;
    Space space_ = Space::H3;
    StereoMode mode_ = StereoMode::InSpace;
    EyeConfig eye_;
    std::shared_ptr<const TilingGraph> tiling_;
    CameraFrame camera_;
    bool loopArmed_ = false;
    bool loopClosed_ = false;
};

std::string errorMessage(const std::string& message);

/// Distance along the camera's forward ray to the wall of the cell it is in,
/// or nothing when the ray never leaves (straight up in H^2 x E rooms).
std::optional<double> distanceToWall(const TilingGraph& tiling, const CameraFrame& camera);

/// Shortest round-trip decimal with 9 significant digits.
std::string formatNumber(double value);

}  // namespace hyperspace
