#pragma once

// Software renderer for tiled curved spaces.
//
// Each cell of the tiling draws the same room meshes under its cell matrix.
// Vertices are taken into camera coordinates (the inverse camera pose times
// the cell matrix) and then into a chart centred at the eye in which
// geodesics through the eye are straight rays: the Klein ball for H^3, the
// exponential chart for H^2 x E, the space itself for Euclidean scenes. The
// chart is then perspective-projected and rasterized with a depth buffer,
// depth being the distance from the eye in the space's metric.
//
// Screen coordinates are snapped to 1/256 pixel and vertex depths to 1e-9 so
// that renders related by an exact symmetry agree pixel for pixel.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperspace/image.hpp"
#include "hyperspace/perception.hpp"
#include "hyperspace/tiling.hpp"
#include "hyperspace/walkthrough.hpp"

namespace hyperspace {

enum class MeshKind { CubeFrame, FloorTile, Marker };
std::string_view toString(MeshKind kind);
MeshKind parseMeshKind(std::string_view text);

enum class StereoMode { InSpace, ModelSpace };
std::string_view toString(StereoMode mode);
StereoMode parseStereoMode(std::string_view text);

struct Prop {
    int cell = -1;            // -1 draws the prop in every cell
    MeshKind mesh = MeshKind::CubeFrame;
    Rgb color{220, 220, 220};
    Vec3 at = Vec3::Zero();   // markers: offset (right, up, forward) from the cell centre
    double size = 0.15;       // markers: half extent
};

struct Scene {
    Space space = Space::H3;
    SchlafliSymbol schlafli;
    int tilingDepth = 2;
    int maxCells = 200000;
    std::vector<Prop> props;
    double fogScale = 3.0;
    Rgb background{12, 12, 20};
    /// Reduce the camera into the fundamental cell before drawing. Props then
    /// stay in the camera's room instead of at absolute cells.
    bool portal = true;
    /// Extra motion applied to every cell (H^3 and Euclidean scenes only).
    Mat4 worldTransform = Mat4::Identity();

    std::shared_ptr<const TilingGraph> tiling;
};

/// Default tiling per space: {4,3,6}, {4,6} rooms, {4,3,4}.
SchlafliSymbol defaultSchlafli(Space space);

/// Builds scene.tiling from schlafli / tilingDepth / maxCells and validates props.
void buildTiling(Scene& scene);

/// Parses {space, schlafli, tilingDepth, props:[{cell, mesh, color}], fogScale}
/// plus the optional fields above, and builds the tiling.
Scene sceneFromJson(const nlohmann::json& j);
Scene loadScene(const std::string& path);
nlohmann::json toJson(const Scene& scene);

/// Camera moved by a tiling symmetry into the fundamental cell.
CameraFrame portalReduce(const TilingGraph& tiling, const CameraFrame& camera);

/// Eye-chart coordinates (right, up, forward) of a point given in the
/// scene's coordinates (hyperboloid for H^3, affine for Euclidean, (h1, h2,
/// z, h4) for H^2 x E), as seen from `camera`.
Vec3 eyeCoordinates(Space space, const CameraFrame& camera, const Vec4& point);

struct ScreenPoint {
    double x = 0.0;      // pixels, 0 at the left edge
    double y = 0.0;      // pixels, 0 at the top edge
    double depth = 0.0;  // distance from the eye
    bool visible = false;
};

/// Where the perspective camera puts a world point (no clipping or snapping).
ScreenPoint projectPoint(Space space, const CameraFrame& camera, const Vec4& point, double fovY, int width,
                         int height);

struct RenderStats {
    int cells = 0;
    long triangles = 0;      // after clipping
    bool truncated = false;  // tiling hit its cell budget
};

struct RenderOptions {
    bool serial = false;  // reference rasterizer, triangle-major on one thread
};

Image renderFrame(const Scene& scene, const CameraFrame& camera, double fovY, int width, int height,
                  RenderOptions options = {}, RenderStats* stats = nullptr);

/// Single-threaded reference; must match renderFrame byte for byte.
Image renderFrameSerial(const Scene& scene, const CameraFrame& camera, double fovY, int width, int height);

/// inSpace renders each eye from its own frame (eyeFrames). modelSpace maps
/// the scene once into the head's chart and views that as a Euclidean
/// object from two eyes offset by ipd * worldScale / 2.
std::pair<Image, Image> renderStereo(const Scene& scene, const CameraFrame& camera, const EyeConfig& eye,
                                     StereoMode mode, double fovY, int width, int height,
                                     RenderOptions options = {});

}  // namespace hyperspace
