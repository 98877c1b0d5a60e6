#pragma once

// First-person camera moving through H^3, H^2 x E or Euclidean space.
//
// A camera is a group element: the pose maps the start frame at the origin
// (right = e1, up = e2, forward = e3) onto the current frame. Commands act on
// the right, in the camera's own axes, so translating moves along the local
// geodesic and carries the frame by parallel transport.
//
// In H^2 x E the isometry group has no pitch or roll, so the camera keeps a
// product isometry (position and heading) plus a tilt rotation of the tangent
// space. The tilt is expressed in the basis (h e1, z, h e2) and carries no
// heading: any turn about the vertical is moved into the product part.

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hyperspace/geometry.hpp"
#include "hyperspace/product_space.hpp"
#include "hyperspace/space.hpp"

namespace hyperspace {

/// Rigid motion of Euclidean 3-space as an affine 4x4 matrix.
struct RigidMotion {
    Mat4 matrix = Mat4::Identity();
};

using NetIsometry = std::variant<Isometry, ProductIsometry, RigidMotion>;

enum class Axis { Right, Up, Forward };
enum class Turn { Yaw, Pitch, Roll };

std::string_view toString(Axis axis);
std::string_view toString(Turn turn);

struct Command {
    enum class Kind { Translate, Rotate };
    Kind kind = Kind::Translate;
    Axis axis = Axis::Forward;   // translations
    Turn turn = Turn::Yaw;       // rotations
    double amount = 0.0;         // length or radians

    static Command translate(Axis axis, double length);
    static Command rotate(Turn turn, double radians);
    std::string str() const;
};

/// Rotation of local camera coordinates (right, up, forward). Positive yaw
/// turns left, positive pitch looks up, positive roll tips the up axis
/// toward the right.
Mat3 localRotation(Turn turn, double radians);

class CameraFrame {
public:
    /// Camera at the origin with the start frame.
    static CameraFrame start(Space space);

    /// Moves from the start frame by the local offset (right, up, forward)
    /// along one geodesic, then turns by yaw and pitch.
    static CameraFrame placed(Space space, const Vec3& offset, double yaw, double pitch);

    /// H^3 / Euclidean camera from a pose matrix (Lorentz or affine).
    static CameraFrame fromPose(Space space, const Mat4& pose);
    /// H^2 x E camera from its product part and tilt.
    static CameraFrame fromProduct(const ProductIsometry& pose, const Mat3& tilt);

    Space space() const { return space_; }

    /// Lorentz matrix (H^3) or affine matrix (Euclidean). For H^2 x E the
    /// product part in wire encoding, without the tilt.
    Mat4 pose() const;
    const ProductIsometry& productPose() const { return product_; }
    const Mat3& tilt() const { return tilt_; }

    /// H^3: hyperboloid coordinates. Euclidean: (x, y, z, 1). H^2 x E:
    /// (h1, h2, z, h4).
    Vec4 position() const;
    MPoint point() const;                 // H^3 only
    ProductPoint productPoint() const;    // H^2 x E only

    /// Right, up and forward in the same coordinates as position(). H^2 x E
    /// axes put the horizontal tangent in slots {0, 1, 3} and the vertical
    /// rate in slot 2.
    std::array<Vec4, 3> axes() const;

    /// Largest deviation of the frame from orthonormality in the space's metric.
    double orthonormalityDefect() const;

    /// Distance between camera positions in the space's metric.
    double distanceTo(const CameraFrame& other) const;

    /// Largest coordinate difference between the two frames' axes.
    double frameDifference(const CameraFrame& other) const;

    /// Moves along a unit local direction.
    CameraFrame translated(const Vec3& localDirection, double length) const;
    /// Rotates the frame by a local rotation.
    CameraFrame rotated(const Mat3& localRotation) const;

    CameraFrame renormalized(double threshold = tol::invariant) const;

private:
    Space space_ = Space::H3;
    Mat4 pose_ = Mat4::Identity();
    ProductIsometry product_;
    Mat3 tilt_ = Mat3::Identity();
};

CameraFrame applyCommand(const CameraFrame& camera, const Command& command);

/// One command per line: `T right 0.5`, `R yaw 1.5707963`. `#` starts a comment.
std::vector<Command> parseScript(const std::string& text);

/// Net motion carrying frame `from` onto frame `to` (tilt excluded in H^2 x E).
NetIsometry netMotion(const CameraFrame& from, const CameraFrame& to);

MotionClass classify(const RigidMotion& m, double tolerance = tol::invariant);
MotionClass classify(const NetIsometry& m, double tolerance = tol::invariant);

/// Angle between the current frame and the start frame carried along the
/// geodesic from the start position to the current one.
double holonomyAngle(const CameraFrame& start, const CameraFrame& current);

/// Grid position after replaying horizontal moves on the unit square grid of
/// a flat room: each translation is one square, each yaw is rounded to
/// quarter turns. x counts squares to the start's right, y squares ahead.
Eigen::Vector2i gridReplay(const std::vector<Command>& script);

inline constexpr double kClosureTolerance = 1e-6;

struct WalkReport {
    NetIsometry netIsometry = Isometry();
    MotionClass classification;
    bool closed = false;
    std::optional<int> movesToClose;
    int movesMade = 0;
    double closureResidual = 0.0;      // max(position distance, frame difference)
    Eigen::Vector2i physicalEndpoint = Eigen::Vector2i::Zero();
    int physicalSquaresAway = 0;       // grid moves between square centres
    CameraFrame finalFrame;
};

WalkReport runScript(const CameraFrame& start, const std::vector<Command>& script);

/// Repeats [yaw turn, forward step] until the camera is back at its start
/// frame or maxMoves is reached.
WalkReport squareWalk(double stepLength, double turn, Space space, int maxMoves);

/// Step length for which [yaw turn, forward step] closes after `moves` moves
/// in a hyperbolic plane, by bisection on the rotation angle of one move.
double solveClosingStep(int moves, double turn, double tolerance = 1e-13);

}  // namespace hyperspace
