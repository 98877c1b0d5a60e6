#include "hyperspace/perception.hpp"

#include <cmath>
#include <numbers>

namespace hyperspace {

void EyeConfig::validate() const {
    if (!(ipd > 0.0) || !std::isfinite(ipd) || !(worldScale > 0.0) || !std::isfinite(worldScale)) {
        throw GeometryError(ErrorKind::Precondition, "ipd and worldScale must be positive");
    }
}

double vergenceAngle(const EyeConfig& eye, double d, Space space) {
    eye.validate();
    if (!(d > 0.0)) {
        throw GeometryError(ErrorKind::Precondition, "fixation distance must be positive");
    }
    const double half = 0.5 * eye.ipd;
    if (space == Space::Euclidean) {
        return std::atan(half / d);
    }
    const double a = std::atan2(std::tanh(d * eye.worldScale), std::sinh(half * eye.worldScale));
    return 0.5 * std::numbers::pi - a;
}

double vergenceLimit(const EyeConfig& eye) {
    eye.validate();
    return std::atan(std::sinh(0.5 * eye.ipd * eye.worldScale));
}

double floorDropDistance(double h, double t) {
    if (!(h > 0.0)) {
        throw GeometryError(ErrorKind::Precondition, "eye height must be positive");
    }
    if (!(t >= 0.0)) {
        throw GeometryError(ErrorKind::Precondition, "sight-line parameter must be nonnegative");
    }
    return std::asinh(std::sinh(h) * std::cosh(t));
}

std::pair<CameraFrame, CameraFrame> eyeFrames(const CameraFrame& camera, const EyeConfig& eye) {
    eye.validate();
    const double half = 0.5 * eye.ipd * eye.worldScale;
    const Vec3 right = Vec3::UnitX();
    return {camera.translated(right, -half), camera.translated(right, half)};
}

}  // namespace hyperspace
