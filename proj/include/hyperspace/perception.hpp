#pragma once

// Binocular vergence, the falling-away floor, and eye placement.

#include <utility>

#include "hyperspace/space.hpp"
#include "hyperspace/walkthrough.hpp"

namespace hyperspace {

struct EyeConfig {
    double ipd = 0.062;        // meters
    double worldScale = 1.0;   // model units per meter

    /// Throws Precondition unless ipd and worldScale are positive and finite.
    void validate() const;
    /// Outside the usual adult range 0.04-0.08 m.
    bool unusualIpd() const { return ipd < 0.04 || ipd > 0.08; }
};

/// Inward rotation of each eye fixating a point straight ahead at distance d
/// (meters). Hyperbolic spaces use the right triangle with legs ipd/2 and d:
/// pi/2 - A with tan A = tanh(d s) / sinh(ipd s / 2). H^2 x E eyes and target
/// lie in a horizontal H^2, so it shares the H^3 formula.
double vergenceAngle(const EyeConfig& eye, double d, Space space);

/// Far limit of the hyperbolic vergence, atan(sinh(ipd s / 2)).
double vergenceLimit(const EyeConfig& eye);

/// Distance to the floor plane from the point t along a sight line parallel
/// to it at height h: asinh(sinh h cosh t).
double floorDropDistance(double h, double t);

/// Left and right eye cameras ipd * worldScale apart along the right axis.
std::pair<CameraFrame, CameraFrame> eyeFrames(const CameraFrame& camera, const EyeConfig& eye);

}  // namespace hyperspace
