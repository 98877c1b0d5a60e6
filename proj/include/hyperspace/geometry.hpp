#pragma once

// Hyperboloid model of H^3 (and H^2 as the x3 = 0 slice) inside Minkowski
// space R^{3,1} with signature (+,+,+,-). The fourth coordinate is timelike.
// Curvature is fixed at -1. Matrices are Eigen column-major.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hyperspace/errors.hpp"

namespace hyperspace {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// J = diag(1, 1, 1, -1).
const Mat4& minkowskiMetric();

double minkowskiDot(const Vec4& a, const Vec4& b);

/// Largest entry of |M^T J M - J|, divided by the squared scale of M.
double lorentzDefect(const Mat4& m);

/// Point on the upper sheet <x,x> = -1, x4 >= 1.
class MPoint {
public:
    MPoint() : x_(0, 0, 0, 1) {}

    static MPoint origin() { return MPoint(); }

    /// Validates the sheet invariant; throws InvalidPoint otherwise.
    static MPoint fromCoords(const Vec4& x);

    /// Rescales a timelike future-pointing vector onto the sheet.
    static MPoint projected(const Vec4& x);

    /// H^2 point from its (x1, x2, x4) view.
    static MPoint fromH2(const Vec3& h);

    const Vec4& coords() const { return x_; }
    double operator[](int i) const { return x_[i]; }

    /// True when the point lies in the x3 = 0 copy of H^2.
    bool inH2(double tolerance = 1e-12) const;
    Vec3 h2View() const { return {x_[0], x_[1], x_[3]}; }

private:
    explicit MPoint(const Vec4& x) : x_(x) {}
    Vec4 x_;
};

/// Tangent vector at a point. Unit tangents are flagged; non-unit ones are
/// allowed for intermediate arithmetic.
class MTangent {
public:
    /// Checks <base, vec> = 0.
    static MTangent at(const MPoint& base, const Vec4& vec);
    /// Checks <base, vec> = 0 and <vec, vec> = 1.
    static MTangent unitAt(const MPoint& base, const Vec4& vec);
    /// Projects vec onto T_base and normalizes it.
    static MTangent normalizedAt(const MPoint& base, const Vec4& vec);

    const MPoint& base() const { return base_; }
    const Vec4& vec() const { return vec_; }
    bool isUnit() const { return unit_; }
    double norm() const;

private:
    MTangent(const MPoint& base, const Vec4& vec, bool unit) : base_(base), vec_(vec), unit_(unit) {}
    MPoint base_;
    Vec4 vec_;
    bool unit_;
};

/// Minkowski-orthogonal, orthochronous linear map of R^{3,1}.
class Isometry {
public:
    Isometry() : m_(Mat4::Identity()) {}

    static Isometry identity() { return Isometry(); }
    /// Validates M^T J M = J and M44 >= 1.
    static Isometry fromMatrix(const Mat4& m);
    /// Skips validation; for matrices that are isometries by construction.
    static Isometry trusted(const Mat4& m) { return Isometry(m); }

    const Mat4& matrix() const { return m_; }

    Isometry operator*(const Isometry& other) const;
    MPoint apply(const MPoint& p) const;
    MTangent apply(const MTangent& v) const;
    Vec4 apply(const Vec4& v) const { return m_ * v; }

    /// J M^T J, exact for Lorentz matrices.
    Isometry inverse() const;

    /// Gram-Schmidt under the Minkowski form when the defect exceeds threshold.
    Isometry renormalized(double threshold = tol::invariant) const;

    bool isOrientationPreserving() const { return m_.determinant() > 0; }

private:
    explicit Isometry(const Mat4& m) : m_(m) {}
    Mat4 m_;
};

/// Re-orthonormalizes the columns of a Lorentz matrix (last column timelike).
Mat4 gramSchmidtMinkowski(const Mat4& m);

/// Hyperbolic distance arccosh(-<p,q>).
double distance(const MPoint& p, const MPoint& q);
/// Raw-coordinate variant: throws InvalidPoint if -<p,q> < 1 - 1e-7.
double distance(const Vec4& p, const Vec4& q);

/// cosh(t) p + sinh(t) v for a unit tangent v at p.
MPoint geodesicPoint(const MPoint& p, const MTangent& v, double t);

/// Unit tangent at p pointing toward q. Throws Precondition when p == q.
MTangent directionTo(const MPoint& p, const MPoint& q);

/// Parallel transport along the geodesic from p to q:
/// v' = v + <v,q> / (1 - <p,q>) (p + q).
MTangent parallelTransport(const MPoint& p, const MPoint& q, const MTangent& v);

/// Transvection along the geodesic p -> q (acts as parallel transport on T_p).
Isometry translationAlong(const MPoint& p, const MPoint& q);

/// Boost of length t along a unit tangent direction at the origin.
Isometry translationAtOrigin(const Vec3& direction, double t);

/// Rotation by theta fixing p in the plane spanned by orthonormal u, w.
Isometry rotationAt(const MPoint& p, const MTangent& u, const MTangent& w, double theta);

/// Reflection in the hyperplane orthogonal to the spacelike vector n.
Isometry reflection(const Vec4& normal);

enum class MotionKind { Identity, Rotation, Translation, Other };
std::string_view toString(MotionKind kind);

struct MotionClass {
    MotionKind kind = MotionKind::Identity;
    double angle = 0.0;                 // rotation angle in [0, pi] (rotation part for Other)
    double translationLength = 0.0;     // for translations
    std::optional<Vec4> fixedPoint;     // a fixed point on the sheet for rotations

    std::string describe() const;
};

/// Fixed-point and eigenvalue classification of a Lorentz matrix of size 3 or 4.
MotionClass classifyLorentz(const Eigen::MatrixXd& m, double tolerance = tol::invariant);
MotionClass classify(const Isometry& m, double tolerance = tol::invariant);

struct Commutator {
    Isometry value;
    MotionClass type;
};

/// A B A^-1 B^-1 with its classification.
Commutator commutator(const Isometry& a, const Isometry& b);

struct Holonomy {
    double angle = 0.0;                 // in [0, pi]
    std::optional<double> signedAngle;  // H^2 loops only, counterclockwise positive
    Isometry rotation;                  // fixes the start point
};

/// Transports a frame edge by edge around a closed loop of points.
Holonomy holonomyOfLoop(std::span<const MPoint> loop);

// --- Unit sphere S^2, used as a transport oracle ---------------------------

class SpherePoint {
public:
    static SpherePoint fromCoords(const Vec3& x);
    const Vec3& coords() const { return x_; }

private:
    explicit SpherePoint(const Vec3& x) : x_(x) {}
    Vec3 x_;
};

/// Transport of a tangent vector along the great-circle arc a -> b.
Vec3 sphereParallelTransport(const SpherePoint& a, const SpherePoint& b, const Vec3& v);

struct SphereHolonomy {
    double angle = 0.0;        // in [0, pi]
    double signedAngle = 0.0;  // counterclockwise about the outward normal
};

SphereHolonomy sphereHolonomyOfLoop(std::span<const SpherePoint> loop);

// --- Classical models ------------------------------------------------------

enum class Model { Klein, Poincare, HalfSpace };
std::string_view toString(Model model);
Model parseModel(std::string_view text);

/// Klein: x/x4. Poincare: x/(1+x4). Half-space: (x1, x2, 1)/(x4 - x3), height last.
Vec3 projectToModel(const MPoint& p, Model model);
MPoint liftFromModel(const Vec3& q, Model model);

/// H^2 variants (point must satisfy x3 = 0). Half-plane: (x1, 1)/(x4 - x2).
Vec2 projectToModel2d(const MPoint& p, Model model);
MPoint liftFromModel2d(const Vec2& q, Model model);

}  // namespace hyperspace
