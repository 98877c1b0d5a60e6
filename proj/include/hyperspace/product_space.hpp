#pragma once

// H^2 x E: a hyperboloid H^2 (coordinates x1, x2, x4; signature +,+,-) times a
// Euclidean height line. Isometries split into a hyperbolic part and a
// height part, which is why horizontal and vertical motions commute.

#include "hyperspace/geometry.hpp"
#include "hyperspace/space.hpp"

namespace hyperspace {

double minkowskiDot2(const Vec3& a, const Vec3& b);
double h2Distance(const Vec3& a, const Vec3& b);

/// Boost of length t along a unit direction (x1, x2) at the H^2 origin.
Mat3 h2Translation(const Vec2& direction, double t);
/// Rotation about the H^2 origin, counterclockwise in the (x1, x2) chart.
Mat3 h2Rotation(double angle);
Mat3 h2Inverse(const Mat3& m);
double h2LorentzDefect(const Mat3& m);

/// H^2 matrix acting on (x1, x2, x4) as a 4x4 map fixing x3.
Mat4 embedH2(const Mat3& m);

class ProductPoint {
public:
    ProductPoint() : h_(0, 0, 1), z_(0) {}
    static ProductPoint make(const Vec3& h, double z);

    const Vec3& h() const { return h_; }
    double z() const { return z_; }

private:
    ProductPoint(const Vec3& h, double z) : h_(h), z_(z) {}
    Vec3 h_;
    double z_;
};

/// Direction of a product geodesic: horizontal tangent at the base plus vertical rate.
struct ProductDirection {
    Vec3 hTangent = Vec3::Zero();
    double zRate = 0.0;
};

class ProductIsometry {
public:
    ProductIsometry() = default;
    /// Validates the hyperbolic block.
    static ProductIsometry make(const Mat3& hPart, double zShift, bool zFlip);
    static ProductIsometry horizontal(const Mat3& hPart) { return ProductIsometry(hPart, 0.0, false); }
    static ProductIsometry vertical(double zShift, bool zFlip = false) {
        return ProductIsometry(Mat3::Identity(), zShift, zFlip);
    }

    const Mat3& hPart() const { return h_; }
    double zShift() const { return shift_; }
    bool zFlip() const { return flip_; }

    ProductIsometry operator*(const ProductIsometry& other) const;
    ProductIsometry inverse() const;
    ProductPoint apply(const ProductPoint& p) const;
    ProductIsometry renormalized(double threshold = tol::invariant) const;

    /// Wire encoding: hyperbolic block in rows/cols {0,1,3}, M22 = +-1, M23 = z shift.
    Mat4 toMatrix4() const;

private:
    ProductIsometry(const Mat3& h, double shift, bool flip) : h_(h), shift_(shift), flip_(flip) {}
    Mat3 h_ = Mat3::Identity();
    double shift_ = 0.0;
    bool flip_ = false;
};

double productDistance(const ProductPoint& p, const ProductPoint& q);

/// Component-wise geodesic; the direction must satisfy |hTangent|^2 + zRate^2 = 1.
ProductPoint productGeodesic(const ProductPoint& p, const ProductDirection& dir, double t);

MotionClass classify(const ProductIsometry& m, double tolerance = tol::invariant);

struct ProductCommutator {
    ProductIsometry value;
    MotionClass type;
};
ProductCommutator commutator(const ProductIsometry& a, const ProductIsometry& b);

struct AngularSize {
    double width = 0.0;   // half-angle subtended horizontally
    double height = 0.0;  // half-angle subtended vertically
};

/// Half-angles subtended by an object of the given half extents at distance d.
AngularSize angularSizes(double halfWidth, double halfHeight, double d, Space space);

}  // namespace hyperspace
