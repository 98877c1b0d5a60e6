#include "hyperspace/product_space.hpp"

#include <cmath>

namespace hyperspace {

namespace {

const Mat3& metric2() {
    static const Mat3 j = Vec3(1, 1, -1).asDiagonal();
    return j;
}

Vec3 onSheet2(const Vec3& h) {
    const double q = -minkowskiDot2(h, h);
    if (!(q > 0.0) || h[2] <= 0.0) {
        throw GeometryError(ErrorKind::InvalidPoint, "H^2 part is not future timelike");
    }
    const double s = std::max(1.0, h.cwiseAbs().maxCoeff());
    return std::abs(q - 1.0) > tol::invariant * s * s ? Vec3(h / std::sqrt(q)) : h;
}

}  // namespace

double minkowskiDot2(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] - a[2] * b[2]; }

double h2Distance(const Vec3& a, const Vec3& b) {
    return distance(Vec4(a[0], a[1], 0.0, a[2]), Vec4(b[0], b[1], 0.0, b[2]));
}

Mat3 h2Translation(const Vec2& direction, double t) {
    if (!(std::abs(direction.norm() - 1.0) <= tol::invariant)) {
        throw GeometryError(ErrorKind::Precondition, "translation direction must be a unit vector");
    }
    Mat3 m = Mat3::Identity();
    m.topLeftCorner<2, 2>() += (std::cosh(t) - 1.0) * direction * direction.transpose();
    m.block<2, 1>(0, 2) = std::sinh(t) * direction;
    m.block<1, 2>(2, 0) = std::sinh(t) * direction.transpose();
    m(2, 2) = std::cosh(t);
    return m;
}

Mat3 h2Rotation(double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    Mat3 m = Mat3::Identity();
    m(0, 0) = c;
    m(0, 1) = -s;
    m(1, 0) = s;
    m(1, 1) = c;
    return m;
}

Mat3 h2Inverse(const Mat3& m) { return metric2() * m.transpose() * metric2(); }

double h2LorentzDefect(const Mat3& m) {
    const double s = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m.transpose() * metric2() * m - metric2()).cwiseAbs().maxCoeff() / (s * s);
}

Mat4 embedH2(const Mat3& m) {
    Mat4 out = Mat4::Identity();
    const int idx[3] = {0, 1, 3};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out(idx[i], idx[j]) = m(i, j);
        }
    }
    return out;
}

// --- ProductPoint / ProductIsometry -------------------------------------------

ProductPoint ProductPoint::make(const Vec3& h, double z) {
    MPoint::fromH2(h);  // validates the sheet invariant
    if (!std::isfinite(z)) {
        throw GeometryError(ErrorKind::InvalidPoint, "non-finite height");
    }
    return ProductPoint(h, z);
}

ProductIsometry ProductIsometry::make(const Mat3& hPart, double zShift, bool zFlip) {
    if (!hPart.allFinite() || h2LorentzDefect(hPart) > tol::isometry || hPart(2, 2) < 1.0 - tol::invariant) {
        throw GeometryError(ErrorKind::Precondition, "hyperbolic part is not an orthochronous H^2 isometry");
    }
    if (!std::isfinite(zShift)) {
        throw GeometryError(ErrorKind::Precondition, "non-finite height shift");
    }
    return ProductIsometry(hPart, zShift, zFlip);
}

ProductIsometry ProductIsometry::operator*(const ProductIsometry& other) const {
    // (this o other)(z) = s1 (s2 z + t2) + t1
    const double shift = (flip_ ? -other.shift_ : other.shift_) + shift_;
    return ProductIsometry(h_ * other.h_, shift, flip_ != other.flip_);
}

ProductIsometry ProductIsometry::inverse() const {
    return ProductIsometry(h2Inverse(h_), flip_ ? shift_ : -shift_, flip_);
}

ProductPoint ProductIsometry::apply(const ProductPoint& p) const {
    return ProductPoint::make(onSheet2(h_ * p.h()), (flip_ ? -p.z() : p.z()) + shift_);
}

ProductIsometry ProductIsometry::renormalized(double threshold) const {
    if (h2LorentzDefect(h_) <= threshold) {
        return *this;
    }
    const Mat4 fixed = gramSchmidtMinkowski(embedH2(h_));
    Mat3 h;
    const int idx[3] = {0, 1, 3};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            h(i, j) = fixed(idx[i], idx[j]);
        }
    }
    return ProductIsometry(h, shift_, flip_);
}

Mat4 ProductIsometry::toMatrix4() const {
    Mat4 out = embedH2(h_);
    out(2, 2) = flip_ ? -1.0 : 1.0;
    out(2, 3) = shift_;
    return out;
}

// --- Metric ------------------------------------------------------------------

double productDistance(const ProductPoint& p, const ProductPoint& q) {
    return std::hypot(h2Distance(p.h(), q.h()), p.z() - q.z());
}

ProductPoint productGeodesic(const ProductPoint& p, const ProductDirection& dir, double t) {
    const double h2 = minkowskiDot2(dir.hTangent, dir.hTangent);
    const double total = h2 + dir.zRate * dir.zRate;
    if (!(total > 0.0)) {
        throw GeometryError(ErrorKind::Precondition, "zero product direction");
    }
    if (std::abs(total - 1.0) > tol::invariant) {
        throw GeometryError(ErrorKind::Precondition, "product direction must be normalized");
    }
    if (std::abs(minkowskiDot2(dir.hTangent, p.h())) > tol::invariant * std::max(1.0, p.h()[2])) {
        throw GeometryError(ErrorKind::Precondition, "horizontal direction is not tangent at the base point");
    }
    const double speed = std::sqrt(std::max(0.0, h2));
    Vec3 h = p.h();
    if (speed > 0.0 && t != 0.0) {
        const double s = speed * t;
        h = onSheet2(std::cosh(s) * p.h() + std::sinh(s) * dir.hTangent / speed);
    }
    return ProductPoint::make(h, p.z() + dir.zRate * t);
}

MotionClass classify(const ProductIsometry& m, double tolerance) {
    MotionClass h = classifyLorentz(m.hPart(), tolerance);
    const bool vertical = m.zFlip() || std::abs(m.zShift()) > tolerance;
    if (!vertical) {
        return h;
    }
    MotionClass out;
    if (m.zFlip()) {
        out.kind = MotionKind::Other;
        return out;
    }
    // Screw-free product motions with a height shift are translations along a
    // product geodesic when the horizontal part is the identity or a translation.
    if (h.kind == MotionKind::Identity || h.kind == MotionKind::Translation) {
        out.kind = MotionKind::Translation;
        out.translationLength = std::hypot(h.translationLength, m.zShift());
        return out;
    }
    out.kind = MotionKind::Other;
    out.angle = h.angle;
    return out;
}

ProductCommutator commutator(const ProductIsometry& a, const ProductIsometry& b) {
    const ProductIsometry c = a * b * a.inverse() * b.inverse();
    return {c, classify(c)};
}

AngularSize angularSizes(double halfWidth, double halfHeight, double d, Space space) {
    if (!(halfWidth > 0.0) || !(halfHeight > 0.0) || !(d > 0.0)) {
        throw GeometryError(ErrorKind::Precondition, "extents and distance must be positive");
    }
    const auto hyperbolic = [d](double extent) { return std::atan(std::tanh(extent) / std::sinh(d)); };
    const auto euclidean = [d](double extent) { return std::atan(extent / d); };
    switch (space) {
        case Space::H3: return {hyperbolic(halfWidth), hyperbolic(halfHeight)};
        case Space::H2E: return {hyperbolic(halfWidth), euclidean(halfHeight)};
        case Space::Euclidean: return {euclidean(halfWidth), euclidean(halfHeight)};
    }
    return {};
}

}  // namespace hyperspace
