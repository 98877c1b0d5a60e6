#include "hyperspace/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hyperspace {

namespace {

double scaleOf(const Vec4& x) { return std::max(1.0, x.cwiseAbs().maxCoeff()); }

Vec4 lowered(const Vec4& x) { return {x[0], x[1], x[2], -x[3]}; }

// Keeps a freshly computed point on the sheet when rounding pushed it off.
MPoint onSheet(const Vec4& x) {
    const double s = scaleOf(x);
    if (std::abs(minkowskiDot(x, x) + 1.0) > tol::invariant * s * s) {
        return MPoint::projected(x);
    }
    return MPoint::fromCoords(x);
}

bool samePoint(const MPoint& a, const MPoint& b, double tolerance) {
    const double s = std::max(scaleOf(a.coords()), scaleOf(b.coords()));
    return (a.coords() - b.coords()).cwiseAbs().maxCoeff() <= tolerance * s;
}

}  // namespace

const Mat4& minkowskiMetric() {
    static const Mat4 j = Vec4(1, 1, 1, -1).asDiagonal();
    return j;
}

double minkowskiDot(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] - a[3] * b[3];
}

double lorentzDefect(const Mat4& m) {
    const Mat4& j = minkowskiMetric();
    const double s = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m.transpose() * j * m - j).cwiseAbs().maxCoeff() / (s * s);
}

// --- MPoint ------------------------------------------------------------------

MPoint MPoint::fromCoords(const Vec4& x) {
    if (!x.allFinite()) {
        throw GeometryError(ErrorKind::InvalidPoint, "non-finite coordinates");
    }
    const double s = scaleOf(x);
    const double defect = std::abs(minkowskiDot(x, x) + 1.0);
    if (defect > tol::invariant * s * s || x[3] < 1.0 - tol::invariant) {
        std::ostringstream msg;
        msg << "not on the upper sheet (<x,x>+1 = " << minkowskiDot(x, x) + 1.0 << ", x4 = " << x[3] << ")";
        throw GeometryError(ErrorKind::InvalidPoint, msg.str());
    }
    return MPoint(x);
}

MPoint MPoint::projected(const Vec4& x) {
    const double q = -minkowskiDot(x, x);
    if (!x.allFinite() || q <= 0.0 || x[3] <= 0.0) {
        throw GeometryError(ErrorKind::InvalidPoint, "cannot project a non-timelike or past-pointing vector");
    }
    return MPoint(x / std::sqrt(q));
}

MPoint MPoint::fromH2(const Vec3& h) { return fromCoords(Vec4(h[0], h[1], 0.0, h[2])); }

bool MPoint::inH2(double tolerance) const { return std::abs(x_[2]) <= tolerance * scaleOf(x_); }

// --- MTangent ----------------------------------------------------------------

MTangent MTangent::at(const MPoint& base, const Vec4& vec) {
    const double s = scaleOf(base.coords()) * scaleOf(vec);
    if (std::abs(minkowskiDot(base.coords(), vec)) > tol::invariant * s) {
        throw GeometryError(ErrorKind::Precondition, "vector is not tangent at its base point");
    }
    const double n2 = minkowskiDot(vec, vec);
    return MTangent(base, vec, std::abs(n2 - 1.0) <= tol::invariant * s);
}

MTangent MTangent::unitAt(const MPoint& base, const Vec4& vec) {
    MTangent t = at(base, vec);
    if (!t.unit_) {
        throw GeometryError(ErrorKind::Precondition, "tangent is not unit length");
    }
    return t;
}

MTangent MTangent::normalizedAt(const MPoint& base, const Vec4& vec) {
    const Vec4 w = vec + minkowskiDot(vec, base.coords()) * base.coords();
    const double n2 = minkowskiDot(w, w);
    if (!(n2 > 0.0)) {
        throw GeometryError(ErrorKind::Precondition, "zero tangent cannot be normalized");
    }
    return MTangent(base, w / std::sqrt(n2), true);
}

double MTangent::norm() const { return std::sqrt(std::max(0.0, minkowskiDot(vec_, vec_))); }

// --- Isometry ----------------------------------------------------------------

Isometry Isometry::fromMatrix(const Mat4& m) {
    if (!m.allFinite() || lorentzDefect(m) > tol::isometry) {
        throw GeometryError(ErrorKind::Precondition, "matrix does not preserve the Minkowski form");
    }
    if (m(3, 3) < 1.0 - tol::invariant) {
        throw GeometryError(ErrorKind::Precondition, "matrix is not orthochronous");
    }
    return Isometry(m);
}

Isometry Isometry::operator*(const Isometry& other) const { return Isometry(m_ * other.m_); }

MPoint Isometry::apply(const MPoint& p) const { return onSheet(m_ * p.coords()); }

MTangent Isometry::apply(const MTangent& v) const {
    const MPoint base = apply(v.base());
    const Vec4 w = m_ * v.vec();
    return v.isUnit() ? MTangent::normalizedAt(base, w) : MTangent::at(base, w);
}

Isometry Isometry::inverse() const {
    const Mat4& j = minkowskiMetric();
    return Isometry(j * m_.transpose() * j);
}

Isometry Isometry::renormalized(double threshold) const {
    if (lorentzDefect(m_) <= threshold) {
        return *this;
    }
    return Isometry(gramSchmidtMinkowski(m_));
}

Mat4 gramSchmidtMinkowski(const Mat4& m) {
    Mat4 out = m;
    // Timelike column first, then the spacelike ones against everything before.
    const int order[4] = {3, 0, 1, 2};
    for (int k = 0; k < 4; ++k) {
        const int c = order[k];
        Vec4 v = out.col(c);
        for (int i = 0; i < k; ++i) {
            const Vec4 u = out.col(order[i]);
            v -= (minkowskiDot(v, u) / minkowskiDot(u, u)) * u;
        }
        out.col(c) = v / std::sqrt(std::abs(minkowskiDot(v, v)));
    }
    return out;
}

// --- Metric operations ---------------------------------------------------------

double distance(const Vec4& p, const Vec4& q) {
    const double c = -minkowskiDot(p, q);
    if (!(c >= 1.0 - tol::clamp)) {
        throw GeometryError(ErrorKind::InvalidPoint, "-<p,q> below 1: points are off the sheet");
    }
    // 2 asinh(|p-q|/2) keeps full precision for nearby points.
    const Vec4 d = p - q;
    const double chord2 = std::max(0.0, minkowskiDot(d, d));
    return 2.0 * std::asinh(0.5 * std::sqrt(chord2));
}

double distance(const MPoint& p, const MPoint& q) { return distance(p.coords(), q.coords()); }

MPoint geodesicPoint(const MPoint& p, const MTangent& v, double t) {
    if (!v.isUnit()) {
        throw GeometryError(ErrorKind::Precondition, "geodesic direction must be a unit tangent");
    }
    if (!samePoint(v.base(), p, tol::invariant)) {
        throw GeometryError(ErrorKind::Precondition, "geodesic direction is not based at the start point");
    }
    if (t == 0.0) {
        return p;
    }
    return onSheet(std::cosh(t) * p.coords() + std::sinh(t) * v.vec());
}

MTangent directionTo(const MPoint& p, const MPoint& q) {
    const Vec4 w = q.coords() + minkowskiDot(p.coords(), q.coords()) * p.coords();
    const double n2 = minkowskiDot(w, w);
    if (!(n2 > 1e-30)) {
        throw GeometryError(ErrorKind::Precondition, "direction between coincident points");
    }
    return MTangent::normalizedAt(p, w / std::sqrt(n2));
}

MTangent parallelTransport(const MPoint& p, const MPoint& q, const MTangent& v) {
    if (!samePoint(v.base(), p, tol::invariant)) {
        throw GeometryError(ErrorKind::Precondition, "tangent is not based at the transport start");
    }
    const double denom = 1.0 - minkowskiDot(p.coords(), q.coords());
    if (!(denom > 1e-12)) {
        throw GeometryError(ErrorKind::DegenerateTransport, "1 - <p,q> vanishes");
    }
    const Vec4 w = v.vec() + (minkowskiDot(v.vec(), q.coords()) / denom) * (p.coords() + q.coords());
    return MTangent::at(q, w);
}

Isometry translationAlong(const MPoint& p, const MPoint& q) {
    const Vec4& a = p.coords();
    const Vec4& b = q.coords();
    const double c = minkowskiDot(a, b);
    const Vec4 la = lowered(a);
    const Vec4 lb = lowered(b);
    const Mat4 m = Mat4::Identity() + a * la.transpose() +
                   (a + b) * (lb + c * la).transpose() / (1.0 - c) - b * la.transpose();
    return Isometry::trusted(m);
}

Isometry translationAtOrigin(const Vec3& direction, double t) {
    const double n = direction.norm();
    if (!(std::abs(n - 1.0) <= tol::invariant)) {
        throw GeometryError(ErrorKind::Precondition, "translation direction must be a unit vector");
    }
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() += (std::cosh(t) - 1.0) * direction * direction.transpose();
    m.block<3, 1>(0, 3) = std::sinh(t) * direction;
    m.block<1, 3>(3, 0) = std::sinh(t) * direction.transpose();
    m(3, 3) = std::cosh(t);
    return Isometry::trusted(m);
}

Isometry rotationAt(const MPoint& p, const MTangent& u, const MTangent& w, double theta) {
    if (!u.isUnit() || !w.isUnit() || !samePoint(u.base(), p, tol::invariant) ||
        !samePoint(w.base(), p, tol::invariant) ||
        std::abs(minkowskiDot(u.vec(), w.vec())) > tol::invariant * scaleOf(u.vec()) * scaleOf(w.vec())) {
        throw GeometryError(ErrorKind::Precondition, "rotation plane must be orthonormal at the fixed point");
    }
    const Vec4& a = u.vec();
    const Vec4& b = w.vec();
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const Mat4 m = Mat4::Identity() + (c - 1.0) * (a * lowered(a).transpose() + b * lowered(b).transpose()) +
                   s * (b * lowered(a).transpose() - a * lowered(b).transpose());
    return Isometry::trusted(m);
}

Isometry reflection(const Vec4& normal) {
    const double n2 = minkowskiDot(normal, normal);
    if (!(n2 > 0.0)) {
        throw GeometryError(ErrorKind::Precondition, "reflection normal must be spacelike");
    }
    return Isometry::trusted(Mat4::Identity() - 2.0 * normal * lowered(normal).transpose() / n2);
}

// --- Classification ----------------------------------------------------------

std::string_view toString(MotionKind kind) {
    switch (kind) {
        case MotionKind::Identity: return "identity";
        case MotionKind::Rotation: return "rotation";
        case MotionKind::Translation: return "translation";
        case MotionKind::Other: return "other";
    }
    return "other";
}

std::string MotionClass::describe() const {
    std::ostringstream out;
    out.precision(9);
    out << toString(kind);
    if (kind == MotionKind::Rotation) {
        out << "(" << angle << ")";
    } else if (kind == MotionKind::Translation) {
        out << "(" << translationLength << ")";
    }
    return out.str();
}

MotionClass classifyLorentz(const Eigen::MatrixXd& m, double tolerance) {
    const auto n = m.rows();
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    MotionClass out;
    if ((m - eye).cwiseAbs().maxCoeff() <= tolerance * scale) {
        return out;
    }
    if (m.determinant() < 0) {
        out.kind = MotionKind::Other;
        return out;
    }

    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
    double stretch = 0.0;
    double turn = 0.0;
    for (const auto& lambda : solver.eigenvalues()) {
        stretch = std::max(stretch, std::abs(std::log(std::abs(lambda))));
        turn = std::max(turn, std::abs(std::arg(lambda)));
    }
    constexpr double kSpectralTol = 1e-7;
    if (stretch > kSpectralTol) {
        out.translationLength = stretch;
        out.angle = turn > kSpectralTol ? turn : 0.0;
        out.kind = turn > kSpectralTol ? MotionKind::Other : MotionKind::Translation;
        return out;
    }
    if (turn <= kSpectralTol) {
        out.kind = MotionKind::Other;  // parabolic
        return out;
    }
    out.kind = MotionKind::Rotation;
    out.angle = turn;

    // The fixed set of an elliptic element is a Lorentzian subspace of dimension n-2.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m - eye, Eigen::ComputeFullV);
    const auto k = n - 2;
    const Eigen::MatrixXd basis = svd.matrixV().rightCols(k);
    Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n);
    j(n - 1, n - 1) = -1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> form(basis.transpose() * j * basis);
    if (form.eigenvalues()[0] < 0.0) {
        Eigen::VectorXd x = basis * form.eigenvectors().col(0);
        if (x[n - 1] < 0) x = -x;
        const double q = -(x.head(n - 1).squaredNorm() - x[n - 1] * x[n - 1]);
        x /= std::sqrt(q);
        Vec4 p = n == 4 ? Vec4(x[0], x[1], x[2], x[3]) : Vec4(x[0], x[1], 0.0, x[2]);
        out.fixedPoint = p;
    }
    return out;
}

MotionClass classify(const Isometry& m, double tolerance) { return classifyLorentz(m.matrix(), tolerance); }

Commutator commutator(const Isometry& a, const Isometry& b) {
    const Isometry c = a * b * a.inverse() * b.inverse();
    return {c, classify(c)};
}

// --- Holonomy ----------------------------------------------------------------

Holonomy holonomyOfLoop(std::span<const MPoint> loop) {
    if (loop.size() < 2 || !samePoint(loop.front(), loop.back(), tol::invariant)) {
        throw GeometryError(ErrorKind::Precondition, "loop must close on its start point");
    }
    const MPoint& start = loop.front();
    const bool planar = std::all_of(loop.begin(), loop.end(), [](const MPoint& p) { return p.inH2(1e-12); });

    const Isometry toStart = translationAlong(MPoint::origin(), start);
    Mat4 frame;  // columns b0 b1 b2 p
    for (int i = 0; i < 3; ++i) {
        frame.col(i) = toStart.apply(Vec4(Vec4::Unit(i)));
    }
    frame.col(3) = start.coords();

    Mat4 moved = frame;
    for (std::size_t e = 0; e + 1 < loop.size(); ++e) {
        for (int i = 0; i < 3; ++i) {
            const MTangent v = MTangent::at(loop[e], moved.col(i));
            moved.col(i) = parallelTransport(loop[e], loop[e + 1], v).vec();
        }
    }
    moved.col(3) = start.coords();

    Mat3 r;  // r(i, j) = <b'_i, b_j>
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            r(i, j) = minkowskiDot(moved.col(i), frame.col(j));
        }
    }

    Holonomy out;
    const double sinPart = 0.5 * Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)).norm();
    out.angle = std::atan2(sinPart, 0.5 * (r.trace() - 1.0));
    if (planar) {
        out.signedAngle = std::atan2(r(0, 1), r(0, 0));
        out.angle = std::abs(*out.signedAngle);
    }
    const Mat4& j = minkowskiMetric();
    out.rotation = Isometry::trusted(moved * j * frame.transpose() * j);
    return out;
}

// --- Sphere ------------------------------------------------------------------

SpherePoint SpherePoint::fromCoords(const Vec3& x) {
    if (!x.allFinite() || std::abs(x.norm() - 1.0) > tol::invariant) {
        throw GeometryError(ErrorKind::InvalidPoint, "sphere point must have unit norm");
    }
    return SpherePoint(x);
}

Vec3 sphereParallelTransport(const SpherePoint& a, const SpherePoint& b, const Vec3& v) {
    const Vec3& p = a.coords();
    const Vec3& q = b.coords();
    if (std::abs(p.dot(v)) > tol::invariant * std::max(1.0, v.norm())) {
        throw GeometryError(ErrorKind::Precondition, "vector is not tangent to the sphere at the start");
    }
    const double denom = 1.0 + p.dot(q);
    if (!(denom > 1e-12)) {
        throw GeometryError(ErrorKind::DegenerateTransport, "antipodal points have no unique arc");
    }
    return v - (v.dot(q) / denom) * (p + q);
}

SphereHolonomy sphereHolonomyOfLoop(std::span<const SpherePoint> loop) {
    if (loop.size() < 2 || (loop.front().coords() - loop.back().coords()).cwiseAbs().maxCoeff() > tol::invariant) {
        throw GeometryError(ErrorKind::Precondition, "loop must close on its start point");
    }
    const Vec3& a = loop.front().coords();
    int axis = 0;
    a.cwiseAbs().minCoeff(&axis);
    const Vec3 u = (Vec3::Unit(axis) - a[axis] * a).normalized();
    const Vec3 w = a.cross(u);
    Vec3 v = u;
    for (std::size_t e = 0; e + 1 < loop.size(); ++e) {
        v = sphereParallelTransport(loop[e], loop[e + 1], v);
    }
    SphereHolonomy out;
    out.signedAngle = std::atan2(v.dot(w), v.dot(u));
    out.angle = std::abs(out.signedAngle);
    return out;
}

// --- Models ------------------------------------------------------------------

std::string_view toString(Model model) {
    switch (model) {
        case Model::Klein: return "klein";
        case Model::Poincare: return "poincare";
        case Model::HalfSpace: return "halfspace";
    }
    return "klein";
}

Model parseModel(std::string_view text) {
    if (text == "klein") return Model::Klein;
    if (text == "poincare") return Model::Poincare;
    if (text == "halfspace" || text == "halfplane") return Model::HalfSpace;
    throw GeometryError(ErrorKind::Parse, "unknown model '" + std::string(text) + "'");
}

Vec3 projectToModel(const MPoint& p, Model model) {
    const Vec4& x = p.coords();
    switch (model) {
        case Model::Klein: return x.head<3>() / x[3];
        case Model::Poincare: return x.head<3>() / (1.0 + x[3]);
        case Model::HalfSpace: return Vec3(x[0], x[1], 1.0) / (x[3] - x[2]);
    }
    return {};
}

MPoint liftFromModel(const Vec3& q, Model model) {
    switch (model) {
        case Model::Klein: {
            const double r2 = q.squaredNorm();
            if (!(r2 < 1.0)) throw GeometryError(ErrorKind::InvalidPoint, "Klein point outside the open ball");
            const double s = 1.0 / std::sqrt(1.0 - r2);
            return MPoint::projected(Vec4(q[0] * s, q[1] * s, q[2] * s, s));
        }
        case Model::Poincare: {
            const double r2 = q.squaredNorm();
            if (!(r2 < 1.0)) throw GeometryError(ErrorKind::InvalidPoint, "Poincare point outside the open ball");
            const double s = 1.0 / (1.0 - r2);
            return MPoint::projected(Vec4(2 * q[0] * s, 2 * q[1] * s, 2 * q[2] * s, (1.0 + r2) * s));
        }
        case Model::HalfSpace: {
            const double h = q[2];
            if (!(h > 0.0)) throw GeometryError(ErrorKind::InvalidPoint, "half-space point needs positive height");
            const double sum = (h * h + q[0] * q[0] + q[1] * q[1]) / h;  // x4 + x3
            const double diff = 1.0 / h;                                 // x4 - x3
            return MPoint::projected(Vec4(q[0] / h, q[1] / h, 0.5 * (sum - diff), 0.5 * (sum + diff)));
        }
    }
    return MPoint::origin();
}

Vec2 projectToModel2d(const MPoint& p, Model model) {
    if (!p.inH2(1e-9)) {
        throw GeometryError(ErrorKind::Precondition, "point is not in the H^2 slice");
    }
    const Vec4& x = p.coords();
    switch (model) {
        case Model::Klein: return Vec2(x[0], x[1]) / x[3];
        case Model::Poincare: return Vec2(x[0], x[1]) / (1.0 + x[3]);
        case Model::HalfSpace: return Vec2(x[0], 1.0) / (x[3] - x[1]);
    }
    return {};
}

MPoint liftFromModel2d(const Vec2& q, Model model) {
    switch (model) {
        case Model::Klein:
        case Model::Poincare: return liftFromModel(Vec3(q[0], q[1], 0.0), model);
        case Model::HalfSpace: {
            const double h = q[1];
            if (!(h > 0.0)) throw GeometryError(ErrorKind::InvalidPoint, "half-plane point needs positive height");
            const double sum = (h * h + q[0] * q[0]) / h;  // x4 + x2
            const double diff = 1.0 / h;                   // x4 - x2
            return MPoint::projected(Vec4(q[0] / h, 0.5 * (sum - diff), 0.0, 0.5 * (sum + diff)));
        }
    }
    return MPoint::origin();
}

}  // namespace hyperspace
