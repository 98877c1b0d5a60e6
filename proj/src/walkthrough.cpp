#include "hyperspace/walkthrough.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

namespace hyperspace {

namespace {

Mat4 embedRotation(const Mat3& r) {
    Mat4 m = Mat4::Identity();
    m.topLeftCorner<3, 3>() = r;
    return m;
}

// Gram-Schmidt on the columns, keeping their order.
Mat3 orthonormalized(const Mat3& m) {
    Mat3 out = m;
    for (int c = 0; c < 3; ++c) {
        Vec3 v = out.col(c);
        for (int i = 0; i < c; ++i) {
            v -= v.dot(out.col(i)) * out.col(i);
        }
        out.col(c) = v.normalized();
    }
    return out;
}

double orthogonalDefect(const Mat3& m) { return (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff(); }

// Rotation angle of a 3x3 rotation matrix, stable near 0 and pi.
double rotationAngle(const Mat3& r) {
    const double s = 0.5 * Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)).norm();
    return std::atan2(s, 0.5 * (r.trace() - 1.0));
}

Mat4 affineInverse(const Mat4& m) {
    Mat4 out = Mat4::Identity();
    const Mat3 rt = m.topLeftCorner<3, 3>().transpose();
    out.topLeftCorner<3, 3>() = rt;
    out.block<3, 1>(0, 3) = -rt * m.block<3, 1>(0, 3);
    return out;
}

// Rotation of (h e1, z, h e2) coordinates induced by h2Rotation(angle).
Mat3 headingRotation(double angle) { return localRotation(Turn::Yaw, angle); }

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

std::string_view toString(Axis axis) {
    switch (axis) {
        case Axis::Right: return "right";
        case Axis::Up: return "up";
        case Axis::Forward: return "forward";
    }
    return "forward";
}

std::string_view toString(Turn turn) {
    switch (turn) {
        case Turn::Yaw: return "yaw";
        case Turn::Pitch: return "pitch";
        case Turn::Roll: return "roll";
    }
    return "yaw";
}

Command Command::translate(Axis axis, double length) {
    if (!std::isfinite(length)) throw GeometryError(ErrorKind::Precondition, "non-finite translation");
    Command c;
    c.kind = Kind::Translate;
    c.axis = axis;
    c.amount = length;
    return c;
}

Command Command::rotate(Turn turn, double radians) {
    if (!std::isfinite(radians)) throw GeometryError(ErrorKind::Precondition, "non-finite rotation");
    Command c;
    c.kind = Kind::Rotate;
    c.turn = turn;
    c.amount = radians;
    return c;
}

std::string Command::str() const {
    std::ostringstream out;
    out.precision(17);
    if (kind == Kind::Translate) {
        out << "T " << toString(axis) << ' ' << amount;
    } else {
        out << "R " << toString(turn) << ' ' << amount;
    }
    return out.str();
}

Mat3 localRotation(Turn turn, double radians) {
    const double c = std::cos(radians);
    const double s = std::sin(radians);
    Mat3 r;
    switch (turn) {
        case Turn::Yaw:  // forward -> cos f - sin r
            r << c, 0, -s,
                 0, 1, 0,
                 s, 0, c;
            break;
        case Turn::Pitch:  // forward -> cos f + sin u
            r << 1, 0, 0,
                 0, c, s,
                 0, -s, c;
            break;
        case Turn::Roll:  // up -> cos u + sin r
            r << c, s, 0,
                 -s, c, 0,
                 0, 0, 1;
            break;
    }
    return r;
}

// --- CameraFrame ---------------------------------------------------------------

CameraFrame CameraFrame::start(Space space) {
    CameraFrame c;
    c.space_ = space;
    return c;
}

CameraFrame CameraFrame::placed(Space space, const Vec3& offset, double yaw, double pitch) {
    CameraFrame c = start(space);
    const double len = offset.norm();
    if (len > 0.0) c = c.translated(offset / len, len);
    return c.rotated(localRotation(Turn::Yaw, yaw)).rotated(localRotation(Turn::Pitch, pitch));
}

CameraFrame CameraFrame::fromPose(Space space, const Mat4& pose) {
    if (space == Space::H2E) {
        throw GeometryError(ErrorKind::Precondition, "H^2 x E cameras are built from a product isometry");
    }
    CameraFrame c = start(space);
    if (space == Space::H3) {
        c.pose_ = Isometry::fromMatrix(pose).matrix();
    } else {
        if (orthogonalDefect(pose.topLeftCorner<3, 3>()) > tol::isometry ||
            pose.row(3) != Eigen::RowVector4d(0, 0, 0, 1)) {
            throw GeometryError(ErrorKind::Precondition, "pose is not a rigid motion");
        }
        c.pose_ = pose;
    }
    return c;
}

CameraFrame CameraFrame::fromProduct(const ProductIsometry& pose, const Mat3& tilt) {
    if (orthogonalDefect(tilt) > tol::isometry || tilt.determinant() < 0) {
        throw GeometryError(ErrorKind::Precondition, "tilt is not a rotation");
    }
    CameraFrame c = start(Space::H2E);
    c.product_ = pose;
    c.tilt_ = tilt;
    return c;
}

Mat4 CameraFrame::pose() const { return space_ == Space::H2E ? product_.toMatrix4() : pose_; }

Vec4 CameraFrame::position() const {
    if (space_ != Space::H2E) return pose_.col(3);
    const Vec3 h = product_.hPart().col(2);
    return {h[0], h[1], product_.zShift(), h[2]};
}

MPoint CameraFrame::point() const {
    if (space_ != Space::H3) throw GeometryError(ErrorKind::Precondition, "not an H^3 camera");
    return MPoint::projected(pose_.col(3));
}

ProductPoint CameraFrame::productPoint() const {
    if (space_ != Space::H2E) throw GeometryError(ErrorKind::Precondition, "not an H^2 x E camera");
    return ProductPoint::make(product_.hPart().col(2), product_.zShift());
}

std::array<Vec4, 3> CameraFrame::axes() const {
    std::array<Vec4, 3> out;
    if (space_ != Space::H2E) {
        for (int i = 0; i < 3; ++i) out[static_cast<std::size_t>(i)] = pose_.col(i);
        return out;
    }
    const Mat3& h = product_.hPart();
    const std::array<Vec4, 3> basis = {Vec4(h(0, 0), h(1, 0), 0.0, h(2, 0)),
                                       Vec4(0.0, 0.0, product_.zFlip() ? -1.0 : 1.0, 0.0),
                                       Vec4(h(0, 1), h(1, 1), 0.0, h(2, 1))};
    for (int k = 0; k < 3; ++k) {
        Vec4 v = Vec4::Zero();
        for (int j = 0; j < 3; ++j) v += tilt_(j, k) * basis[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(k)] = v;
    }
    return out;
}

double CameraFrame::orthonormalityDefect() const {
    switch (space_) {
        case Space::H3: return lorentzDefect(pose_);
        case Space::Euclidean: return orthogonalDefect(pose_.topLeftCorner<3, 3>());
        case Space::H2E: return std::max(h2LorentzDefect(product_.hPart()), orthogonalDefect(tilt_));
    }
    return 0.0;
}

double CameraFrame::distanceTo(const CameraFrame& other) const {
    if (other.space_ != space_) throw GeometryError(ErrorKind::Precondition, "cameras live in different spaces");
    switch (space_) {
        case Space::H3: return distance(Vec4(pose_.col(3)), Vec4(other.pose_.col(3)));
        case Space::Euclidean: return (pose_.block<3, 1>(0, 3) - other.pose_.block<3, 1>(0, 3)).norm();
        case Space::H2E: return productDistance(productPoint(), other.productPoint());
    }
    return 0.0;
}

double CameraFrame::frameDifference(const CameraFrame& other) const {
    const auto a = axes();
    const auto b = other.axes();
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i) worst = std::max(worst, (a[i] - b[i]).cwiseAbs().maxCoeff());
    return worst;
}

CameraFrame CameraFrame::translated(const Vec3& localDirection, double length) const {
    if (!(std::abs(localDirection.norm() - 1.0) <= tol::invariant) || !std::isfinite(length)) {
        throw GeometryError(ErrorKind::Precondition, "translation needs a unit direction and finite length");
    }
    CameraFrame c = *this;
    switch (space_) {
        case Space::H3:
            c.pose_ = pose_ * translationAtOrigin(localDirection, length).matrix();
            break;
        case Space::Euclidean: {
            Mat4 t = Mat4::Identity();
            t.block<3, 1>(0, 3) = length * localDirection;
            c.pose_ = pose_ * t;
            break;
        }
        case Space::H2E: {
            const Vec3 d = tilt_ * localDirection;  // (h e1, z, h e2) coordinates
            const double horizontal = std::hypot(d[0], d[2]);
            Mat3 h = Mat3::Identity();
            if (horizontal > 0.0) h = h2Translation(Vec2(d[0], d[2]) / horizontal, length * horizontal);
            c.product_ = product_ * ProductIsometry::horizontal(h) * ProductIsometry::vertical(length * d[1]);
            break;
        }
    }
    return c.renormalized();
}

CameraFrame CameraFrame::rotated(const Mat3& localRotation) const {
    CameraFrame c = *this;
    if (space_ != Space::H2E) {
        c.pose_ = pose_ * embedRotation(localRotation);
        return c.renormalized();
    }
    c.tilt_ = tilt_ * localRotation;
    // Move the heading out of the tilt: forward's horizontal part must point
    // along h e2. With forward vertical the up axis carries the heading.
    const Vec3 f = c.tilt_.col(2);
    Vec2 heading(f[0], f[2]);
    if (heading.norm() < 1e-12) {
        const Vec3 u = c.tilt_.col(1);
        heading = f[1] > 0 ? Vec2(-u[0], -u[2]) : Vec2(u[0], u[2]);
    }
    const double angle = std::atan2(-heading[0], heading[1]);
    if (angle != 0.0) {
        c.product_ = c.product_ * ProductIsometry::horizontal(h2Rotation(angle));
        c.tilt_ = headingRotation(-angle) * c.tilt_;
    }
    return c.renormalized();
}

CameraFrame CameraFrame::renormalized(double threshold) const {
    CameraFrame c = *this;
    switch (space_) {
        case Space::H3:
            if (lorentzDefect(pose_) > threshold) c.pose_ = gramSchmidtMinkowski(pose_);
            break;
        case Space::Euclidean:
            if (orthogonalDefect(pose_.topLeftCorner<3, 3>()) > threshold) {
                c.pose_.topLeftCorner<3, 3>() = orthonormalized(pose_.topLeftCorner<3, 3>());
            }
            break;
        case Space::H2E:
            c.product_ = product_.renormalized(threshold);
            if (orthogonalDefect(tilt_) > threshold) c.tilt_ = orthonormalized(tilt_);
            break;
    }
    return c;
}

CameraFrame applyCommand(const CameraFrame& camera, const Command& command) {
    if (command.kind == Command::Kind::Translate) {
        if (command.amount == 0.0) return camera;
        return camera.translated(Vec3::Unit(static_cast<int>(command.axis)), command.amount);
    }
    if (command.amount == 0.0) return camera;
    return camera.rotated(localRotation(command.turn, command.amount));
}

// --- Scripts -------------------------------------------------------------------

std::vector<Command> parseScript(const std::string& text) {
    std::vector<Command> out;
    std::istringstream in(text);
    std::string line;
    int lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream words(line);
        std::string kind;
        std::string axis;
        std::string value;
        if (!(words >> kind)) continue;
        std::string extra;
        if (!(words >> axis >> value) || (words >> extra)) {
            throw GeometryError(ErrorKind::Parse, "line " + std::to_string(lineNo) + ": expected `T|R axis value`");
        }
        double amount = 0.0;
        try {
            std::size_t used = 0;
            amount = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw GeometryError(ErrorKind::Parse, "line " + std::to_string(lineNo) + ": bad number '" + value + "'");
        }
        kind = lower(kind);
        axis = lower(axis);
        if (kind == "t" || kind == "translate") {
            if (axis == "right") {
                out.push_back(Command::translate(Axis::Right, amount));
            } else if (axis == "left") {
                out.push_back(Command::translate(Axis::Right, -amount));
            } else if (axis == "up") {
                out.push_back(Command::translate(Axis::Up, amount));
            } else if (axis == "down") {
                out.push_back(Command::translate(Axis::Up, -amount));
            } else if (axis == "forward") {
                out.push_back(Command::translate(Axis::Forward, amount));
            } else if (axis == "backward" || axis == "back") {
                out.push_back(Command::translate(Axis::Forward, -amount));
            } else {
                throw GeometryError(ErrorKind::Parse, "line " + std::to_string(lineNo) + ": unknown axis '" + axis + "'");
            }
        } else if (kind == "r" || kind == "rotate") {
            if (axis == "yaw") {
                out.push_back(Command::rotate(Turn::Yaw, amount));
            } else if (axis == "pitch") {
                out.push_back(Command::rotate(Turn::Pitch, amount));
            } else if (axis == "roll") {
                out.push_back(Command::rotate(Turn::Roll, amount));
            } else {
                throw GeometryError(ErrorKind::Parse, "line " + std::to_string(lineNo) + ": unknown turn '" + axis + "'");
            }
        } else {
            throw GeometryError(ErrorKind::Parse, "line " + std::to_string(lineNo) + ": unknown command '" + kind + "'");
        }
    }
    return out;
}

NetIsometry netMotion(const CameraFrame& from, const CameraFrame& to) {
    if (from.space() != to.space()) throw GeometryError(ErrorKind::Precondition, "cameras live in different spaces");
    switch (from.space()) {
        case Space::H3: {
            const Mat4& j = minkowskiMetric();
            return Isometry::trusted(to.pose() * j * from.pose().transpose() * j);
        }
        case Space::Euclidean: return RigidMotion{to.pose() * affineInverse(from.pose())};
        case Space::H2E: return to.productPose() * from.productPose().inverse();
    }
    return Isometry();
}

MotionClass classify(const RigidMotion& m, double tolerance) {
    const Mat3 r = m.matrix.topLeftCorner<3, 3>();
    const Vec3 t = m.matrix.block<3, 1>(0, 3);
    MotionClass out;
    if ((r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tolerance) {
        if (t.norm() <= tolerance) return out;
        out.kind = MotionKind::Translation;
        out.translationLength = t.norm();
        return out;
    }
    out.angle = rotationAngle(r);
    Eigen::JacobiSVD<Mat3> svd(r - Mat3::Identity(), Eigen::ComputeFullV);
    const Vec3 axis = svd.matrixV().col(2);
    if (std::abs(t.dot(axis)) <= tolerance) {
        out.kind = MotionKind::Rotation;
        const Vec3 centre = (Mat3::Identity() - r).completeOrthogonalDecomposition().solve(t);
        out.fixedPoint = Vec4(centre[0], centre[1], centre[2], 1.0);
    } else {
        out.kind = MotionKind::Other;
        out.translationLength = std::abs(t.dot(axis));
    }
    return out;
}

MotionClass classify(const NetIsometry& m, double tolerance) {
    return std::visit([tolerance](const auto& x) { return hyperspace::classify(x, tolerance); }, m);
}

double holonomyAngle(const CameraFrame& start, const CameraFrame& current) {
    const auto a = start.axes();
    const auto b = current.axes();
    Mat3 r;
    if (start.space() == Space::Euclidean) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) r(i, j) = b[i].head<3>().dot(a[j].head<3>());
        }
        return rotationAngle(r);
    }
    // For H^2 x E the horizontal slots {0, 1, 3} form an H^3 point with x3 = 0;
    // the transvection between two such points fixes slot 2, and the product
    // metric in this layout is the Minkowski form.
    Vec4 p = start.position();
    Vec4 q = current.position();
    if (start.space() == Space::H2E) {
        p[2] = 0.0;
        q[2] = 0.0;
    }
    const Isometry t = translationAlong(MPoint::projected(p), MPoint::projected(q));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) r(i, j) = minkowskiDot(b[i], t.apply(a[j]));
    }
    return rotationAngle(r);
}

Eigen::Vector2i gridReplay(const std::vector<Command>& script) {
    Eigen::Vector2i pos(0, 0);
    Eigen::Vector2i heading(0, 1);
    for (const Command& c : script) {
        if (c.kind == Command::Kind::Rotate) {
            if (c.turn != Turn::Yaw) continue;
            const long quarters = std::lround(c.amount / (std::numbers::pi / 2.0));
            const int left = static_cast<int>(((quarters % 4) + 4) % 4);
            for (int k = 0; k < left; ++k) heading = Eigen::Vector2i(-heading[1], heading[0]);
            continue;
        }
        if (c.amount == 0.0 || c.axis == Axis::Up) continue;
        const int sign = c.amount > 0 ? 1 : -1;
        const Eigen::Vector2i right(heading[1], -heading[0]);
        pos += sign * (c.axis == Axis::Forward ? heading : right);
    }
    return pos;
}

namespace {

WalkReport finishReport(const CameraFrame& start, const CameraFrame& end, const std::vector<Command>& executed) {
    WalkReport r;
    r.finalFrame = end;
    r.netIsometry = netMotion(start, end);
    r.classification = classify(r.netIsometry);
    r.closureResidual = std::max(start.distanceTo(end), start.frameDifference(end));
    r.closed = r.closureResidual < kClosureTolerance;
    r.physicalEndpoint = gridReplay(executed);
    r.physicalSquaresAway = std::abs(r.physicalEndpoint[0]) + std::abs(r.physicalEndpoint[1]);
    return r;
}

}  // namespace

WalkReport runScript(const CameraFrame& start, const std::vector<Command>& script) {
    CameraFrame c = start;
    for (const Command& cmd : script) c = applyCommand(c, cmd);
    WalkReport r = finishReport(start, c, script);
    r.movesMade = static_cast<int>(script.size());
    return r;
}

WalkReport squareWalk(double stepLength, double turn, Space space, int maxMoves) {
    if (!(stepLength > 0.0) || maxMoves < 1 || !std::isfinite(turn)) {
        throw GeometryError(ErrorKind::Precondition, "square walk needs a positive step and at least one move");
    }
    const CameraFrame start = CameraFrame::start(space);
    CameraFrame c = start;
    std::vector<Command> executed;
    int moves = 0;
    bool closed = false;
    while (moves < maxMoves && !closed) {
        executed.push_back(Command::rotate(Turn::Yaw, turn));
        executed.push_back(Command::translate(Axis::Forward, stepLength));
        c = applyCommand(applyCommand(c, executed[executed.size() - 2]), executed.back());
        ++moves;
        closed = std::max(start.distanceTo(c), start.frameDifference(c)) < kClosureTolerance;
    }
    WalkReport r = finishReport(start, c, executed);
    r.movesMade = moves;
    if (r.closed) r.movesToClose = moves;
    return r;
}

double solveClosingStep(int moves, double turn, double tolerance) {
    if (moves < 1 || !(turn > 0.0) || !(turn < std::numbers::pi)) {
        throw GeometryError(ErrorKind::Precondition, "closing step needs moves >= 1 and a turn in (0, pi)");
    }
    const double target = 2.0 * std::numbers::pi / moves;
    if (!(target < turn)) {
        throw GeometryError(ErrorKind::Precondition,
                            "no hyperbolic step closes this walk: each move already turns by at most the target");
    }
    // One move rotates about some point by an angle that falls from `turn`
    // at step 0 to 0 where the move becomes parabolic.
    auto moveAngle = [turn](double s) {
        const Mat3 move = h2Rotation(turn) * h2Translation(Vec2(0.0, 1.0), s);
        const MotionClass m = classifyLorentz(move);
        return m.kind == MotionKind::Rotation ? m.angle : 0.0;
    };
    const double c = std::cos(turn);
    double lo = 0.0;
    double hi = std::acosh((3.0 - c) / (1.0 + c));
    for (int i = 0; i < 200 && hi - lo > tolerance; ++i) {
        const double mid = 0.5 * (lo + hi);
        (moveAngle(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace hyperspace
