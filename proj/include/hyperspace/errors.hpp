#pragma once

#include <stdexcept>
#include <string>

namespace hyperspace {

enum class ErrorKind {
    InvalidPoint,
    Precondition,
    DegenerateTransport,
    UnsupportedGeometry,
    Parse,
};

const char* toString(ErrorKind kind);

/// Thrown by every engine operation whose inputs violate a contract.
class GeometryError : public std::runtime_error {
public:
    GeometryError(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(toString(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

namespace tol {
inline constexpr double invariant = 1e-9;   // point / tangent / frame checks
inline constexpr double isometry = 1e-8;    // M^T J M = J
inline constexpr double clamp = 1e-7;       // input clamping (e.g. -<p,q> slightly below 1)
inline constexpr double oracle = 1e-6;      // agreement with numeric oracles
}  // namespace tol

}  // namespace hyperspace
