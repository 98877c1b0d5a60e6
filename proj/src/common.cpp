#include <string>

#include "hyperspace/errors.hpp"
#include "hyperspace/space.hpp"

namespace hyperspace {

const char* toString(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidPoint: return "invalid point";
        case ErrorKind::Precondition: return "precondition violated";
        case ErrorKind::DegenerateTransport: return "degenerate transport";
        case ErrorKind::UnsupportedGeometry: return "unsupported geometry";
        case ErrorKind::Parse: return "parse error";
    }
    return "error";
}

std::string_view toString(Space space) {
    switch (space) {
        case Space::H3: return "h3";
        case Space::H2E: return "h2e";
        case Space::Euclidean: return "euclidean";
    }
    return "h3";
}

Space parseSpace(std::string_view text) {
    if (text == "h3") return Space::H3;
    if (text == "h2e") return Space::H2E;
    if (text == "euclidean") return Space::Euclidean;
    throw GeometryError(ErrorKind::Parse, "unknown space '" + std::string(text) + "' (expected h3, h2e or euclidean)");
}

}  // namespace hyperspace
