#pragma once

#include <string>
#include <string_view>

namespace hyperspace {

/// The three worlds a camera can move through.
enum class Space { H3, H2E, Euclidean };

std::string_view toString(Space space);
Space parseSpace(std::string_view text);

}  // namespace hyperspace
