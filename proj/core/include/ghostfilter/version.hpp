#pragma once

#include <string_view>

namespace ghostfilter {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace ghostfilter
