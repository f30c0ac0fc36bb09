#pragma once

#include <string_view>

namespace gemlaw {

inline constexpr std::string_view kToolName = "gemlaw";
inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace gemlaw
