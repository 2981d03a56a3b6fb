#pragma once

#include <string_view>

namespace olfact {

inline constexpr std::string_view kToolName = "olfact";
inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace olfact
