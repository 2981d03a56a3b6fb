#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace olfact::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 2;
inline constexpr int kNoConvergence = 3;
inline constexpr int kConfigError = 4;
inline constexpr int kInternalError = 1;

/// Runs one `olfact` invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace olfact::cli
