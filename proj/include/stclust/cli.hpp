#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stclust::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitIo = 3;

/// Runs the command line (args excludes the program name). Output and
/// diagnostics go to the given streams; the return value is the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stclust::cli
