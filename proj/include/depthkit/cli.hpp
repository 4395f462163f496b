#pragma once

#include <iosfwd>

namespace depthkit {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitDegenerate = 3;

/// Entry point for `depthkit eval|experiment|bench`. Diagnostics go to `err`,
/// the one-line summary (or help text) to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace depthkit
