#pragma once

#include <ostream>

namespace lossq::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Parses argv and runs one subcommand. Reports go to `out` (or the --out
/// file), diagnostics to `err`. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lossq::cli
