#pragma once

#include <iosfwd>

namespace srmetro::cli {

/// Parses argv and runs one subcommand. Returns the process exit code:
/// 0 success, 1 runtime or tolerance failure, 2 invalid input.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace srmetro::cli
