#pragma once

// Command-line front end. Subcommands: falsify-single, falsify-multi,
// metrics, plan, simulate.
//
// Exit codes: 0 when the run completed (whatever the verdict), 1 on a
// numeric failure, 2 on usage, input or configuration errors. Errors are
// also written to stderr as a one-line JSON object.

#include <ostream>

namespace falsifier {

// Output directory precedence: --out, then this variable, then
// kDefaultOutDir.
inline constexpr const char* kOutDirEnv = "FALSIFIER_OUT_DIR";
inline constexpr const char* kDefaultOutDir = "falsifier_out";

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace falsifier
