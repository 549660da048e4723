#pragma once

#include <iosfwd>

namespace phaseslide {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitInvariant = 3 };

/// Command-line entry point: simulate, certify, sweep, estimate-csh, verify.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace phaseslide
