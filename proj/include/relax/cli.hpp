#pragma once

#include <iosfwd>

namespace relax {

/// Entry point of the `relax` command-line tool: subcommands run, sweep, reference.
/// Returns the process exit code; diagnostics and the per-iteration log go to err.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relax
