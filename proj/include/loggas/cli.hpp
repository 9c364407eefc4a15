#pragma once

namespace loggas::cli {

// Parses argv and dispatches to one of the subcommands (electro, asym,
// check, mc, verify). Returns the process exit status: 0 success, 2 usage
// or validation error, 3 infeasible parameters, 4 accuracy failure, 5
// failed verification.
int run_cli(int argc, const char* const* argv);

}  // namespace loggas::cli
