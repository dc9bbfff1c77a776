#pragma once

#include <ostream>

namespace logcc::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_nonconvergence = 2;

/// Runs one subcommand. Grid-function inputs hold potentials phi = -log f (JSON, or 1D
/// two-column CSV); measures are CSV. Returns 0 on success, 1 on bad input or a violated
/// precondition, 2 when the solver does not converge.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Applies LOGCC_THREADS (a positive integer) to the OpenMP runtime; ignores other values.
void apply_thread_limit();

}  // namespace logcc::cli
