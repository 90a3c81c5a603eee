#pragma once

#include "primelab/config.hpp"

#include <iosfwd>

namespace primelab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitViolation = 3;

// Runs one subcommand. Results go to cfg.output (or `out` for "-"),
// diagnostics to `err`. Library errors are mapped to exit statuses:
// bad input -> 1, quadrature failure -> 2, property violation found -> 3.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace primelab
