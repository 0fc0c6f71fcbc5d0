#pragma once

#include <cstdint>
#include <iosfwd>

namespace edgelogdet::cli {

/// Deterministic identity suite behind `verify`. Prints one PASS/FAIL line per
/// check to `out` and returns the number of failures.
int run_verify_suite(std::uint64_t seed, std::ostream& out);

}  // namespace edgelogdet::cli
