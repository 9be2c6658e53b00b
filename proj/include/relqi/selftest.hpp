#pragma once

#include <cstdint>
#include <iosfwd>

namespace relqi {

/// Runs a fast battery of invariant checks, printing one PASS/FAIL line per
/// check. Returns the number of failed checks.
int run_selftest(std::ostream& out, std::uint64_t seed);

}  // namespace relqi
