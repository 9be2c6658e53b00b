#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "relqi/error.hpp"

namespace relqi::cli {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::uint64_t kDefaultSeed = 20040101;
/// Largest number of grid points a sweep may request.
inline constexpr std::size_t kMaxSweepPoints = 10'000;

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitDomain = 2, kExitAccuracy = 3 };

int exit_code_for(ErrorCode code);

/// Runs one command line (without the program name). Reports go to `out`, or
/// to the --output file; diagnostics go to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Formats a double with 17 significant digits, independent of locale.
std::string format_double(double x);

}  // namespace relqi::cli
