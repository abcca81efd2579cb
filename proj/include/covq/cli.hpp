#pragma once

#include <iosfwd>

namespace covq::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;    ///< bad argument or config file
inline constexpr int kExitInput = 3;    ///< unreadable or malformed input data
inline constexpr int kExitNumeric = 4;  ///< numeric failure or failed self-check

/// Entry point behind the `covq` executable. Subcommands: simulate, detect,
/// exponent, bound, campaign, sweep.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace covq::cli
