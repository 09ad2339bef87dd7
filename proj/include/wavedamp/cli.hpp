#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wavedamp::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kPole = 3,
  kNormDiverged = 4,
  kNoConvergence = 5,
};

// Runs one subcommand (bode, norm, sweep, optimize, compare). `args`
// excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Shortest round-trip decimal form; "inf" / "-inf" / "nan" for non-finite.
std::string format_double(double value);

// RFC 3339 UTC. Honors SOURCE_DATE_EPOCH so repeated runs can be
// byte-identical.
std::string utc_timestamp();

}  // namespace wavedamp::cli
