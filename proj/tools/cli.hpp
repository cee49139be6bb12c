#pragma once

// Command-line front end: solve, check, encode-graph, replay, prove, bench.

#include <chrono>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace scanw::cli {

/// Process exit codes.
enum Exit : int {
  kSolved = 0,        // solved, verified or verification skipped
  kVerifyFailed = 1,  // solved but the witness failed verification (or could not be built)
  kNoDerivation = 2,  // no derivation within the limits
  kInputError = 3,    // unreadable or ill-formed input
};

/// "10s", "250ms", "2m" or a bare number of seconds.
std::optional<std::chrono::milliseconds> parse_duration(const std::string& text);

/// One bench row (per problem file).
struct BenchRow {
  std::string problem;
  int input_size = 0;
  bool derived = false;
  int length = 0;
  double scan_ms = 0;
  double witness_ms = 0;
  int witness_size = 0;
  std::string verification;  // PASS / FAIL / UNKNOWN / skipped / error text
};

/// Runs the tool on argv (argv[0] is the program name). Output goes to
/// `out`, diagnostics to `err`. The default timeout is read from the
/// SCANW_TIMEOUT environment variable when set.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scanw::cli
