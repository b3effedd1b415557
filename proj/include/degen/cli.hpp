#pragma once
// Command-line front end: solve, estimate, table, oracle, sclimit.  Every
// run writes its artifacts plus a manifest.json recording content hashes,
// so reruns can be compared byte for byte.

#include <string>
#include <vector>

namespace degen {

inline constexpr const char* kCliVersion = "0.1.0";

/// Runs the tool on the given arguments (program name excluded).
/// Returns the process exit code: 0 success, 1 usage error, 2 numerical or
/// I/O failure.
int run_cli(const std::vector<std::string>& args);

}  // namespace degen
