#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace serialbench::cli {

// Exit codes: 0 success, 1 internal failure, 2 usage or validation error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;

// Entry point for the `serialbench` executable. Results go to `out`, meters
// and diagnostics to `err`.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

// Same, with args excluding the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace serialbench::cli
