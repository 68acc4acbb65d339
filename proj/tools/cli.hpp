#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gridruin::cli {

// Exit codes; stable across versions.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

// Runs one command (`args` excludes the program name). Records go to `out`
// (or --out), diagnostics and timing to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gridruin::cli
