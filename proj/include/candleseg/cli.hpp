#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace candleseg {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitProcessing = 2;

/// Entry point of the `candleseg` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace candleseg
