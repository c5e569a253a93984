#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mts::cli {

inline constexpr const char* kVersion = "2.0.0";

/// Exit status for IO, parse, configuration and input-shape errors.
inline constexpr int kErrorExit = 2;

/// Runs the command line `args` (args[0] is the program name). Normal output
/// goes to `out`, diagnostics to `err`; returns the process exit status.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mts::cli
