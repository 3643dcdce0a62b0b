#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace lgsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNumerical = 3;

inline const std::vector<std::string> kCsvColumns{"mode", "omega", "t",    "e12",    "e23",
                                                  "e34",  "e14",   "se12", "se23",   "se34",
                                                  "se14", "l_value", "violated"};

/// Locale-independent shortest form with 17 significant digits.
std::string format_real(double x);

/// Runs the configured mode. Records go to `out` unless cfg.output_path is
/// set; the summary line, plot and diagnostics go to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command-line entry point (parse + run); used by main and tests.
int run_command_line(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lgsim::cli
