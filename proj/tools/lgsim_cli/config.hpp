#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "lgsim/lg_analysis.hpp"

namespace lgsim::cli {

enum class Mode { quantum, hv_analytic, hv_mc, generic_check, invasiveness };
enum class OutputFormat { csv, json };

std::string to_string(Mode m);

struct RunConfig {
    Mode mode = Mode::quantum;
    double omega = 1.0;
    double t_min = 0.01;
    double t_max = 3.14159265358979323846;
    std::size_t n_points = 200;
    std::size_t n_beads = 100000;
    std::uint64_t seed = 42;
    bool with_measurement = true;
    OutputFormat output_format = OutputFormat::csv;
    std::string output_path;  // empty: standard output
    bool plot = false;
    bool self_check = false;
    unsigned workers = 1;
    InterventionChoice intervention = InterventionChoice::measure_q;
    double t0 = 3.14159265358979323846 / 2;
    bool t0_set = false;
};

inline constexpr std::size_t kMinMonteCarloBeads = 100;

/// Raised for any invalid invocation; the message names the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses flat `key = value` text. Blank lines and lines starting with '#'
/// are ignored. Keys are flag names without the leading dashes.
std::map<std::string, std::string> parse_key_value_text(const std::string& text,
                                                        const std::string& origin);

/// Applies one key/value pair to `cfg`; throws ConfigError naming the key.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Checks cross-field invariants; throws ConfigError.
void validate(const RunConfig& cfg);

/// Result of command-line parsing: either a config or an early exit (help).
struct ParseOutcome {
    RunConfig config;
    bool exit_now = false;
    int exit_code = 0;
    std::string message;
};

/// Flags override values from `--config <file>`; unset keys keep defaults.
ParseOutcome parse_config(const std::vector<std::string>& args);

}  // namespace lgsim::cli
