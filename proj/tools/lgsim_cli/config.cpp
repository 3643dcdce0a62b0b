#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"

namespace lgsim::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end || !std::isfinite(out)) {
        throw ConfigError("invalid value for '" + key + "': '" + value + "' is not a finite number");
    }
    return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("invalid value for '" + key + "': '" + value +
                          "' is not a non-negative integer");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    std::string v = value;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("invalid value for '" + key + "': '" + value + "' is not a boolean");
}

}  // namespace

std::string to_string(Mode m) {
    switch (m) {
        case Mode::quantum: return "quantum";
        case Mode::hv_analytic: return "hv-analytic";
        case Mode::hv_mc: return "hv-mc";
        case Mode::generic_check: return "generic-check";
        case Mode::invasiveness: return "invasiveness";
    }
    return "?";
}

std::map<std::string, std::string> parse_key_value_text(const std::string& text,
                                                        const std::string& origin) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed line '" + t +
                              "' (expected key=value)");
        }
        std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (key.empty()) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
        }
        if (out.count(key)) {
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        out[key] = value;
    }
    return out;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "mode") {
        if (value == "quantum") cfg.mode = Mode::quantum;
        else if (value == "hv-analytic") cfg.mode = Mode::hv_analytic;
        else if (value == "hv-mc") cfg.mode = Mode::hv_mc;
        else if (value == "generic-check") cfg.mode = Mode::generic_check;
        else if (value == "invasiveness") cfg.mode = Mode::invasiveness;
        else throw ConfigError("invalid value for 'mode': '" + value + "'");
    } else if (key == "omega") {
        cfg.omega = parse_real(key, value);
    } else if (key == "t-min") {
        cfg.t_min = parse_real(key, value);
    } else if (key == "t-max") {
        cfg.t_max = parse_real(key, value);
    } else if (key == "points") {
        cfg.n_points = parse_unsigned(key, value);
    } else if (key == "beads") {
        cfg.n_beads = parse_unsigned(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_unsigned(key, value);
    } else if (key == "measure") {
        cfg.with_measurement = parse_bool(key, value);
    } else if (key == "no-measure") {
        cfg.with_measurement = !parse_bool(key, value);
    } else if (key == "format") {
        if (value == "csv") cfg.output_format = OutputFormat::csv;
        else if (value == "json") cfg.output_format = OutputFormat::json;
        else throw ConfigError("invalid value for 'format': '" + value + "'");
    } else if (key == "out") {
        cfg.output_path = value;
    } else if (key == "plot") {
        cfg.plot = parse_bool(key, value);
    } else if (key == "self-check") {
        cfg.self_check = parse_bool(key, value);
    } else if (key == "workers") {
        const auto w = parse_unsigned(key, value);
        if (w == 0 || w > 1024) throw ConfigError("invalid value for 'workers': must be in [1, 1024]");
        cfg.workers = static_cast<unsigned>(w);
    } else if (key == "intervention") {
        if (value == "measure") cfg.intervention = InterventionChoice::measure_q;
        else if (value == "phantom") cfg.intervention = InterventionChoice::phantom_permutation;
        else if (value == "none") cfg.intervention = InterventionChoice::none;
        else throw ConfigError("invalid value for 'intervention': '" + value + "'");
    } else if (key == "t0") {
        cfg.t0 = parse_real(key, value);
        cfg.t0_set = true;
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

void validate(const RunConfig& cfg) {
    if (!(cfg.omega > 0.0)) throw ConfigError("invalid value for 'omega': must be > 0");
    if (!(cfg.t_min > 0.0)) throw ConfigError("invalid value for 't-min': must be > 0");
    if (!(cfg.t_max > cfg.t_min)) throw ConfigError("invalid value for 't-max': must exceed t-min");
    if (cfg.n_points < 2) throw ConfigError("invalid value for 'points': must be >= 2");
    if (cfg.n_beads < 1) throw ConfigError("invalid value for 'beads': must be >= 1");
    if (cfg.mode == Mode::hv_mc && cfg.n_beads < kMinMonteCarloBeads) {
        throw ConfigError("invalid value for 'beads': hv-mc requires at least " +
                          std::to_string(kMinMonteCarloBeads) + " beads");
    }
    if (cfg.mode == Mode::invasiveness && !(cfg.t0 >= 0.0)) {
        throw ConfigError("invalid value for 't0': must be >= 0");
    }
}

ParseOutcome parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Leggett-Garg simulator: quantum predictions, abacus hidden-variable model, "
                 "invasiveness reports",
                 "lgsim"};
    app.set_version_flag("--version", "lgsim 0.1.0");

    // Everything is captured as text and funnelled through apply_setting so
    // that flags and config-file entries share one parser.
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> opts;
    const std::vector<std::pair<std::string, std::string>> valued{
        {"mode", "quantum | hv-analytic | hv-mc | generic-check | invasiveness"},
        {"omega", "Rabi frequency (> 0)"},
        {"t-min", "first protocol step t (> 0)"},
        {"t-max", "last protocol step t"},
        {"points", "number of grid points (>= 2)"},
        {"beads", "number of beads (hv-mc needs >= 100)"},
        {"seed", "64-bit seed for hv-mc"},
        {"format", "csv | json"},
        {"out", "output file (default: standard output)"},
        {"workers", "worker threads for Monte Carlo"},
        {"intervention", "invasiveness mode: measure | phantom | none"},
        {"t0", "invasiveness mode: intervention time"},
    };
    for (const auto& [key, help] : valued) {
        opts[key] = app.add_option("--" + key, raw[key], help);
    }
    bool measure = false, no_measure = false, plot = false, self_check = false;
    auto* opt_measure = app.add_flag("--measure", measure, "measure at the earlier time of each pair");
    auto* opt_no_measure = app.add_flag("--no-measure", no_measure, "bead model without measurement");
    opt_measure->excludes(opt_no_measure);
    opt_no_measure->excludes(opt_measure);
    auto* opt_plot = app.add_flag("--plot", plot, "text plot of L(t) on standard error");
    auto* opt_self = app.add_flag("--self-check", self_check, "verify results against closed forms");
    std::string config_path;
    app.add_option("--config", config_path, "flat key=value file; flags override its values")
        ->check(CLI::ExistingFile);

    ParseOutcome outcome;
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        outcome.exit_now = true;
        outcome.message = app.help();
        return outcome;
    } catch (const CLI::CallForVersion&) {
        outcome.exit_now = true;
        outcome.message = "lgsim 0.1.0\n";
        return outcome;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    RunConfig cfg;
    std::map<std::string, std::string> file_values;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot read config file '" + config_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        file_values = parse_key_value_text(buf.str(), config_path);
        if (file_values.count("measure") && file_values.count("no-measure")) {
            throw ConfigError(config_path + ": conflicting keys 'measure' and 'no-measure'");
        }
        for (const auto& [key, value] : file_values) {
            try {
                apply_setting(cfg, key, value);
            } catch (const ConfigError& e) {
                throw ConfigError(config_path + ": " + e.what());
            }
        }
    }

    for (const auto& [key, _] : valued) {
        if (opts[key]->count() > 0) apply_setting(cfg, key, raw[key]);
    }
    if (opt_measure->count() > 0) cfg.with_measurement = true;
    if (opt_no_measure->count() > 0) cfg.with_measurement = false;
    if (opt_plot->count() > 0) cfg.plot = true;
    if (opt_self->count() > 0) cfg.self_check = true;

    auto given = [&](const std::string& key) {
        return file_values.count(key) > 0 || (opts.count(key) && opts[key]->count() > 0);
    };
    const bool measure_given = opt_measure->count() > 0 || opt_no_measure->count() > 0 ||
                               file_values.count("measure") || file_values.count("no-measure");
    if (cfg.mode == Mode::quantum && measure_given && !cfg.with_measurement) {
        throw ConfigError("conflicting options: 'no-measure' is not available in quantum mode");
    }
    if (cfg.mode != Mode::invasiveness && (given("intervention") || given("t0"))) {
        throw ConfigError("conflicting options: 'intervention' and 't0' require --mode invasiveness");
    }

    validate(cfg);
    outcome.config = cfg;
    return outcome;
}

}  // namespace lgsim::cli
