#include "run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "lgsim/ensemble_mc.hpp"
#include "lgsim/lg_analysis.hpp"

namespace lgsim::cli {

namespace {

using nlohmann::ordered_json;

constexpr double kScanCheckTolerance = 1e-12;
constexpr std::size_t kRandomGenericEnsembles = 10000;

std::string csv_bool(bool b) { return b ? "true" : "false"; }

Source source_for(Mode m) {
    switch (m) {
        case Mode::quantum: return Source::quantum;
        case Mode::hv_analytic: return Source::hv_analytic;
        default: return Source::hv_mc;
    }
}

// Text rendering of L(t) with the +-2 rows marked.
void render_plot(const std::vector<ScanPoint>& scan, std::ostream& err) {
    constexpr int kWidth = 72;
    constexpr double kTop = 3.0;
    constexpr double kStep = 0.25;
    constexpr int kRows = 25;
    std::vector<std::string> rows(kRows, std::string(kWidth, ' '));
    for (int r = 0; r < kRows; ++r) {
        const double level = kTop - kStep * r;
        if (std::abs(std::abs(level) - 2.0) < 1e-9) rows[r].assign(kWidth, '-');
    }
    for (std::size_t i = 0; i < scan.size(); ++i) {
        const int col = scan.size() > 1
                            ? static_cast<int>(std::lround((kWidth - 1) * double(i) / double(scan.size() - 1)))
                            : 0;
        const int row = static_cast<int>(std::lround((kTop - scan[i].lg.l_value) / kStep));
        if (row >= 0 && row < kRows) rows[row][col] = '*';
    }
    err << "L(t), rows from +3 to -3 in steps of 0.25; dashed rows mark L = +-2\n";
    for (int r = 0; r < kRows; ++r) {
        char label[16];
        std::snprintf(label, sizeof label, "%+5.2f |", kTop - kStep * r);
        err << label << rows[r] << '\n';
    }
    if (!scan.empty()) {
        err << "       t from " << format_real(scan.front().t) << " to " << format_real(scan.back().t)
            << '\n';
    }
}

// Reference L for --self-check, or nullopt where the mode has no closed form.
double reference_l(const RunConfig& cfg, double t) {
    const RabiFrequency omega(cfg.omega);
    if (cfg.mode == Mode::quantum || cfg.with_measurement) return lg_quantity_quantum(omega, t);
    return correlator_hv(omega, t, 2 * t, false) + correlator_hv(omega, 2 * t, 3 * t, false) +
           correlator_hv(omega, 3 * t, 4 * t, false) - correlator_hv(omega, t, 4 * t, false);
}

int self_check_scan(const RunConfig& cfg, const std::vector<ScanPoint>& scan, std::ostream& err) {
    std::size_t failures = 0;
    for (const auto& p : scan) {
        const double tol = cfg.mode == Mode::hv_mc ? p.lg.tolerance + kScanCheckTolerance
                                                   : kScanCheckTolerance;
        bool ok = std::abs(p.lg.l_value - reference_l(cfg, p.t)) <= tol;
        if (cfg.mode == Mode::hv_analytic && !cfg.with_measurement) {
            ok = ok && std::abs(p.lg.l_value) <= 2.0 + kViolationTolerance;
        }
        if (!ok) {
            ++failures;
            err << "self-check: mismatch at t=" << format_real(p.t) << " L=" << format_real(p.lg.l_value)
                << " reference=" << format_real(reference_l(cfg, p.t)) << '\n';
        }
    }
    if (failures > 0) {
        err << "self-check: " << failures << " of " << scan.size() << " points failed\n";
        return kExitNumerical;
    }
    err << "self-check: all " << scan.size() << " points within tolerance\n";
    return kExitOk;
}

int run_scan(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const RabiFrequency omega(cfg.omega);
    const auto grid = linear_grid(cfg.t_min, cfg.t_max, cfg.n_points);
    McParams mc;
    mc.n_beads = cfg.n_beads;
    mc.seed = cfg.seed;
    mc.workers = cfg.workers;
    const bool measured = cfg.mode == Mode::quantum ? true : cfg.with_measurement;
    const auto scan = lg_scan(omega, grid, source_for(cfg.mode), measured, mc);
    const std::string mode = to_string(cfg.mode);

    if (cfg.output_format == OutputFormat::csv) {
        for (std::size_t k = 0; k < kCsvColumns.size(); ++k) out << (k ? "," : "") << kCsvColumns[k];
        out << '\n';
        for (const auto& p : scan) {
            const auto e = p.correlators.values();
            out << mode << ',' << format_real(cfg.omega) << ',' << format_real(p.t);
            for (double v : e) out << ',' << format_real(v);
            for (std::size_t k = 0; k < 4; ++k) {
                out << ',';
                if (p.correlators.std_errors) out << format_real((*p.correlators.std_errors)[k]);
            }
            out << ',' << format_real(p.lg.l_value) << ',' << csv_bool(p.lg.violated) << '\n';
        }
    } else {
        ordered_json doc;
        doc["mode"] = mode;
        doc["omega"] = cfg.omega;
        doc["with_measurement"] = measured;
        if (cfg.mode == Mode::hv_mc) {
            doc["n_beads"] = cfg.n_beads;
            doc["seed"] = cfg.seed;
        }
        ordered_json records = ordered_json::array();
        for (const auto& p : scan) {
            ordered_json r;
            r["t"] = p.t;
            r["e12"] = p.correlators.e12;
            r["e23"] = p.correlators.e23;
            r["e34"] = p.correlators.e34;
            r["e14"] = p.correlators.e14;
            const char* se_keys[4] = {"se12", "se23", "se34", "se14"};
            for (std::size_t k = 0; k < 4; ++k) {
                r[se_keys[k]] = p.correlators.std_errors ? ordered_json((*p.correlators.std_errors)[k])
                                                         : ordered_json(nullptr);
            }
            r["l_value"] = p.lg.l_value;
            r["violated"] = p.lg.violated;
            records.push_back(std::move(r));
        }
        doc["records"] = std::move(records);
        out << doc.dump(2) << '\n';
    }

    const auto best = std::max_element(scan.begin(), scan.end(), [](const ScanPoint& a, const ScanPoint& b) {
        return std::abs(a.lg.l_value) < std::abs(b.lg.l_value);
    });
    err << mode << ": max |L| = " << format_real(std::abs(best->lg.l_value)) << " at t = "
        << format_real(best->t) << '\n';
    if (cfg.plot) render_plot(scan, err);
    return cfg.self_check ? self_check_scan(cfg, scan, err) : kExitOk;
}

GenericRealistEnsemble random_generic(const SeededSampler& s) {
    std::uint64_t counter = 0;
    const std::size_t members = 1 + s.bits(counter++) % 8;
    std::vector<double> weights(members);
    double total = 0.0;
    for (auto& w : weights) total += (w = s.label(counter++) + 1e-3);
    for (auto& w : weights) w /= total;
    std::vector<GenericRealistEnsemble::QRow> table(members);
    for (auto& row : table) {
        const std::uint64_t b = s.bits(counter++);
        for (std::size_t i = 0; i < 4; ++i) row[i] = (b >> i) & 1u ? 1 : -1;
    }
    return {std::move(weights), std::move(table)};
}

int run_generic_check(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto tables = deterministic_q_tables();
    std::size_t violations = 0;
    double max_l = -4.0;

    ordered_json doc;
    ordered_json records = ordered_json::array();
    if (cfg.output_format == OutputFormat::csv) {
        out << "mode,table,q1,q2,q3,q4,e12,e23,e34,e14,l_value,violated\n";
    }
    for (std::size_t i = 0; i < tables.size(); ++i) {
        const auto& row = tables[i];
        const auto check = check_lg_bound_generic(GenericRealistEnsemble({1.0}, {row}));
        const auto c = GenericRealistEnsemble({1.0}, {row}).correlators();
        max_l = std::max(max_l, check.lg.l_value);
        if (!check.all_hold()) ++violations;
        if (cfg.output_format == OutputFormat::csv) {
            out << "generic-check," << i;
            for (int q : row) out << ',' << q;
            for (double v : c.values()) out << ',' << format_real(v);
            out << ',' << format_real(check.lg.l_value) << ',' << csv_bool(check.lg.violated) << '\n';
        } else {
            records.push_back({{"table", i},
                               {"q", row},
                               {"e12", c.e12},
                               {"e23", c.e23},
                               {"e34", c.e34},
                               {"e14", c.e14},
                               {"l_value", check.lg.l_value},
                               {"violated", check.lg.violated}});
        }
    }

    const SeededSampler root(cfg.seed);
    std::size_t random_violations = 0;
    for (std::size_t k = 0; k < kRandomGenericEnsembles; ++k) {
        if (!check_lg_bound_generic(random_generic(root.substream(k))).all_hold()) ++random_violations;
    }

    if (cfg.output_format == OutputFormat::json) {
        doc["mode"] = "generic-check";
        doc["tables"] = std::move(records);
        doc["max_l"] = max_l;
        doc["random_ensembles"] = kRandomGenericEnsembles;
        doc["random_violations"] = random_violations;
        doc["seed"] = cfg.seed;
        out << doc.dump(2) << '\n';
    }
    err << "generic-check: max L over 16 deterministic tables = " << format_real(max_l) << "; "
        << random_violations << " violations in " << kRandomGenericEnsembles << " random ensembles\n";
    return violations + random_violations > 0 ? kExitNumerical : kExitOk;
}

int run_invasiveness(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const RabiFrequency omega(cfg.omega);
    const double t0 = cfg.t0_set ? cfg.t0 : std::numbers::pi / (2.0 * cfg.omega);
    std::vector<double> probes;
    for (double t : linear_grid(cfg.t_min, cfg.t_max, cfg.n_points)) {
        if (t > t0) probes.push_back(t);
    }
    if (probes.empty()) {
        err << "error: no grid time lies after t0 = " << format_real(t0)
            << "; raise 't-max' or lower 't0'\n";
        return kExitUsage;
    }
    const auto rep = invasiveness_report(cfg.intervention, t0, probes, cfg.n_beads, omega);

    if (cfg.output_format == OutputFormat::json) {
        ordered_json doc;
        doc["mode"] = "invasiveness";
        doc["omega"] = cfg.omega;
        doc["intervention"] = std::string(to_string(rep.intervention));
        doc["t0"] = rep.t0;
        doc["n_beads"] = rep.n_beads;
        doc["probe_times"] = probes;
        doc["ontic_distance"] = rep.ontic_distance;
        doc["observable_distance"] = rep.observable_distance;
        doc["ontic_tolerance"] = rep.ontic_tolerance;
        doc["probe_tolerance"] = rep.probe_tolerance;
        doc["classification"] = std::string(to_string(rep.classification));
        doc["model_scope"] = rep.model_scope;
        out << doc.dump(2) << '\n';
    } else {
        out << "mode,omega,intervention,t0,n_beads,n_probes,ontic_distance,observable_distance,"
               "classification\n";
        out << "invasiveness," << format_real(cfg.omega) << ',' << to_string(rep.intervention) << ','
            << format_real(rep.t0) << ',' << rep.n_beads << ',' << probes.size() << ','
            << format_real(rep.ontic_distance) << ',' << format_real(rep.observable_distance) << ','
            << to_string(rep.classification) << '\n';
    }
    err << "invasiveness: " << to_string(rep.intervention) << " at t0 = " << format_real(t0) << " -> "
        << to_string(rep.classification) << " (ontic " << format_real(rep.ontic_distance)
        << ", observable " << format_real(rep.observable_distance) << ")\n";

    if (cfg.self_check) {
        const bool ok = cfg.intervention == InterventionChoice::phantom_permutation
                            ? rep.observable_distance <= rep.probe_tolerance
                            : cfg.intervention != InterventionChoice::none ||
                                  (rep.ontic_distance == 0.0 && rep.observable_distance == 0.0);
        if (!ok) {
            err << "self-check: invasiveness report violates its construction\n";
            return kExitNumerical;
        }
    }
    return kExitOk;
}

}  // namespace

std::string format_real(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    std::ostringstream buffer;
    int code = kExitOk;
    try {
        switch (cfg.mode) {
            case Mode::quantum:
            case Mode::hv_analytic:
            case Mode::hv_mc: code = run_scan(cfg, buffer, err); break;
            case Mode::generic_check: code = run_generic_check(cfg, buffer, err); break;
            case Mode::invasiveness: code = run_invasiveness(cfg, buffer, err); break;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    if (cfg.output_path.empty()) {
        out << buffer.str();
        out.flush();
        if (!out) {
            err << "error: failed writing to standard output\n";
            return kExitIo;
        }
        return code;
    }
    std::ofstream file(cfg.output_path, std::ios::binary | std::ios::trunc);
    if (!file) {
        err << "error: cannot open '" << cfg.output_path << "' for writing\n";
        return kExitIo;
    }
    file << buffer.str();
    file.flush();
    if (!file) {
        err << "error: failed writing '" << cfg.output_path << "'\n";
        return kExitIo;
    }
    return code;
}

int run_command_line(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    ParseOutcome parsed;
    try {
        parsed = parse_config(args);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    if (parsed.exit_now) {
        out << parsed.message;
        return parsed.exit_code;
    }
    return run(parsed.config, out, err);
}

}  // namespace lgsim::cli
