// Experiment commands behind the pulsefield CLI. Each command returns the
// process exit code; main() only parses arguments.
#pragma once

#include <pulsefield/pulsefield.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace pulsefield::cli {

enum ExitCode : int { ok = 0, check_failed = 1, config_error = 2, io_error = 3 };

struct ExperimentSpec {
    std::string command;
    std::string config_path;
    std::filesystem::path out_dir{"out"};
    std::optional<std::int64_t> trials;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    std::optional<double> tolerance;
    unsigned parallel{1};
};

inline SimConfig load_spec_config(const ExperimentSpec& spec) {
    std::vector<std::string> ov = spec.overrides;
    if (spec.trials) ov.push_back("trials=" + std::to_string(*spec.trials));
    if (spec.seed) ov.push_back("seed=" + std::to_string(*spec.seed));
    if (spec.config_path.empty()) return parse_config("", ov);
    return load_config(spec.config_path, ov);
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::int64_t count, unsigned workers, Fn fn) {
    workers = std::max(1u, workers);
    if (workers == 1) {
        for (std::int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::int64_t i = w; i < count; i += workers) fn(i);
        });
    }
}

inline int cmd_curve_game(const ExperimentSpec& spec) {
    const SimConfig cfg = load_spec_config(spec);
    GameParams p = game_params_from(cfg);
    p.parallel = spec.parallel;
    const StrengthStats st = run_game(p);

    ensure_directory(spec.out_dir);
    write_file(spec.out_dir / "finals.csv", finals_csv(st));
    write_file(spec.out_dir / "series.csv", series_csv(st));
    write_file(spec.out_dir / "histogram.json",
               dump_json(histogram_json(make_histogram(st.finals, 0.0, static_cast<double>(st.N), 50))));

    double mean_final = 0.0;
    for (double r : st.finals) mean_final += r;
    mean_final /= static_cast<double>(st.finals.size());

    nlohmann::ordered_json s;
    s["command"] = "curve-game";
    s["config"] = config_json(cfg);
    s["N"] = st.N;
    s["trials"] = st.finals.size();
    s["steps"] = p.steps;
    s["high_cut"] = st.high_cut;
    s["fraction_high"] = st.fraction_high();
    s["fraction_mid"] = st.fraction_mid();
    s["fraction_low"] = st.fraction_low();
    s["fraction_at_most_R0"] = st.fraction([&](double r) { return r <= st.R0; });
    s["mean_final_R"] = mean_final;
    s["overwrite_steps"] = st.overwrite_steps;
    s["overwrite_violations"] = st.overwrite_violations;
    s["max_step_displacement"] = st.max_displacement;
    write_file(spec.out_dir / "summary.json", dump_json(s));

    std::cout << "N=" << st.N << " trials=" << st.finals.size() << " steps=" << p.steps << '\n'
              << "fraction_high=" << st.fraction_high() << " fraction_mid=" << st.fraction_mid()
              << " fraction_low=" << st.fraction_low() << '\n';
    return ok;
}

struct RunSummary {
    std::uint64_t seed{0};
    bool stabilized{false};
    std::optional<double> stabilization_time;
    double stabilization_windows{std::nan("")};
    double pi_target{0.0};
    double eps_est{0.0};
    double final_precision{0.0};
    double final_accuracy{0.0};
    double max_interference{0.0};
    AuditReport audit;
};

inline RunSummary summarize_run(const Trace& tr) {
    RunSummary r;
    const SimConfig& c = tr.config;
    r.seed = c.seed;
    r.eps_est = measured_error(tr, tr.flush_time);
    r.pi_target = resolved_pi_target(tr);
    r.stabilization_time = detect_stabilization(tr, r.pi_target, c.hold, tr.flush_time);
    if (r.stabilization_time) {
        r.stabilization_windows = (*r.stabilization_time - tr.flush_time) / static_cast<double>(c.omega);
        r.stabilized = r.stabilization_windows <= 3.0;
    }
    if (tr.nodes >= 2) r.final_precision = final_precision(tr);
    const double t_acc = tr.sample_times.back() - 0.5;
    if (t_acc >= tr.sample_times.front()) r.final_accuracy = accuracy(tr, t_acc);
    for (const auto& m : tr.measurements) {
        if (m.t >= tr.flush_time) r.max_interference = std::max(r.max_interference, m.interference);
    }
    r.audit = audit(tr);
    return r;
}

inline nlohmann::ordered_json run_json(const RunSummary& r) {
    nlohmann::ordered_json j;
    j["seed"] = r.seed;
    j["stabilized"] = r.stabilized;
    j["stabilization_time"] = r.stabilization_time ? nlohmann::ordered_json(*r.stabilization_time) : nullptr;
    j["stabilization_windows"] =
        r.stabilization_time ? nlohmann::ordered_json(r.stabilization_windows) : nlohmann::ordered_json(nullptr);
    j["pi_target"] = r.pi_target;
    j["eps_est"] = r.eps_est;
    j["final_precision"] = r.final_precision;
    j["final_accuracy"] = r.final_accuracy;
    j["max_interference"] = r.max_interference;
    j["delay_violations"] = r.audit.delay_violations;
    j["frequency_violations"] = r.audit.frequency_violations;
    return j;
}

inline int cmd_simulate(const ExperimentSpec& spec) {
    const SimConfig base = load_spec_config(spec);
    {
        // Reject configs the engine cannot run before creating any output.
        Simulator probe{base, strategy_from_config(base)};
    }
    ensure_directory(spec.out_dir);

    std::vector<RunSummary> runs(static_cast<std::size_t>(base.trials));
    std::string first_trace;
    parallel_for(base.trials, spec.parallel, [&](std::int64_t i) {
        SimConfig c = base;
        c.seed = base.seed + static_cast<std::uint64_t>(i);
        const Trace tr = run(c);
        runs[static_cast<std::size_t>(i)] = summarize_run(tr);
        if (i == 0) first_trace = trace_csv(tr);
    });
    write_file(spec.out_dir / "trace.csv", first_trace);

    std::string csv =
        "seed,stabilized,stabilization_windows,pi_target,eps_est,final_precision,final_accuracy,max_interference,"
        "delay_violations,frequency_violations\n";
    nlohmann::ordered_json run_list = nlohmann::ordered_json::array();
    std::vector<double> windows;
    std::size_t stabilized = 0;
    std::size_t violations = 0;
    double worst_precision = 0.0;
    double worst_interference = 0.0;
    for (const auto& r : runs) {
        csv += std::to_string(r.seed) + ',' + (r.stabilized ? "1" : "0") + ',' +
               (r.stabilization_time ? format_number(r.stabilization_windows) : "") + ',' +
               format_number(r.pi_target) + ',' + format_number(r.eps_est) + ',' + format_number(r.final_precision) +
               ',' + format_number(r.final_accuracy) + ',' + format_number(r.max_interference) + ',' +
               std::to_string(r.audit.delay_violations) + ',' + std::to_string(r.audit.frequency_violations) + '\n';
        run_list.push_back(run_json(r));
        if (r.stabilization_time) windows.push_back(r.stabilization_windows);
        stabilized += r.stabilized ? 1 : 0;
        violations += r.audit.delay_violations + r.audit.frequency_violations;
        worst_precision = std::max(worst_precision, r.final_precision);
        worst_interference = std::max(worst_interference, r.max_interference);
    }
    write_file(spec.out_dir / "runs.csv", csv);

    std::optional<double> median;
    if (windows.size() * 2 > runs.size()) {
        // Unstabilized runs count as +infinity, so the median exists only when most runs stabilized.
        std::vector<double> all = windows;
        all.resize(runs.size(), std::numeric_limits<double>::infinity());
        std::sort(all.begin(), all.end());
        const std::size_t m = all.size();
        median = m % 2 ? all[m / 2] : 0.5 * (all[m / 2 - 1] + all[m / 2]);
    }

    const double frac = static_cast<double>(stabilized) / static_cast<double>(runs.size());
    nlohmann::ordered_json s;
    s["command"] = "simulate";
    s["config"] = config_json(base);
    s["trials"] = runs.size();
    s["flush_time"] = base.omega / (1.0 - base.rho);
    s["stabilized_fraction"] = frac;
    s["median_stabilization_windows"] = median ? nlohmann::ordered_json(*median) : nlohmann::ordered_json(nullptr);
    s["max_final_precision"] = worst_precision;
    s["max_interference"] = worst_interference;
    s["audit_violations"] = violations;
    s["runs"] = run_list;
    write_file(spec.out_dir / "summary.json", dump_json(s));

    std::cout << "trials=" << runs.size() << " stabilized_fraction=" << frac << " median_windows="
              << (median ? format_number(*median) : std::string("none")) << " audit_violations=" << violations << '\n';
    return violations == 0 ? ok : check_failed;
}

inline int cmd_rayleigh_check(const ExperimentSpec& spec) {
    const SimConfig cfg = load_spec_config(spec);
    const double tol = spec.tolerance.value_or(0.02);
    const auto N = static_cast<std::size_t>(cfg.record_count());
    if (N < 16) {
        std::cerr << "warning: N=" << N << " is small; the tail formula assumes a large number of segments\n";
    }
    std::vector<double> strengths(static_cast<std::size_t>(cfg.trials));
    parallel_for(cfg.trials, spec.parallel, [&](std::int64_t i) {
        Rng rng = Rng::stream(cfg.seed, static_cast<std::uint64_t>(i));
        strengths[static_cast<std::size_t>(i)] = uniform_walk_strength(N, rng);
    });

    ensure_directory(spec.out_dir);
    const double root = std::sqrt(static_cast<double>(N));
    std::string csv = "r,empirical,formula,abs_diff\n";
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    bool pass = true;
    double worst = 0.0;
    for (double k : {0.5, 1.0, 1.5, 2.0}) {
        const double r = k * root;
        const auto hits = std::count_if(strengths.begin(), strengths.end(), [&](double v) { return v >= r; });
        const double emp = static_cast<double>(hits) / static_cast<double>(strengths.size());
        const double formula = rayleigh_tail(static_cast<double>(N), r);
        const double diff = std::abs(emp - formula);
        worst = std::max(worst, diff);
        pass = pass && diff <= tol;
        csv += format_number(r) + ',' + format_number(emp) + ',' + format_number(formula) + ',' + format_number(diff) +
               '\n';
        rows.push_back({{"r", r}, {"empirical", emp}, {"formula", formula}, {"abs_diff", diff}});
    }
    write_file(spec.out_dir / "rayleigh.csv", csv);

    nlohmann::ordered_json s;
    s["command"] = "rayleigh-check";
    s["N"] = N;
    s["trials"] = strengths.size();
    s["seed"] = cfg.seed;
    s["tolerance"] = tol;
    s["max_abs_diff"] = worst;
    s["pass"] = pass;
    s["rows"] = rows;
    write_file(spec.out_dir / "summary.json", dump_json(s));

    std::cout << "N=" << N << " trials=" << strengths.size() << " max_abs_diff=" << worst
              << (pass ? " PASS" : " FAIL") << '\n';
    return pass ? ok : check_failed;
}

struct TrigSweep {
    double max_error{0.0};
    std::vector<double> octant_error = std::vector<double>(8, 0.0);
    bool compass_exact{true};
    bool monotone{true};
    bool roundtrip_exact{true};
};

/// Exhaustive sweep of every lattice point on the radius-K 1-norm circle,
/// counter-clockwise from +x.
inline TrigSweep sweep_zigzag() {
    constexpr std::int64_t K = FixedPhase::K;
    TrigSweep out;
    std::int64_t prev = -1;
    for (std::int64_t i = 0; i < 4 * K; ++i) {
        const std::int64_t q = i / K;
        const std::int64_t t = i % K;
        std::int64_t x;
        std::int64_t y;
        switch (q) {
            case 0: x = K - t; y = t; break;
            case 1: x = -t; y = K - t; break;
            case 2: x = -K + t; y = -t; break;
            default: x = t; y = -K + t; break;
        }
        const auto raw = zigzag_atan2(y, x).raw;
        const double ref = wrap_unit(std::atan2(static_cast<double>(y), static_cast<double>(x)) / (2.0 * std::numbers::pi));
        const double err = ring_distance(static_cast<double>(raw) / static_cast<double>(K), ref);
        out.max_error = std::max(out.max_error, err);
        const auto oct = static_cast<std::size_t>(std::min<double>(7.0, std::floor(ref * 8.0)));
        out.octant_error[oct] = std::max(out.octant_error[oct], err);
        if (i % (K / 2) == 0 && err != 0.0) out.compass_exact = false;
        // Only the final points below +x may wrap to 0.
        if (raw < prev && !(q == 3 && raw == 0)) out.monotone = false;
        prev = raw;
    }
    for (std::int64_t r = 0; r < K; ++r) {
        const auto p = FixedPhase::from_raw(r);
        const auto pt = l1_sincos(p);
        if (zigzag_atan2(pt.y, pt.x).raw != r) out.roundtrip_exact = false;
    }
    return out;
}

inline int cmd_trig_check(const ExperimentSpec& spec) {
    if (!spec.config_path.empty() || !spec.overrides.empty()) {
        (void)load_spec_config(spec);
    }
    const double tol = spec.tolerance.value_or(1e-12);
    const TrigSweep sw = sweep_zigzag();
    const bool matches = std::abs(sw.max_error - zigzag_max_error) <= tol;
    const bool pass = matches && sw.compass_exact && sw.monotone && sw.roundtrip_exact;

    ensure_directory(spec.out_dir);
    std::string csv = "octant,max_error\n";
    for (std::size_t o = 0; o < 8; ++o) csv += std::to_string(o) + ',' + format_number(sw.octant_error[o]) + '\n';
    write_file(spec.out_dir / "trig.csv", csv);

    nlohmann::ordered_json s;
    s["command"] = "trig-check";
    s["K"] = FixedPhase::K;
    s["max_error"] = sw.max_error;
    s["pinned_error"] = zigzag_max_error;
    s["tolerance"] = tol;
    s["compass_exact"] = sw.compass_exact;
    s["monotone"] = sw.monotone;
    s["roundtrip_exact"] = sw.roundtrip_exact;
    s["pass"] = pass;
    write_file(spec.out_dir / "summary.json", dump_json(s));

    std::cout << "max_error=" << format_number(sw.max_error) << " pinned=" << format_number(zigzag_max_error)
              << " compass_exact=" << sw.compass_exact << " monotone=" << sw.monotone
              << (pass ? " PASS" : " FAIL") << '\n';
    return pass ? ok : check_failed;
}

/// Dispatches a command and maps exceptions to exit codes.
inline int run_command(const ExperimentSpec& spec) {
    try {
        if (spec.command == "curve-game") return cmd_curve_game(spec);
        if (spec.command == "simulate") return cmd_simulate(spec);
        if (spec.command == "rayleigh-check") return cmd_rayleigh_check(spec);
        if (spec.command == "trig-check") return cmd_trig_check(spec);
        std::cerr << "error: unknown command '" << spec.command << "'\n";
        return config_error;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return io_error;
    }
}

}  // namespace pulsefield::cli
