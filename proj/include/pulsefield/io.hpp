// Plot-ready output: fixed-column CSV tables, histogram and summary JSON.
// Numbers are printed with a fixed format so reruns are byte-identical.
#pragma once

#include <pulsefield/curve_game.hpp>
#include <pulsefield/simulator.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pulsefield {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip form; "nan" for NaN.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir.string());
    }
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

/// Columns: t,node,phi,Phi,dmf_strength,dmf_angle. One row per sample per
/// nonfaulty node; dmf_angle is empty before a node's first measurement.
inline std::string trace_csv(const Trace& tr) {
    std::string out = "t,node,phi,Phi,dmf_strength,dmf_angle\n";
    char buf[160];
    for (std::size_t s = 0; s < tr.samples(); ++s) {
        for (std::int64_t q = 0; q < tr.nodes; ++q) {
            const auto i = s * static_cast<std::size_t>(tr.nodes) + static_cast<std::size_t>(q);
            const double a = tr.dmf_angle[i];
            std::snprintf(buf, sizeof buf, "%.6f,%lld,%.9f,%.9f,%.9f,", tr.sample_times[s], static_cast<long long>(q),
                          tr.pulse[i], tr.sync[i], tr.dmf_strength[i]);
            out += buf;
            if (!std::isnan(a)) {
                std::snprintf(buf, sizeof buf, "%.9f", a);
                out += buf;
            }
            out += '\n';
        }
    }
    return out;
}

/// Columns: trial,final_R.
inline std::string finals_csv(const StrengthStats& st) {
    std::string out = "trial,final_R\n";
    char buf[64];
    for (std::size_t i = 0; i < st.finals.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g\n", i, st.finals[i]);
        out += buf;
    }
    return out;
}

/// Columns: step,mean_R,min_R.
inline std::string series_csv(const StrengthStats& st) {
    std::string out = "step,mean_R,min_R\n";
    char buf[96];
    for (std::size_t k = 0; k < st.mean_series.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g\n", k, st.mean_series[k], st.min_series[k]);
        out += buf;
    }
    return out;
}

struct Histogram {
    std::vector<double> edges;
    std::vector<std::int64_t> counts;
};

/// Equal-width bins over [lo, hi]; the top edge is inclusive.
inline Histogram make_histogram(const std::vector<double>& values, double lo, double hi, std::size_t bins) {
    if (bins == 0 || !(hi > lo)) throw std::invalid_argument("histogram needs bins > 0 and hi > lo");
    Histogram h;
    for (std::size_t i = 0; i <= bins; ++i) {
        h.edges.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins));
    }
    h.counts.assign(bins, 0);
    for (double v : values) {
        if (v < lo || v > hi) continue;
        auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
        if (b >= bins) b = bins - 1;
        ++h.counts[b];
    }
    return h;
}

inline nlohmann::ordered_json histogram_json(const Histogram& h) {
    return {{"bin_edges", h.edges}, {"counts", h.counts}};
}

inline nlohmann::ordered_json config_json(const SimConfig& c) {
    nlohmann::ordered_json j;
    j["n"] = c.n;
    j["f"] = c.f;
    j["d"] = c.d;
    j["rho"] = c.rho;
    j["T"] = c.T;
    j["omega"] = c.omega;
    j["c_max"] = c.c_max;
    j["R0"] = c.R0;
    j["R1"] = c.R1;
    j["eps_max"] = c.eps_max;
    j["mode"] = to_string(c.mode);
    j["fault_strategy"] = to_string(c.fault_strategy);
    j["seed"] = c.seed;
    j["steps"] = c.resolved_steps();
    j["trials"] = c.trials;
    j["delay_policy"] = to_string(c.delay_policy);
    j["drift_policy"] = to_string(c.drift_policy);
    j["band_choice"] = to_string(c.band_choice);
    j["hostile_init"] = c.hostile_init;
    j["trig"] = to_string(c.trig);
    j["noise"] = c.noise;
    j["sample_dt"] = c.sample_dt;
    j["hold"] = c.hold;
    j["pi_target"] = c.pi_target;
    return j;
}

inline std::string dump_json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace pulsefield
