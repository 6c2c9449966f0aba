// Precision, accuracy and stabilization detection over a simulation trace.
#pragma once

#include <pulsefield/phase.hpp>
#include <pulsefield/simulator.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace pulsefield {

/// Largest pairwise ring distance among the phases.
inline double precision(std::span<const double> phases) {
    if (phases.size() < 2) {
        throw std::domain_error("precision needs at least two phases");
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < phases.size(); ++i) {
        for (std::size_t j = i + 1; j < phases.size(); ++j) {
            worst = std::max(worst, ring_distance(phases[i], phases[j]));
        }
    }
    return worst;
}

inline double precision_at(const Trace& tr, std::size_t sample) { return precision(tr.sync_row(sample)); }

/// Max over nodes and over samples in [t, t + horizon] of the deviation of
/// Phi_q(s) from Phi_q(t) + (s - t), measured as ring distance.
inline double accuracy(const Trace& tr, double t, double horizon = 0.5) {
    if (tr.samples() == 0 || t < tr.sample_times.front() || t + horizon > tr.sample_times.back() + 1e-12) {
        throw std::domain_error("accuracy: trace does not cover [t, t + horizon]");
    }
    const auto it = std::lower_bound(tr.sample_times.begin(), tr.sample_times.end(), t - 1e-12);
    const auto s0 = static_cast<std::size_t>(it - tr.sample_times.begin());
    const double t0 = tr.sample_times[s0];
    double worst = 0.0;
    for (std::size_t s = s0; s < tr.samples() && tr.sample_times[s] <= t0 + horizon + 1e-12; ++s) {
        const double dt = tr.sample_times[s] - t0;
        for (std::int64_t q = 0; q < tr.nodes; ++q) {
            const double expect = tr.sync_at(s0, static_cast<std::size_t>(q)) + dt;
            worst = std::max(worst, ring_distance(expect, tr.sync_at(s, static_cast<std::size_t>(q))));
        }
    }
    return worst;
}

/// Largest measurement error seen at or after `from`.
inline double measured_error(const Trace& tr, double from) {
    double eps = 0.0;
    for (const auto& m : tr.measurements) {
        if (m.t >= from) eps = std::max(eps, m.error);
    }
    return eps;
}

/// Default precision target: the angle slack the post-flush measurement error
/// allows at full strength, plus a fixed margin of 0.02 cycles.
inline double default_pi_target(const Trace& tr) {
    const double N = static_cast<double>(tr.config.record_count());
    const double ratio = std::min(1.0, 2.0 * measured_error(tr, tr.flush_time) / N);
    return std::asin(ratio) / (2.0 * std::numbers::pi) + 0.02;
}

inline double resolved_pi_target(const Trace& tr) {
    return tr.config.pi_target > 0.0 ? tr.config.pi_target : default_pi_target(tr);
}

/// Earliest sample time s >= from such that precision stays at or below
/// pi_target on every sample of [s, s + hold].
inline std::optional<double> detect_stabilization(const Trace& tr, double pi_target, double hold, double from = 0.0) {
    std::optional<std::size_t> start;
    for (std::size_t s = 0; s < tr.samples(); ++s) {
        const double t = tr.sample_times[s];
        if (t < from) continue;
        if (tr.nodes >= 2 && precision_at(tr, s) > pi_target) {
            start.reset();
            continue;
        }
        if (!start) start = s;
        if (t - tr.sample_times[*start] >= hold - 1e-12) {
            return tr.sample_times[*start];
        }
    }
    return std::nullopt;
}

/// Precision at the last sample.
inline double final_precision(const Trace& tr) {
    if (tr.samples() == 0) throw std::domain_error("final_precision: empty trace");
    return precision_at(tr, tr.samples() - 1);
}

}  // namespace pulsefield
