// The malicious environment: delay and drift scheduling for nonfaulty nodes
// and pulse injection for faulty ones.
#pragma once

#include <pulsefield/dmf.hpp>
#include <pulsefield/phase.hpp>
#include <pulsefield/random.hpp>
#include <pulsefield/tags.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

namespace pulsefield {

/// Read-only view of one nonfaulty node, as the adversary sees it.
struct NodeView {
    NodeId id{0};
    double last_pulse_time{0.0};
    NormalizedPhase sync_phase;
    double last_strength{0.0};
    std::optional<NormalizedPhase> last_angle;  ///< field angle at last_pulse_time
};

/// Past and current nonfaulty state at time t, taken before any random draw
/// made at t.
struct SystemSnapshot {
    double t{0.0};
    std::vector<NodeView> nodes;
    /// Reference-time phase of recent nonfaulty pulses, if they have any field.
    std::optional<NormalizedPhase> field_phase;
};

struct AdversaryStrategy {
    DelayPolicy delay_policy{DelayPolicy::uniform_random};
    DriftPolicy drift_policy{DriftPolicy::random};
    FaultPolicy fault_policy{FaultPolicy::silent};
    BandChoice band_choice_policy{BandChoice::always_0};
    double d{0.0};
    double rho{0.0};
    std::uint64_t seed{0};
    /// Band edges the adaptive policies aim for.
    double band_lo{0.0};
    double band_hi{0.0};
};

inline std::uint64_t time_key(double t) noexcept { return std::bit_cast<std::uint64_t>(t); }

/// Delay in [0, d] for one pulse copy; deterministic in its arguments.
inline double schedule_delay(const AdversaryStrategy& s, NodeId sender, NodeId receiver, double t) {
    switch (s.delay_policy) {
        case DelayPolicy::zero:
            return 0.0;
        case DelayPolicy::max:
            return s.d;
        case DelayPolicy::uniform_random:
            return s.d * keyed_uniform({s.seed, 0xde1a4ULL, static_cast<std::uint64_t>(sender),
                                        static_cast<std::uint64_t>(receiver), time_key(t)});
        case DelayPolicy::per_receiver_extremes:
            return receiver % 2 == 0 ? 0.0 : s.d;
    }
    return 0.0;
}

inline double schedule_delay(const AdversaryStrategy& s, NodeId sender, NodeId receiver, double t,
                             const SystemSnapshot&) {
    return schedule_delay(s, sender, receiver, t);
}

/// Hardware speed in [1 - rho, 1 + rho], constant over each reference cycle.
inline double schedule_drift(const AdversaryStrategy& s, NodeId node, double t) {
    const auto cycle = static_cast<std::int64_t>(std::floor(t));
    switch (s.drift_policy) {
        case DriftPolicy::constant:
            return 1.0 + s.rho;
        case DriftPolicy::oscillating:
            return (cycle % 2 == 0) ? 1.0 - s.rho : 1.0 + s.rho;
        case DriftPolicy::random: {
            const double u = keyed_uniform({s.seed, 0xd41f7ULL, static_cast<std::uint64_t>(node),
                                            static_cast<std::uint64_t>(cycle)});
            return 1.0 + s.rho * (2.0 * u - 1.0);
        }
    }
    return 1.0;
}

/// Middle-band choice for the basic feedback rule: true selects overwrite.
/// `pulse_index` keys the random policy so that the choice is reproducible.
inline bool choose_band(const AdversaryStrategy& s, const NodeView& node, double now,
                        std::optional<NormalizedPhase> node_angle, const SystemSnapshot& snap,
                        std::uint64_t pulse_index) {
    switch (s.band_choice_policy) {
        case BandChoice::always_0:
            return false;
        case BandChoice::always_1:
            return true;
        case BandChoice::random:
            return keyed_uniform({s.seed, 0xba4dULL, static_cast<std::uint64_t>(node.id), pulse_index}) < 0.5;
        case BandChoice::adaptive: {
            // Lock nodes onto a minority direction, otherwise keep them walking.
            if (!node_angle || !snap.field_phase) {
                return false;
            }
            const NormalizedPhase global_next{now + node_angle->value()};
            return ring_distance(global_next, *snap.field_phase) > 0.25;
        }
    }
    return false;
}

/// Minimum spacing between two pulses of one sender at one receiver that
/// keeps any interval of length tau at or below 2(1+rho)tau + 1 pulses.
inline double min_pulse_gap(double rho) noexcept { return 1.0 / (2.0 * (1.0 + rho)); }

/// Pulses one faulty node may land at one receiver within a window of length tau.
inline std::int64_t fault_budget(double tau, double rho) noexcept {
    return static_cast<std::int64_t>(std::floor(2.0 * (1.0 + rho) * tau)) + 1;
}

struct FaultyDelivery {
    NodeId faulty{0};
    NodeId receiver{0};
    double time{0.0};
    friend bool operator==(const FaultyDelivery&, const FaultyDelivery&) = default;
};

/// Generates faulty pulses window by window. The strategy is immutable; the
/// injector remembers the last delivery per (faulty, receiver) pair so that
/// the spacing rule also holds across window boundaries.
class FaultInjector {
public:
    FaultInjector(AdversaryStrategy strategy, std::vector<NodeId> faulty, std::vector<NodeId> receivers)
        : s_{strategy}, faulty_{std::move(faulty)}, receivers_{std::move(receivers)} {}

    /// Deliveries landing in [t0, t1), sorted by (time, faulty, receiver).
    std::vector<FaultyDelivery> emit(double t0, double t1, const SystemSnapshot& snap) {
        std::vector<FaultyDelivery> out;
        if (s_.fault_policy == FaultPolicy::silent || t1 <= t0) {
            return out;
        }
        const auto window_key = time_key(t0);
        for (NodeId fid : faulty_) {
            for (NodeId rid : receivers_) {
                std::vector<double> want = targets(fid, rid, t0, t1, snap, window_key);
                std::sort(want.begin(), want.end());
                place(fid, rid, want, t0, t1, out);
            }
        }
        std::sort(out.begin(), out.end(), [](const FaultyDelivery& a, const FaultyDelivery& b) {
            return std::tie(a.time, a.faulty, a.receiver) < std::tie(b.time, b.faulty, b.receiver);
        });
        return out;
    }

    [[nodiscard]] const AdversaryStrategy& strategy() const noexcept { return s_; }

private:
    /// Times inside [m + phase) for every integer m meeting [t0, t1).
    static std::vector<double> at_phase(double phase, double t0, double t1) {
        std::vector<double> ts;
        for (double m = std::floor(t0) - 1.0; m + phase < t1; m += 1.0) {
            const double t = m + phase;
            if (t >= t0) ts.push_back(t);
        }
        return ts;
    }

    std::vector<double> targets(NodeId fid, NodeId rid, double t0, double t1, const SystemSnapshot& snap,
                                std::uint64_t window_key) const {
        const auto f = static_cast<std::uint64_t>(fid);
        const auto r = static_cast<std::uint64_t>(rid);
        switch (s_.fault_policy) {
            case FaultPolicy::silent:
                return {};
            case FaultPolicy::random_pulses: {
                std::vector<double> ts;
                const auto k = fault_budget(t1 - t0, s_.rho);
                for (std::int64_t i = 0; i < k; ++i) {
                    const double u = keyed_uniform({s_.seed, 0xfa17ULL, f, r, window_key, static_cast<std::uint64_t>(i)});
                    ts.push_back(t0 + u * (t1 - t0));
                }
                return ts;
            }
            case FaultPolicy::fixed_phase:
                return at_phase(keyed_uniform({s_.seed, 0xf1dULL, f}), t0, t1);
            case FaultPolicy::anti_phase:
                if (!snap.field_phase) return {};
                return at_phase(wrap_unit(snap.field_phase->value() + 0.5), t0, t1);
            case FaultPolicy::adaptive_worst: {
                if (!snap.field_phase) return {};
                const NodeView* view = nullptr;
                for (const auto& v : snap.nodes) {
                    if (v.id == rid) view = &v;
                }
                const double strength = view ? view->last_strength : 0.0;
                const double fp = snap.field_phase->value();
                if (strength >= s_.band_hi) {
                    // Push the receiver down with two pulses around the antipode.
                    auto a = at_phase(wrap_unit(fp + 0.5), t0, t1);
                    auto b = at_phase(wrap_unit(fp + 0.5 + min_pulse_gap(s_.rho)), t0, t1);
                    a.insert(a.end(), b.begin(), b.end());
                    return a;
                }
                if (strength < s_.band_lo) {
                    return at_phase(fp, t0, t1);
                }
                const double u = keyed_uniform({s_.seed, 0xada9ULL, f, r, window_key});
                return at_phase(u, t0, t1);
            }
        }
        return {};
    }

    void place(NodeId fid, NodeId rid, const std::vector<double>& want, double t0, double t1,
               std::vector<FaultyDelivery>& out) {
        const double gap = min_pulse_gap(s_.rho);
        auto key = std::make_pair(fid, rid);
        auto it = last_.find(key);
        double prev = it == last_.end() ? -1e300 : it->second;
        for (double t : want) {
            t = std::max({t, t0, prev + gap});
            if (t >= t1) break;
            out.push_back({fid, rid, t});
            prev = t;
        }
        if (prev > -1e300) last_[key] = prev;
    }

    AdversaryStrategy s_;
    std::vector<NodeId> faulty_;
    std::vector<NodeId> receivers_;
    std::map<std::pair<NodeId, NodeId>, double> last_;
};

/// Free-function form: one window from a fresh injector.
inline std::vector<FaultyDelivery> emit_faulty_pulses(const AdversaryStrategy& s, const std::vector<NodeId>& faulty,
                                                      const std::vector<NodeId>& receivers, double t0, double t1,
                                                      const SystemSnapshot& snap) {
    FaultInjector inj{s, faulty, receivers};
    return inj.emit(t0, t1, snap);
}

}  // namespace pulsefield
