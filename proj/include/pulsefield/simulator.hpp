// Deterministic discrete-event engine for an anonymous bounded-delay pulsing
// system: n oscillators, the adversary's delay/drift schedules, faulty pulse
// injection, and the trace the metrics are computed from.
//
// Time base. Events carry continuous reference time in cycles. Each node's
// hardware counter integrates its drift schedule (piecewise constant per
// reference cycle) and is read as floor(local ticks) mod c_max. Nodes
// 0..n-f-1 are nonfaulty; n-f..n-1 are faulty and controlled by the adversary.
#pragma once

#include <pulsefield/adversary.hpp>
#include <pulsefield/config.hpp>
#include <pulsefield/dmf.hpp>
#include <pulsefield/oscillator.hpp>
#include <pulsefield/phase.hpp>
#include <pulsefield/random.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace pulsefield {

struct RecordInfo {
    NodeId sender{-1};          ///< -1 for planted initial garbage
    bool faulty{false};
    double gen_time{std::numeric_limits<double>::quiet_NaN()};
};

using SimWindow = BasicReceptionWindow<RecordInfo>;
using SimOscillator = BasicOscillatorState<RecordInfo>;

enum class EventKind { generate = 0, deliver = 1, timer = 2 };

struct PulseEvent {
    EventKind kind{EventKind::generate};
    NodeId sender{0};
    NodeId receiver{-1};        ///< deliver only
    double ref_time{0.0};
    double gen_time{0.0};       ///< deliver only: sender's generation instant
    Tick receive_tick{0};       ///< deliver only
    bool faulty_sender{false};
};

struct Measurement {
    double t{0.0};
    NodeId node{0};
    double strength{0.0};
    std::optional<double> angle;
    DecisionKind decision{DecisionKind::random};
    std::size_t records{0};
    double error{0.0};          ///< |measured - ideal nonfaulty field|
    double interference{0.0};   ///< strength of the faulty records' sum
    FieldValue z;               ///< the measured field, node frame
};

/// Sampled per-node state plus the raw event history of one run.
struct Trace {
    SimConfig config;
    std::int64_t nodes{0};      ///< nonfaulty node count
    double flush_time{0.0};     ///< omega / (1 - rho)
    double t_end{0.0};
    double sample_dt{0.0};

    std::vector<double> sample_times;
    std::vector<double> sync;         ///< [sample][node] Phi
    std::vector<double> pulse;        ///< [sample][node] phi
    std::vector<double> dmf_strength; ///< [sample][node] last measured strength
    std::vector<double> dmf_angle;    ///< [sample][node] last angle, NaN if none

    std::vector<std::vector<double>> pulse_times;  ///< per nonfaulty node
    std::vector<Measurement> measurements;
    std::vector<PulseEvent> events;                 ///< generate and deliver, processing order

    [[nodiscard]] std::size_t samples() const noexcept { return sample_times.size(); }
    [[nodiscard]] double sync_at(std::size_t s, std::size_t q) const { return sync[s * nodes + q]; }
    [[nodiscard]] std::span<const double> sync_row(std::size_t s) const {
        return {sync.data() + s * nodes, static_cast<std::size_t>(nodes)};
    }
};

namespace detail {

struct SimNode {
    explicit SimNode(SimOscillator o) : osc{std::move(o)} {}

    SimOscillator osc;
    Tick counter0{0};             ///< counter value at local tick 0
    double anchor_time{0.0};
    double anchor_ticks{0.0};
    double timer_target{0.0};     ///< unwrapped local tick of the next pulse
    double last_pulse_ticks{0.0};
    double sync_anchor_ticks{0.0};
    double sync_anchor_value{0.0};
    double last_strength{0.0};
    std::optional<double> last_angle;
    double last_pulse_time{0.0};
    std::uint64_t pulse_count{0};
};

struct QueuedEvent {
    double time;
    NodeId node;
    EventKind kind;
    std::uint64_t seq;
    NodeId sender;
    double gen_time;
    bool faulty;

    [[nodiscard]] auto key() const { return std::tie(time, node, kind, seq); }
    bool operator>(const QueuedEvent& o) const { return key() > o.key(); }
};

}  // namespace detail

/// Adversary strategy implied by a config; its seed is derived from the run seed.
inline AdversaryStrategy strategy_from_config(const SimConfig& c) {
    AdversaryStrategy s;
    s.delay_policy = c.delay_policy;
    s.drift_policy = c.drift_policy;
    s.fault_policy = c.fault_strategy;
    s.band_choice_policy = c.band_choice;
    s.d = c.d;
    s.rho = c.rho;
    s.seed = mix_keys({c.seed, 0xadc0ffeeULL});
    s.band_lo = c.mode == SyncMode::extended ? c.R0 : c.R0 - c.eps_max;
    s.band_hi = c.mode == SyncMode::extended ? c.R1 : c.R0 + c.eps_max;
    return s;
}

class Simulator {
public:
    Simulator(SimConfig config, AdversaryStrategy strategy)
        : c_{std::move(config)}, s_{strategy}, injector_{strategy, faulty_ids(c_), nonfaulty_ids(c_)} {
        c_.validate();
        if (c_.trig != TrigPath::floating) {
            throw ConfigError("the event simulator runs on the floating-point path only");
        }
        q_count_ = c_.n - c_.f;
        for (NodeId q = 0; q < q_count_; ++q) {
            ids_.push_back(q);
        }
        for (NodeId i = 0; i < c_.n; ++i) {
            all_ids_.push_back(i);
        }
    }

    static std::vector<NodeId> faulty_ids(const SimConfig& c) {
        std::vector<NodeId> v;
        for (NodeId i = c.n - c.f; i < c.n; ++i) v.push_back(i);
        return v;
    }
    static std::vector<NodeId> nonfaulty_ids(const SimConfig& c) {
        std::vector<NodeId> v;
        for (NodeId i = 0; i < c.n - c.f; ++i) v.push_back(i);
        return v;
    }

    /// Reference time covered by a run: flush, the configured pulse steps
    /// spread over n nodes, then the stabilization hold.
    static double run_length(const SimConfig& c) {
        return c.omega / (1.0 - c.rho) + static_cast<double>(c.resolved_steps()) / static_cast<double>(c.n) + c.hold;
    }

    Trace run() { return run_until(run_length(c_)); }

    Trace run_until(double t_end) {
        init_nodes();
        Trace tr;
        tr.config = c_;
        tr.nodes = q_count_;
        tr.flush_time = c_.omega / (1.0 - c_.rho);
        tr.t_end = t_end;
        tr.sample_dt = c_.sample_dt;
        tr.pulse_times.assign(static_cast<std::size_t>(q_count_), {});

        for (NodeId q = 0; q < q_count_; ++q) {
            push_generate(q);
        }
        if (c_.f > 0 && c_.fault_strategy != FaultPolicy::silent) {
            push({0.0, c_.n, EventKind::timer, seq_++, -1, 0.0, false});
        }

        std::size_t next_sample = 0;
        auto sample_until = [&](double t, bool inclusive) {
            for (;;) {
                const double st = static_cast<double>(next_sample) * c_.sample_dt;
                if (st > t_end || st > t || (!inclusive && st == t)) break;
                take_sample(tr, st);
                ++next_sample;
            }
        };

        while (!queue_.empty()) {
            const auto ev = queue_.top();
            if (ev.time >= t_end) break;
            queue_.pop();
            sample_until(ev.time, false);
            switch (ev.kind) {
                case EventKind::generate: on_generate(tr, ev); break;
                case EventKind::deliver: on_deliver(tr, ev); break;
                case EventKind::timer: on_timer(ev); break;
            }
        }
        sample_until(t_end, true);
        return tr;
    }

    /// Startup offsets of every nonfaulty node, drawn exactly as run() draws
    /// them (first draw of each node's stream).
    [[nodiscard]] std::vector<double> startup_offsets() {
        init_nodes();
        return startup_x_;
    }

    [[nodiscard]] const SimConfig& config() const noexcept { return c_; }

private:
    void push(detail::QueuedEvent e) { queue_.push(e); }

    double drift(NodeId q, double t) const { return schedule_drift(s_, q, t); }

    double ticks_at(const detail::SimNode& nd, double t) const {
        double tt = nd.anchor_time;
        double L = nd.anchor_ticks;
        const double T = static_cast<double>(c_.T);
        while (tt < t) {
            const double seg_end = std::floor(tt) + 1.0;
            const double e = std::min(seg_end, t);
            L += T * drift(nd.osc.id, tt) * (e - tt);
            tt = e;
        }
        return L;
    }

    double time_at_ticks(const detail::SimNode& nd, double target) const {
        double tt = nd.anchor_time;
        double L = nd.anchor_ticks;
        const double T = static_cast<double>(c_.T);
        for (;;) {
            const double sp = drift(nd.osc.id, tt);
            const double seg_end = std::floor(tt) + 1.0;
            const double L_end = L + T * sp * (seg_end - tt);
            if (L_end >= target) {
                return tt + (target - L) / (T * sp);
            }
            tt = seg_end;
            L = L_end;
        }
    }

    Tick counter_at(const detail::SimNode& nd, double local_ticks) const {
        const auto whole = static_cast<Tick>(std::floor(local_ticks + 1e-9));
        return (nd.counter0 + whole) % c_.c_max;
    }

    void init_nodes() {
        nodes_.clear();
        startup_x_.clear();
        queue_ = {};
        seq_ = 0;
        injector_ = FaultInjector{s_, faulty_ids(c_), nonfaulty_ids(c_)};
        recent_pulses_.clear();
        Rng hostile = Rng::stream(c_.seed, 0x4057113ULL);
        const double T = static_cast<double>(c_.T);
        for (NodeId q = 0; q < q_count_; ++q) {
            detail::SimNode nd{SimOscillator{q, c_.mode, c_.window_ticks(), c_.c_max, c_.seed}};
            double x = 0.0;
            if (c_.mode == SyncMode::one_kick_auth) {
                x = nd.osc.one_kick.initial_offset(nd.osc.rng);
            } else {
                x = draw_offset(nd.osc.rng);
            }
            startup_x_.push_back(x);
            if (c_.hostile_init) {
                nd.counter0 = static_cast<Tick>(hostile.below(static_cast<std::uint64_t>(c_.c_max)));
                // Arbitrary pulsing phase: the first timer is anywhere in (0, 3T/2].
                nd.timer_target = static_cast<double>(1 + hostile.below(static_cast<std::uint64_t>(3 * c_.T / 2)));
                nd.sync_anchor_value = hostile.uniform();
                plant_garbage(nd, hostile);
            } else {
                nd.timer_target = static_cast<double>(std::llround((1.0 + x) * T));
            }
            nd.osc.hw_counter = nd.counter0;
            nd.osc.pulse_timer = (nd.counter0 + static_cast<Tick>(nd.timer_target)) % c_.c_max;
            nodes_.push_back(std::move(nd));
        }
    }

    /// Window contents chosen by the adversary: up to N records, either
    /// clustered at one phase (a fake strong field) or spread uniformly.
    void plant_garbage(detail::SimNode& nd, Rng& hostile) {
        const auto N = static_cast<std::uint64_t>(c_.record_count());
        const auto count = hostile.below(N + 1);
        const bool clustered = hostile.coin();
        const double phase = hostile.uniform();
        const auto W = static_cast<std::uint64_t>(c_.window_ticks());
        for (std::uint64_t i = 0; i < count; ++i) {
            Tick age;
            if (clustered) {
                const auto cycles = hostile.below(static_cast<std::uint64_t>(c_.omega));
                age = static_cast<Tick>(cycles) * c_.T + static_cast<Tick>(phase * static_cast<double>(c_.T));
                age = std::min<Tick>(age, static_cast<Tick>(W) - 1);
            } else {
                age = static_cast<Tick>(hostile.below(W));
            }
            const Tick tick = ((nd.counter0 - age) % c_.c_max + c_.c_max) % c_.c_max;
            nd.osc.anon_window.plant(tick, RecordInfo{});
            if (nd.osc.auth_window) {
                nd.osc.auth_window->record(static_cast<NodeId>(hostile.below(static_cast<std::uint64_t>(c_.n))), tick);
            }
        }
    }

    void push_generate(NodeId q) {
        auto& nd = nodes_[static_cast<std::size_t>(q)];
        const double t = time_at_ticks(nd, nd.timer_target);
        push({t, q, EventKind::generate, seq_++, q, t, false});
    }

    NormalizedPhase sync_phase_at(const detail::SimNode& nd, double local_ticks) const {
        return NormalizedPhase{nd.sync_anchor_value + (local_ticks - nd.sync_anchor_ticks) / static_cast<double>(c_.T)};
    }

    void take_sample(Trace& tr, double t) {
        tr.sample_times.push_back(t);
        for (const auto& nd : nodes_) {
            const double L = ticks_at(nd, t);
            tr.sync.push_back(sync_phase_at(nd, L).value());
            const double span = nd.timer_target - nd.last_pulse_ticks;
            tr.pulse.push_back(span > 0 ? std::clamp((L - nd.last_pulse_ticks) / span, 0.0, 1.0) : 0.0);
            tr.dmf_strength.push_back(nd.last_strength);
            tr.dmf_angle.push_back(nd.last_angle.value_or(std::numeric_limits<double>::quiet_NaN()));
        }
    }

    SystemSnapshot snapshot(double t) const {
        SystemSnapshot snap;
        snap.t = t;
        for (const auto& nd : nodes_) {
            NodeView v;
            v.id = nd.osc.id;
            v.last_pulse_time = nd.last_pulse_time;
            v.sync_phase = sync_phase_at(nd, ticks_at(nd, t));
            v.last_strength = nd.last_strength;
            if (nd.last_angle) v.last_angle = NormalizedPhase{*nd.last_angle};
            snap.nodes.push_back(v);
        }
        FieldValue z;
        for (double p : recent_pulses_) z += cycles_to_unit(p);
        snap.field_phase = z.angle();
        return snap;
    }

    void on_timer(const detail::QueuedEvent& ev) {
        const auto snap = snapshot(ev.time);
        for (const auto& fd : injector_.emit(ev.time, ev.time + 1.0, snap)) {
            push({fd.time, fd.receiver, EventKind::deliver, seq_++, fd.faulty, fd.time, true});
        }
        push({ev.time + 1.0, c_.n, EventKind::timer, seq_++, -1, 0.0, false});
    }

    void on_deliver(Trace& tr, const detail::QueuedEvent& ev) {
        auto& nd = nodes_[static_cast<std::size_t>(ev.node)];
        const double L = ticks_at(nd, ev.time);
        const Tick tick = counter_at(nd, L);
        nd.osc.anon_window.insert(tick, tick, RecordInfo{ev.sender, ev.faulty, ev.gen_time});
        if (nd.osc.auth_window) {
            nd.osc.auth_window->record(ev.sender, tick);
        }
        tr.events.push_back({EventKind::deliver, ev.sender, ev.node, ev.time, ev.gen_time, tick, ev.faulty});
    }

    void on_generate(Trace& tr, const detail::QueuedEvent& ev) {
        const NodeId q = ev.node;
        auto& nd = nodes_[static_cast<std::size_t>(q)];
        const double t = ev.time;
        const double L = nd.timer_target;
        const Tick now = counter_at(nd, L);
        nd.anchor_time = t;
        nd.anchor_ticks = L;
        nd.osc.hw_counter = now;
        nd.osc.pulse_phase = NormalizedPhase{0.0};

        tr.pulse_times[static_cast<std::size_t>(q)].push_back(t);
        tr.events.push_back({EventKind::generate, q, -1, t, t, now, false});

        for (NodeId r : ids_) {
            const double delay = schedule_delay(s_, q, r, t);
            push({t + delay, r, EventKind::deliver, seq_++, q, t, false});
        }

        // Measure before deciding; the node's own pulse of this instant is not yet received.
        Measurement m;
        m.t = t;
        m.node = q;
        FieldValue ideal;
        FieldValue faulty;
        FieldValue z;
        if (nd.osc.auth_window) {
            z = measure_authenticated(*nd.osc.auth_window, all_ids_, own_last_tick(nd, now), now, c_.T, c_.omega);
            m.records = static_cast<std::size_t>(c_.n);
            ideal = z;
        } else {
            auto& w = nd.osc.anon_window;
            w.prune(now);
            for (const auto& rec : w.records()) {
                const FieldValue u = record_phasor(rec.tick, now, c_.T, c_.omega, c_.c_max);
                z += u;
                if (rec.info.faulty) {
                    faulty += u;
                } else if (rec.info.sender >= 0) {
                    ideal += cycles_to_unit(rec.info.gen_time - t);
                }
            }
            m.records = w.size();
        }
        m.z = z;
        m.strength = z.strength();
        if (auto a = z.angle()) m.angle = a->value();
        m.error = (z - ideal).strength();
        m.interference = faulty.strength();

        DecisionInputs in{c_.R0, c_.R1, c_.eps_max, std::nullopt};
        if (c_.mode == SyncMode::half_random_walk) {
            const double r = m.strength;
            if (r >= c_.R0 - c_.eps_max && r < c_.R0 + c_.eps_max) {
                NodeView view{q, nd.last_pulse_time, sync_phase_at(nd, L), nd.last_strength, std::nullopt};
                std::optional<NormalizedPhase> angle;
                if (m.angle) angle = NormalizedPhase{*m.angle};
                in.band_choice = choose_band(s_, view, t, angle, snapshot(t), nd.pulse_count);
            }
        }
        const SyncDecision dec = decide(nd.osc, z, in);
        m.decision = dec.kind();

        if (auto a = z.angle()) {
            nd.osc = adjust_sync_phase(std::move(nd.osc), z);
            nd.sync_anchor_ticks = L;
            nd.sync_anchor_value = nd.osc.sync_phase.value();
        }
        nd.last_strength = m.strength;
        nd.last_angle = m.angle;
        nd.last_pulse_time = t;
        nd.last_pulse_ticks = L;
        ++nd.pulse_count;

        recent_pulses_.push_back(t);
        while (!recent_pulses_.empty() && recent_pulses_.front() < t - static_cast<double>(c_.omega)) {
            recent_pulses_.pop_front();
        }

        const Tick kappa = schedule_pulse_timer(now, std::clamp(dec.next_x, -0.5, 0.5), c_.T, c_.c_max);
        const Tick delta = ((kappa - now) % c_.c_max + c_.c_max) % c_.c_max;
        nd.osc.pulse_timer = kappa;
        nd.timer_target = L + static_cast<double>(delta);
        tr.measurements.push_back(m);
        push_generate(q);
    }

    /// Latest own-pulse tick: the node's own record if fresh, else now.
    Tick own_last_tick(const detail::SimNode& nd, Tick now) const {
        return nd.osc.auth_window->fresh(nd.osc.id, now).value_or(now);
    }

    SimConfig c_;
    AdversaryStrategy s_;
    FaultInjector injector_;
    std::int64_t q_count_{0};
    std::vector<NodeId> ids_;
    std::vector<NodeId> all_ids_;
    std::vector<detail::SimNode> nodes_;
    std::vector<double> startup_x_;
    std::priority_queue<detail::QueuedEvent, std::vector<detail::QueuedEvent>, std::greater<>> queue_;
    std::uint64_t seq_{0};
    std::deque<double> recent_pulses_;
};

/// Runs one simulation; the config must already be valid.
inline Trace run(const SimConfig& config, const AdversaryStrategy& strategy) {
    Simulator sim{config, strategy};
    return sim.run();
}

inline Trace run(const SimConfig& config) {
    return run(config, strategy_from_config(config));
}

/// Strength of the authenticated one-kick field right after every node's
/// first pulse, with perfect clocks and zero delay: |sum_q e^{2 pi j x_q}|.
inline double one_kick_initial_strength(const SimConfig& config) {
    SimConfig c = config;
    c.mode = SyncMode::one_kick_auth;
    c.hostile_init = false;
    Simulator sim{c, strategy_from_config(c)};
    FieldValue z;
    for (double x : sim.startup_offsets()) {
        z += cycles_to_unit(x);
    }
    return z.strength();
}

// ---- audits ----------------------------------------------------------------

struct AuditReport {
    std::size_t delay_violations{0};
    std::size_t frequency_violations{0};
    std::size_t deliveries_checked{0};
    std::size_t sequences_checked{0};
    [[nodiscard]] bool ok() const noexcept { return delay_violations == 0 && frequency_violations == 0; }
};

/// Checks that no interval [t_i, t_j] of sorted pulse times holds more than
/// 2(1+rho)(t_j - t_i) + 1 pulses.
inline std::size_t frequency_cap_violations(std::span<const double> times, double rho, double slack = 1e-9) {
    std::size_t bad = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        for (std::size_t j = i + 1; j < times.size(); ++j) {
            const double count = static_cast<double>(j - i + 1);
            if (count > 2.0 * (1.0 + rho) * (times[j] - times[i]) + 1.0 + slack) {
                ++bad;
            }
        }
    }
    return bad;
}

/// Delay bound for nonfaulty deliveries and the pulsing-frequency cap for
/// every nonfaulty node and every (faulty sender, receiver) stream.
inline AuditReport audit(const Trace& tr) {
    AuditReport rep;
    const double d = tr.config.d;
    const double rho = tr.config.rho;
    std::map<std::pair<NodeId, NodeId>, std::vector<double>> faulty_streams;
    for (const auto& e : tr.events) {
        if (e.kind != EventKind::deliver) continue;
        if (e.faulty_sender) {
            faulty_streams[{e.sender, e.receiver}].push_back(e.ref_time);
            continue;
        }
        ++rep.deliveries_checked;
        const double delay = e.ref_time - e.gen_time;
        if (delay < -1e-12 || delay > d + 1e-12) ++rep.delay_violations;
    }
    for (const auto& times : tr.pulse_times) {
        ++rep.sequences_checked;
        rep.frequency_violations += frequency_cap_violations(times, rho);
    }
    for (auto& [key, times] : faulty_streams) {
        ++rep.sequences_checked;
        std::sort(times.begin(), times.end());
        rep.frequency_violations += frequency_cap_violations(times, rho);
    }
    return rep;
}

}  // namespace pulsefield
