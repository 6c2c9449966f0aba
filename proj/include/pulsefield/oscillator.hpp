// Per-node protocol: pulse timer scheduling, the synchronization modes, and
// synchronization-phase adjustment.
//
// Angle convention. A measured field angle psi is the delay, as a fraction of
// a cycle, from the measuring instant to the next field-aligned pulse instant
// (records that arrived a fraction e of a cycle ago contribute angle -e).
// Proposals for the next pulse use the same frame: a timer of (1 + x) T ticks
// has proposal angle x mod 1.
#pragma once

#include <pulsefield/dmf.hpp>
#include <pulsefield/phase.hpp>
#include <pulsefield/random.hpp>
#include <pulsefield/tags.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>

namespace pulsefield {

/// (c_now + (1 + x) T) mod c_max, rounded to the nearest tick.
inline Tick schedule_pulse_timer(Tick c_now, double x, Tick T, Tick c_max) {
    if (!(x >= -0.5 && x <= 0.5)) {
        throw std::invalid_argument("schedule_pulse_timer: offset must lie in [-1/2, 1/2]");
    }
    const Tick delta = static_cast<Tick>(std::llround((1.0 + x) * static_cast<double>(T)));
    Tick k = (c_now + delta) % c_max;
    return k < 0 ? k + c_max : k;
}

/// The offset in [-1/2, 1/2) whose timer fires at the given proposal angle.
inline double angle_to_offset(NormalizedPhase angle) noexcept {
    return angle.signed_offset();
}

inline NormalizedPhase offset_to_angle(double x) noexcept {
    return NormalizedPhase{x};
}

enum class DecisionKind { random, mirrored, overwrite };

struct SyncDecision {
    double next_x{0.0};
    std::optional<NormalizedPhase> overwrite_angle;
    bool mirrored{false};

    [[nodiscard]] DecisionKind kind() const noexcept {
        if (overwrite_angle) return DecisionKind::overwrite;
        return mirrored ? DecisionKind::mirrored : DecisionKind::random;
    }

    static SyncDecision random(double x) { return {x, std::nullopt, false}; }

    static SyncDecision overwrite(NormalizedPhase angle) {
        return {angle_to_offset(angle), angle, false};
    }
};

inline double draw_offset(Rng& rng) {
    return rng.uniform(-0.5, 0.5);
}

/// Reflects the proposal about the field angle when the two are more than a
/// quarter cycle apart: (2 field + 1/2 - proposal) mod 1.
inline NormalizedPhase mirror(NormalizedPhase proposal, NormalizedPhase field_angle) noexcept {
    if (ring_distance(field_angle, proposal) <= 0.25) {
        return proposal;
    }
    return NormalizedPhase{2.0 * field_angle.value() + 0.5 - proposal.value()};
}

/// Basic feedback rule. Below R0 - eps_max the node walks at random; at or
/// above R0 + eps_max it overwrites its next pulse angle with the field
/// angle; in between the adversary picks, defaulting to the random walk.
inline SyncDecision decide_half_random_walk(FieldValue z_hat, double R0, double eps_max,
                                            std::optional<bool> adversary_choice, Rng& rng) {
    const double r = z_hat.strength();
    bool overwrite;
    if (r < R0 - eps_max) {
        overwrite = false;
    } else if (r >= R0 + eps_max) {
        overwrite = true;
    } else {
        overwrite = adversary_choice.value_or(false);
    }
    if (!overwrite) {
        return SyncDecision::random(draw_offset(rng));
    }
    const auto angle = z_hat.angle();
    if (!angle) {
        throw std::logic_error("decide_half_random_walk: overwrite with a zero-strength field");
    }
    return SyncDecision::overwrite(*angle);
}

/// Three-tier rule with a given random proposal offset. Tiers are tested in
/// order: below R0 random, below R1 random then mirror, else overwrite.
inline SyncDecision decide_extended_with(FieldValue z_hat, double R0, double R1, double proposal_x) {
    const double r = z_hat.strength();
    if (r < R0) {
        return SyncDecision::random(proposal_x);
    }
    const auto angle = z_hat.angle();
    if (!angle) {
        // only reachable when R0 <= 0
        return SyncDecision::random(proposal_x);
    }
    if (r < R1) {
        const NormalizedPhase proposal = offset_to_angle(proposal_x);
        const NormalizedPhase m = mirror(proposal, *angle);
        if (m == proposal) {
            return SyncDecision::random(proposal_x);
        }
        return {angle_to_offset(m), std::nullopt, true};
    }
    return SyncDecision::overwrite(*angle);
}

inline SyncDecision decide_extended(FieldValue z_hat, double R0, double R1, Rng& rng) {
    return decide_extended_with(z_hat, R0, R1, draw_offset(rng));
}

/// One uniform offset at startup, then no further adjustment.
class OneKickSchedule {
public:
    double initial_offset(Rng& rng) {
        if (kicked_) {
            throw std::logic_error("one-kick offset requested twice");
        }
        kicked_ = true;
        return draw_offset(rng);
    }

    [[nodiscard]] double next_offset() const noexcept { return 0.0; }
    [[nodiscard]] bool kicked() const noexcept { return kicked_; }

private:
    bool kicked_{false};
};

/// Synchronization phase implied by a field measured now: the elapsed
/// fraction of a cycle since the field's reference pulse, i.e. -psi mod 1.
inline NormalizedPhase field_sync_phase(NormalizedPhase field_angle) noexcept {
    return -field_angle;
}

template <typename Info = NoRecordInfo>
struct BasicOscillatorState {
    NodeId id{0};
    NormalizedPhase pulse_phase;
    NormalizedPhase sync_phase;
    Tick hw_counter{0};
    Tick pulse_timer{0};
    BasicReceptionWindow<Info> anon_window;
    std::optional<AuthWindow> auth_window;
    SyncMode mode{SyncMode::extended};
    OneKickSchedule one_kick;
    Rng rng;

    BasicOscillatorState(NodeId node, SyncMode m, Tick window_ticks, Tick c_max, std::uint64_t seed)
        : id{node}, anon_window{window_ticks, c_max}, mode{m}, rng{Rng::stream(seed, static_cast<std::uint64_t>(node))} {
        if (m == SyncMode::one_kick_auth) {
            auth_window.emplace(window_ticks, c_max);
        }
    }
};

using OscillatorState = BasicOscillatorState<>;

/// Sets the synchronization phase from a field measured at this instant.
/// A zero-strength field leaves the state unchanged.
template <typename Info>
BasicOscillatorState<Info> adjust_sync_phase(BasicOscillatorState<Info> state, FieldValue z_hat) {
    if (auto angle = z_hat.angle()) {
        state.sync_phase = field_sync_phase(*angle);
    }
    return state;
}

/// Thresholds and adversary input consumed by decide().
struct DecisionInputs {
    double R0{0.0};
    double R1{0.0};
    double eps_max{0.0};
    std::optional<bool> band_choice;
};

/// Next-pulse decision for any mode. One-kick nodes never adjust after the
/// first pulse and random-walk nodes always draw.
template <typename Info>
SyncDecision decide(BasicOscillatorState<Info>& state, FieldValue z_hat, const DecisionInputs& in) {
    switch (state.mode) {
        case SyncMode::one_kick_auth:
            return SyncDecision::random(state.one_kick.next_offset());
        case SyncMode::random_walk:
            return SyncDecision::random(draw_offset(state.rng));
        case SyncMode::half_random_walk:
            return decide_half_random_walk(z_hat, in.R0, in.eps_max, in.band_choice, state.rng);
        case SyncMode::extended:
            return decide_extended(z_hat, in.R0, in.R1, state.rng);
    }
    return SyncDecision::random(0.0);
}

}  // namespace pulsefield
