// Reception windows and discrete mean-field (DMF) measurement.
#pragma once

#include <pulsefield/phase.hpp>

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace pulsefield {

using Tick = std::int64_t;

/// (a - b) mod c_max read as a signed difference in (-c_max/2, c_max/2].
inline Tick tick_diff(Tick a, Tick b, Tick c_max) noexcept {
    Tick d = (a - b) % c_max;
    if (d < 0) d += c_max;
    if (d > c_max / 2) d -= c_max;
    return d;
}

struct NoRecordInfo {};

/// Anonymous reception window: receive ticks of the last omega*T ticks, in
/// arrival order. Duplicate ticks are kept; overlapped pulses count
/// separately. Info carries per-record bookkeeping that measurement ignores.
template <typename Info = NoRecordInfo>
class BasicReceptionWindow {
public:
    struct Record {
        Tick tick;
        Info info;
    };

    BasicReceptionWindow(Tick window_ticks, Tick c_max) : window_ticks_{window_ticks}, c_max_{c_max} {
        if (window_ticks <= 0 || c_max <= 2 * window_ticks) {
            throw std::invalid_argument("reception window needs 0 < window_ticks and c_max > 2*window_ticks");
        }
    }

    void insert(Tick tick, Tick now, Info info = {}) {
        prune(now);
        if (contains(tick, now)) {
            records_.push_back({tick % c_max_, std::move(info)});
        }
    }

    /// Appends without age checks; used to plant arbitrary initial contents.
    void plant(Tick tick, Info info = {}) { records_.push_back({tick % c_max_, std::move(info)}); }

    /// Drops every record outside the last window_ticks ticks before now.
    void prune(Tick now) {
        std::erase_if(records_, [&](const Record& r) { return !contains(r.tick, now); });
    }

    [[nodiscard]] bool contains(Tick tick, Tick now) const noexcept {
        const Tick age = tick_diff(now, tick, c_max_);
        return age >= 0 && age < window_ticks_;
    }

    [[nodiscard]] const std::deque<Record>& records() const noexcept { return records_; }
    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
    [[nodiscard]] Tick window_ticks() const noexcept { return window_ticks_; }
    [[nodiscard]] Tick c_max() const noexcept { return c_max_; }

private:
    Tick window_ticks_;
    Tick c_max_;
    std::deque<Record> records_;
};

using ReceptionWindow = BasicReceptionWindow<>;

/// Unit phasor of one record seen from tick now: e^{2 pi j ((c - now)/T + omega)}.
/// omega counts whole cycles, so its term is the identity rotation.
inline FieldValue record_phasor(Tick c, Tick now, Tick T, [[maybe_unused]] Tick omega, Tick c_max) noexcept {
    const Tick diff = tick_diff(c, now, c_max);
    // Split whole cycles off first so large tick counts keep full precision.
    const Tick rem = ((diff % T) + T) % T;
    return cycles_to_unit(static_cast<double>(rem) / static_cast<double>(T));
}

/// Anonymous DMF over a list of receive ticks.
inline FieldValue measure_anonymous(std::span<const Tick> ticks, Tick now, Tick T, Tick omega, Tick c_max) {
    FieldValue z;
    for (Tick c : ticks) {
        z += record_phasor(c, now, T, omega, c_max);
    }
    return z;
}

/// Anonymous DMF of a window; the window is pruned to now first.
template <typename Info>
FieldValue measure_anonymous(BasicReceptionWindow<Info>& w, Tick now, Tick T, Tick omega) {
    w.prune(now);
    FieldValue z;
    for (const auto& r : w.records()) {
        z += record_phasor(r.tick, now, T, omega, w.c_max());
    }
    return z;
}

using NodeId = std::int64_t;

/// Authenticated window: one latest receive tick per sender.
class AuthWindow {
public:
    AuthWindow(Tick window_ticks, Tick c_max) : window_ticks_{window_ticks}, c_max_{c_max} {
        if (window_ticks <= 0 || c_max <= 2 * window_ticks) {
            throw std::invalid_argument("auth window needs 0 < window_ticks and c_max > 2*window_ticks");
        }
    }

    void record(NodeId sender, Tick tick) { latest_[sender] = tick % c_max_; }

    /// Latest tick from sender if it is inside the window ending at now.
    [[nodiscard]] std::optional<Tick> fresh(NodeId sender, Tick now) const {
        auto it = latest_.find(sender);
        if (it == latest_.end()) {
            return std::nullopt;
        }
        const Tick age = tick_diff(now, it->second, c_max_);
        if (age < 0 || age >= window_ticks_) {
            return std::nullopt;
        }
        return it->second;
    }

    [[nodiscard]] Tick window_ticks() const noexcept { return window_ticks_; }
    [[nodiscard]] Tick c_max() const noexcept { return c_max_; }

private:
    Tick window_ticks_;
    Tick c_max_;
    std::map<NodeId, Tick> latest_;
};

/// Authenticated DMF over the senders in V. A sender with no fresh record
/// is replaced by the owner's own pulse tick.
inline FieldValue measure_authenticated(const AuthWindow& w, std::span<const NodeId> V, Tick own_tick, Tick now,
                                        Tick T, Tick omega) {
    FieldValue z;
    for (NodeId id : V) {
        const Tick c = w.fresh(id, now).value_or(own_tick);
        z += record_phasor(c, now, T, omega, w.c_max());
    }
    return z;
}

/// Worst-case angle spread ratio (r_ab + r_cd) / r_bc of adjacent interval fields.
inline double gamma_bound(double r_ab, double r_cd, double r_bc) {
    if (!(r_bc > 0.0)) {
        throw std::domain_error("gamma_bound: r_bc must be positive");
    }
    return (r_ab + r_cd) / r_bc;
}

/// Reference-time DMF over pulse instants in the half-open interval [ta, tb):
/// sum of e^{2 pi j (t - ta)}.
inline FieldValue interval_field(std::span<const double> pulses, double ta, double tb) {
    FieldValue z;
    for (double t : pulses) {
        if (t >= ta && t < tb) {
            z += cycles_to_unit(t - ta);
        }
    }
    return z;
}

}  // namespace pulsefield
