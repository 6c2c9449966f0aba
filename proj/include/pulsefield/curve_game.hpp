// The curves-moving game: N unit segments laid head to tail. Each step drops
// the tail segment and grows a new head chosen by the feedback rule from the
// endpoint vector. The endpoint distance R(k) plays the DMF strength.
//
// The game is templated on a trig backend. FloatTrig works on doubles;
// IntegerTrig keeps segment phases as raw fixed-point integers, sums them on
// the 1-norm circle and decides with the zigzag arctangent, so the decision
// path never touches floating point.
#pragma once

#include <pulsefield/approx_trig.hpp>
#include <pulsefield/config.hpp>
#include <pulsefield/oscillator.hpp>
#include <pulsefield/phase.hpp>
#include <pulsefield/random.hpp>
#include <pulsefield/tags.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace pulsefield {

enum class GameMode { basic, extended };

struct FloatTrig {
    using Phase = double;
    using Sum = FieldValue;

    static Phase random_phase(Rng& rng) { return rng.uniform(); }
    static FieldValue unit(Phase p) { return cycles_to_unit(p); }
    static void add(Sum& s, Phase p) { s += unit(p); }
    static void sub(Sum& s, Phase p) { s -= unit(p); }
    static double strength(const Sum& s) { return s.strength(); }
    static std::optional<Phase> angle(const Sum& s) {
        if (auto a = s.angle()) return a->value();
        return std::nullopt;
    }
    static Phase mirror(Phase proposal, Phase field) {
        return pulsefield::mirror(NormalizedPhase{proposal}, NormalizedPhase{field}).value();
    }
    static Phase rotate(Phase p, double cycles) { return wrap_unit(p + cycles); }
    static double cycles(Phase p) { return p; }
};

template <int Bits = 16>
struct BasicIntegerTrig {
    using Phase = BasicFixedPhase<Bits>;
    using Sum = L1Sum;
    static constexpr std::int64_t K = Phase::K;

    static Phase random_phase(Rng& rng) { return Phase::from_raw(static_cast<std::int64_t>(rng.below(K))); }
    static FieldValue unit(Phase p) { return cycles_to_unit(p.cycles()); }
    static void add(Sum& s, Phase p) { s += l1_sincos(p); }
    static void sub(Sum& s, Phase p) { s -= l1_sincos(p); }
    /// 1-norm of the sum over K: N for N aligned segments.
    static double strength(const Sum& s) { return static_cast<double>(s.l1_norm()) / static_cast<double>(K); }
    static std::optional<Phase> angle(const Sum& s) {
        if (s.is_zero()) return std::nullopt;
        return zigzag_atan2<Bits>(s.sy, s.sx);
    }
    static Phase mirror(Phase proposal, Phase field) { return fixed_mirror(proposal, field); }
    static Phase rotate(Phase p, double cycles) {
        return Phase::from_raw(p.raw + static_cast<std::int64_t>(std::llround(cycles * static_cast<double>(K))));
    }
    static double cycles(Phase p) { return p.cycles(); }
};

using IntegerTrig = BasicIntegerTrig<>;

template <typename Trig = FloatTrig>
class BasicCurveState {
public:
    using Phase = typename Trig::Phase;

    /// N segments with independent uniform phases.
    static BasicCurveState random(std::size_t N, Rng& rng) {
        std::vector<Phase> ps;
        ps.reserve(N);
        for (std::size_t i = 0; i < N; ++i) ps.push_back(Trig::random_phase(rng));
        return BasicCurveState{ps};
    }

    explicit BasicCurveState(const std::vector<Phase>& phases) : segs_(phases.begin(), phases.end()) {
        if (segs_.empty()) throw std::invalid_argument("curve needs at least one segment");
        for (const auto& p : segs_) {
            Trig::add(sum_, p);
            z_ += Trig::unit(p);
        }
    }

    /// Drops the tail and appends a head.
    void push_head(Phase head) {
        Trig::sub(sum_, segs_.front());
        z_ -= Trig::unit(segs_.front());
        segs_.pop_front();
        segs_.push_back(head);
        Trig::add(sum_, head);
        z_ += Trig::unit(head);
        ++k_;
    }

    [[nodiscard]] std::size_t size() const noexcept { return segs_.size(); }
    [[nodiscard]] std::int64_t step_index() const noexcept { return k_; }
    [[nodiscard]] const std::deque<Phase>& phases() const noexcept { return segs_; }
    [[nodiscard]] const typename Trig::Sum& sum() const noexcept { return sum_; }

    /// Strength in the backend's own metric; this is what decisions see.
    [[nodiscard]] double strength() const { return Trig::strength(sum_); }
    [[nodiscard]] std::optional<Phase> angle() const { return Trig::angle(sum_); }

    /// Euclidean endpoint distance of the actual unit segments, kept as a
    /// running sum.
    [[nodiscard]] double endpoint_distance() const { return z_.strength(); }

    /// The same distance summed from scratch.
    [[nodiscard]] double endpoint_distance_exact() const {
        FieldValue z;
        for (const auto& p : segs_) z += Trig::unit(p);
        return z.strength();
    }

    [[nodiscard]] std::vector<FieldValue> segments() const {
        std::vector<FieldValue> v;
        for (const auto& p : segs_) v.push_back(Trig::unit(p));
        return v;
    }

private:
    std::deque<Phase> segs_;
    typename Trig::Sum sum_{};
    FieldValue z_;
    std::int64_t k_{0};
};

using CurveState = BasicCurveState<FloatTrig>;

struct StepRule {
    GameMode mode{GameMode::extended};
    double R0{0.0};
    double R1{0.0};
    double eps_max{0.0};
    BandChoice band_choice{BandChoice::always_0};
    bool noise{false};
};

struct StepRecord {
    double r_before{0.0};
    double r_after{0.0};
    DecisionKind kind{DecisionKind::random};
};

namespace detail {

/// Basic mode middle band. The adaptive adversary keeps walking below R0 and
/// locks in above it.
inline bool band_overwrite(const StepRule& rule, double r, Rng& rng) {
    switch (rule.band_choice) {
        case BandChoice::always_0: return false;
        case BandChoice::always_1: return true;
        case BandChoice::random: return rng.coin();
        case BandChoice::adaptive: return r >= rule.R0;
    }
    return false;
}

}  // namespace detail

/// One step in place. Randomness is drawn in a fixed order: noise first,
/// then the proposal or band coin, so equal seeds give equal games.
template <typename Trig>
StepRecord advance(BasicCurveState<Trig>& state, const StepRule& rule, Rng& rng) {
    using Phase = typename Trig::Phase;
    StepRecord rec;
    const double r = state.strength();
    rec.r_before = r;
    std::optional<Phase> field = state.angle();
    if (rule.noise && field && r > 0.0) {
        const double bound = std::asin(std::min(1.0, rule.eps_max / r)) / (2.0 * std::numbers::pi);
        field = Trig::rotate(*field, rng.uniform(-bound, bound));
    }

    bool overwrite = false;
    bool mirror_tier = false;
    if (rule.mode == GameMode::basic) {
        if (r >= rule.R0 + rule.eps_max) overwrite = true;
        else if (r >= rule.R0 - rule.eps_max) overwrite = detail::band_overwrite(rule, r, rng);
    } else {
        overwrite = r >= rule.R1 && r >= rule.R0;
        mirror_tier = !overwrite && r >= rule.R0;
    }

    Phase head;
    if (overwrite) {
        if (!field) throw std::logic_error("overwrite step with a zero endpoint vector");
        head = *field;
        rec.kind = DecisionKind::overwrite;
    } else {
        head = Trig::random_phase(rng);
        rec.kind = DecisionKind::random;
        if (mirror_tier && field) {
            const Phase m = Trig::mirror(head, *field);
            if (!(m == head)) {
                head = m;
                rec.kind = DecisionKind::mirrored;
            }
        }
    }
    state.push_head(head);
    rec.r_after = state.strength();
    return rec;
}

template <typename Trig>
BasicCurveState<Trig> step(BasicCurveState<Trig> state, const StepRule& rule, Rng& rng) {
    advance(state, rule, rng);
    return state;
}

using ComplexMatrix = std::vector<std::vector<std::complex<double>>>;

/// A = a [1^T; 0] + subdiagonal shift with a = b / r.
inline ComplexMatrix transition_matrix(std::size_t N, double b, double r) {
    ComplexMatrix A(N, std::vector<std::complex<double>>(N, 0.0));
    const double a = b == 0.0 ? 0.0 : b / r;
    for (std::size_t j = 0; j < N; ++j) A[0][j] = a;
    for (std::size_t i = 1; i < N; ++i) A[i][i - 1] = 1.0;
    return A;
}

/// Matrix of the basic rule at the current state, for deterministic tiers and
/// fixed band choices. The coordinate order is head first.
template <typename Trig>
ComplexMatrix transition_matrix(const BasicCurveState<Trig>& state, const StepRule& rule) {
    const double r_raw = state.strength();
    double b = 0.0;
    if (r_raw >= rule.R0 + rule.eps_max) b = 1.0;
    else if (r_raw >= rule.R0 - rule.eps_max) b = rule.band_choice == BandChoice::always_1 ? 1.0 : 0.0;
    const double r = std::max(rule.R0 - rule.eps_max, r_raw);
    return transition_matrix(state.size(), b, r);
}

/// Pr(strength of an N-step uniform walk >= r), large-N approximation.
inline double rayleigh_tail(double N, double r) {
    if (r < 0.0) throw std::domain_error("rayleigh_tail: r must be >= 0");
    return std::exp(-r * r / N);
}

inline double uniform_walk_strength(std::size_t N, Rng& rng) {
    FieldValue z;
    for (std::size_t i = 0; i < N; ++i) z += cycles_to_unit(rng.uniform());
    return z.strength();
}

/// Projection onto the field direction of the head chosen by the mirror tier
/// for one proposal.
inline double head_projection(NormalizedPhase proposal, NormalizedPhase field) {
    const NormalizedPhase head = mirror(proposal, field);
    return std::cos(2.0 * std::numbers::pi * (head - field).value());
}

struct GameParams {
    std::size_t N{100};
    StepRule rule;
    std::int64_t steps{300};
    std::int64_t trials{10000};
    std::uint64_t seed{1};
    TrigPath trig{TrigPath::floating};
    unsigned parallel{1};
    double high_cut{0.9};      ///< "close to N" means final R >= high_cut * N
};

struct StrengthStats {
    std::size_t N{0};
    double R0{0.0};
    double high_cut{0.9};
    std::vector<double> finals;         ///< per trial, Euclidean
    std::vector<double> mean_series;    ///< per step, across trials
    std::vector<double> min_series;
    std::size_t overwrite_steps{0};
    std::size_t overwrite_violations{0};
    double max_displacement{0.0};

    [[nodiscard]] double fraction_high() const { return fraction([&](double r) { return r >= high_cut * N; }); }
    [[nodiscard]] double fraction_mid() const {
        return fraction([&](double r) { return r >= R0 && r < high_cut * N; });
    }
    [[nodiscard]] double fraction_low() const { return fraction([&](double r) { return r < R0; }); }

    template <typename Pred>
    [[nodiscard]] double fraction(Pred pred) const {
        if (finals.empty()) return 0.0;
        const auto c = std::count_if(finals.begin(), finals.end(), pred);
        return static_cast<double>(c) / static_cast<double>(finals.size());
    }
};

struct TrialResult {
    double final_r{0.0};
    std::vector<double> series;   ///< Euclidean strength after each step, series[0] initial
    std::size_t overwrite_steps{0};
    std::size_t overwrite_violations{0};
    double max_displacement{0.0};
};

template <typename Trig>
TrialResult play_trial(const GameParams& p, std::int64_t trial) {
    Rng rng = Rng::stream(p.seed, static_cast<std::uint64_t>(trial));
    auto state = BasicCurveState<Trig>::random(p.N, rng);
    TrialResult out;
    out.series.reserve(static_cast<std::size_t>(p.steps) + 1);
    out.series.push_back(state.endpoint_distance());
    for (std::int64_t k = 0; k < p.steps; ++k) {
        const StepRecord rec = advance(state, p.rule, rng);
        if (rec.kind == DecisionKind::overwrite) {
            ++out.overwrite_steps;
            if (rec.r_after < rec.r_before - 1e-9) ++out.overwrite_violations;
        }
        const double r = state.endpoint_distance();
        out.max_displacement = std::max(out.max_displacement, std::abs(r - out.series.back()));
        out.series.push_back(r);
    }
    out.final_r = out.series.back();
    return out;
}

/// Independent trials, optionally on several threads; results are reduced in
/// trial order so the output does not depend on the thread count.
inline StrengthStats run_game(const GameParams& p) {
    if (p.trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (p.N < 1) throw std::invalid_argument("N must be >= 1");
    std::vector<TrialResult> results(static_cast<std::size_t>(p.trials));
    auto work = [&](unsigned worker, unsigned workers) {
        for (std::int64_t t = worker; t < p.trials; t += workers) {
            results[static_cast<std::size_t>(t)] = p.trig == TrigPath::integer ? play_trial<IntegerTrig>(p, t)
                                                                               : play_trial<FloatTrig>(p, t);
        }
    };
    const unsigned workers = std::max(1u, p.parallel);
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    }

    StrengthStats s;
    s.N = p.N;
    s.R0 = p.rule.R0;
    s.high_cut = p.high_cut;
    const auto len = static_cast<std::size_t>(p.steps) + 1;
    s.mean_series.assign(len, 0.0);
    s.min_series.assign(len, static_cast<double>(p.N));
    for (const auto& r : results) {
        s.finals.push_back(r.final_r);
        for (std::size_t k = 0; k < len; ++k) {
            s.mean_series[k] += r.series[k];
            s.min_series[k] = std::min(s.min_series[k], r.series[k]);
        }
        s.overwrite_steps += r.overwrite_steps;
        s.overwrite_violations += r.overwrite_violations;
        s.max_displacement = std::max(s.max_displacement, r.max_displacement);
    }
    for (auto& m : s.mean_series) m /= static_cast<double>(p.trials);
    return s;
}

/// Game parameters for a config: N = n * omega, thresholds and mode from the
/// config, steps from its resolved step count.
inline GameParams game_params_from(const SimConfig& c) {
    GameParams p;
    p.N = static_cast<std::size_t>(c.record_count());
    p.rule.mode = c.mode == SyncMode::extended ? GameMode::extended : GameMode::basic;
    p.rule.R0 = c.R0;
    p.rule.R1 = c.R1;
    p.rule.eps_max = c.eps_max;
    p.rule.band_choice = c.band_choice;
    p.rule.noise = c.noise;
    if (c.mode == SyncMode::random_walk || c.mode == SyncMode::one_kick_auth) {
        p.rule.R0 = std::numeric_limits<double>::infinity();
    }
    p.steps = c.resolved_steps();
    p.trials = c.trials;
    p.seed = c.seed;
    p.trig = c.trig;
    return p;
}

}  // namespace pulsefield
