#include <pulsefield/adversary.hpp>
#include <pulsefield/simulator.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

namespace pf = pulsefield;

namespace {

pf::AdversaryStrategy strategy(pf::FaultPolicy fp, double rho = 0.01, std::uint64_t seed = 1) {
    pf::AdversaryStrategy s;
    s.fault_policy = fp;
    s.d = 0.05;
    s.rho = rho;
    s.seed = seed;
    s.band_lo = 4;
    s.band_hi = 6;
    return s;
}

pf::SystemSnapshot snapshot_with_field(double t, double phase, double strength = 5.0) {
    pf::SystemSnapshot snap;
    snap.t = t;
    snap.field_phase = pf::NormalizedPhase{phase};
    for (pf::NodeId q = 0; q < 4; ++q) {
        snap.nodes.push_back({q, t - 0.1, pf::NormalizedPhase{0.0}, strength, pf::NormalizedPhase{0.0}});
    }
    return snap;
}

}  // namespace

TEST(Delay, Policies) {
    auto s = strategy(pf::FaultPolicy::silent);
    s.delay_policy = pf::DelayPolicy::zero;
    EXPECT_EQ(pf::schedule_delay(s, 0, 1, 3.2), 0.0);
    s.delay_policy = pf::DelayPolicy::max;
    EXPECT_EQ(pf::schedule_delay(s, 0, 1, 3.2), 0.05);
    s.delay_policy = pf::DelayPolicy::per_receiver_extremes;
    EXPECT_EQ(pf::schedule_delay(s, 3, 4, 3.2), 0.0);
    EXPECT_EQ(pf::schedule_delay(s, 3, 5, 3.2), 0.05);
    s.delay_policy = pf::DelayPolicy::uniform_random;
    for (int i = 0; i < 10000; ++i) {
        const double t = i * 0.37;
        const double d = pf::schedule_delay(s, i % 5, i % 7, t);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 0.05);
        EXPECT_EQ(d, pf::schedule_delay(s, i % 5, i % 7, t));
    }
}

TEST(Delay, ExtremesSkewWindowsByD) {
    // Two receivers of the same pulse train see it shifted by exactly d.
    auto s = strategy(pf::FaultPolicy::silent);
    s.delay_policy = pf::DelayPolicy::per_receiver_extremes;
    for (double t : {0.0, 1.3, 2.7}) {
        EXPECT_NEAR((t + pf::schedule_delay(s, 0, 1, t)) - (t + pf::schedule_delay(s, 0, 2, t)), s.d, 1e-12);
    }
}

TEST(Drift, Policies) {
    auto s = strategy(pf::FaultPolicy::silent, 0.01);
    s.drift_policy = pf::DriftPolicy::constant;
    EXPECT_DOUBLE_EQ(pf::schedule_drift(s, 0, 0.3), 1.01);
    EXPECT_DOUBLE_EQ(pf::schedule_drift(s, 4, 17.9), 1.01);
    s.drift_policy = pf::DriftPolicy::oscillating;
    EXPECT_DOUBLE_EQ(pf::schedule_drift(s, 0, 0.5), 0.99);
    EXPECT_DOUBLE_EQ(pf::schedule_drift(s, 0, 1.5), 1.01);
    EXPECT_DOUBLE_EQ(pf::schedule_drift(s, 0, 2.0), 0.99);
    s.drift_policy = pf::DriftPolicy::random;
    EXPECT_EQ(pf::schedule_drift(s, 2, 3.1), pf::schedule_drift(s, 2, 3.9));
}

TEST(Drift, IntegratedClockStaysWithinRate) {
    for (auto policy : {pf::DriftPolicy::constant, pf::DriftPolicy::oscillating, pf::DriftPolicy::random}) {
        auto s = strategy(pf::FaultPolicy::silent, 0.02, 9);
        s.drift_policy = policy;
        for (pf::NodeId q = 0; q < 8; ++q) {
            double local = 0.0;
            for (int k = 0; k < 200; ++k) {
                const double sp = pf::schedule_drift(s, q, k + 0.5);
                ASSERT_GE(sp, 1.0 - s.rho);
                ASSERT_LE(sp, 1.0 + s.rho);
                local += sp;
                EXPECT_LE(std::abs(local - (k + 1.0)), s.rho * (k + 1.0) + 1e-12);
            }
        }
    }
}

TEST(Faults, SilentEmitsNothing) {
    auto out = pf::emit_faulty_pulses(strategy(pf::FaultPolicy::silent), {4, 5}, {0, 1}, 0.0, 1.0,
                                      snapshot_with_field(0.0, 0.1));
    EXPECT_TRUE(out.empty());
}

TEST(Faults, RandomPulsesRespectBudget) {
    auto out = pf::emit_faulty_pulses(strategy(pf::FaultPolicy::random_pulses, 0.01), {4, 5}, {0, 1, 2, 3}, 2.0, 3.0,
                                      snapshot_with_field(2.0, 0.1));
    std::map<pf::NodeId, int> per_receiver;
    for (const auto& d : out) {
        ++per_receiver[d.receiver];
        EXPECT_GE(d.time, 2.0);
        EXPECT_LT(d.time, 3.0);
    }
    for (const auto& [r, count] : per_receiver) EXPECT_LE(count, 2 * 2 + 2) << "receiver " << r;
    EXPECT_EQ(pf::fault_budget(1.0, 0.01), 3);
}

TEST(Faults, AntiPhaseTargetsTheAntipode) {
    auto out = pf::emit_faulty_pulses(strategy(pf::FaultPolicy::anti_phase), {4}, {0, 1}, 3.0, 4.0,
                                      snapshot_with_field(3.0, 0.25));
    ASSERT_EQ(out.size(), 2u);
    for (const auto& d : out) EXPECT_NEAR(pf::wrap_unit(d.time), 0.75, 1e-12);
}

TEST(Faults, FixedPhaseUsesOnePhasePerNode) {
    pf::FaultInjector inj{strategy(pf::FaultPolicy::fixed_phase), {6, 7}, {0, 1, 2}};
    std::map<pf::NodeId, std::vector<double>> phases;
    for (int w = 0; w < 5; ++w) {
        for (const auto& d : inj.emit(w, w + 1.0, snapshot_with_field(w, 0.0))) {
            phases[d.faulty].push_back(pf::wrap_unit(d.time));
        }
    }
    ASSERT_EQ(phases.size(), 2u);
    for (const auto& [f, ps] : phases) {
        EXPECT_EQ(ps.size(), 15u);
        for (double p : ps) EXPECT_NEAR(p, ps.front(), 1e-9);
    }
}

TEST(Faults, AdaptiveWorstReadsReceiverStrength) {
    auto s = strategy(pf::FaultPolicy::adaptive_worst);
    auto strong = pf::emit_faulty_pulses(s, {4}, {0}, 0.0, 1.0, snapshot_with_field(0.0, 0.2, 9.0));
    ASSERT_EQ(strong.size(), 2u);
    // antipode plus a second pulse one minimum gap later, wrapped into the window
    EXPECT_NEAR(strong[1].time, 0.7, 1e-12);
    EXPECT_NEAR(strong[0].time, pf::wrap_unit(0.7 + pf::min_pulse_gap(s.rho)), 1e-12);
    auto weak = pf::emit_faulty_pulses(s, {4}, {0}, 0.0, 1.0, snapshot_with_field(0.0, 0.2, 1.0));
    ASSERT_EQ(weak.size(), 1u);
    EXPECT_NEAR(weak[0].time, 0.2, 1e-12);
}

TEST(Faults, CapHoldsForEveryPolicyOverManySeeds) {
    for (auto fp : {pf::FaultPolicy::random_pulses, pf::FaultPolicy::fixed_phase, pf::FaultPolicy::anti_phase,
                    pf::FaultPolicy::adaptive_worst}) {
        for (std::uint64_t seed = 0; seed < 10000; ++seed) {
            pf::Rng rng{seed};
            const double rho = rng.uniform(0.0, 0.05);
            pf::FaultInjector inj{strategy(fp, rho, seed), {8, 9}, {0, 1}};
            std::map<std::pair<pf::NodeId, pf::NodeId>, std::vector<double>> streams;
            for (int w = 0; w < 4; ++w) {
                auto snap = snapshot_with_field(w, rng.uniform(), rng.uniform(0.0, 10.0));
                for (const auto& d : inj.emit(w, w + 1.0, snap)) streams[{d.faulty, d.receiver}].push_back(d.time);
            }
            for (const auto& [key, ts] : streams) {
                ASSERT_EQ(pf::frequency_cap_violations(ts, rho), 0u) << pf::to_string(fp) << " seed " << seed;
            }
        }
    }
}

TEST(BandChoice, Policies) {
    auto s = strategy(pf::FaultPolicy::silent);
    pf::NodeView v{0, 0.0, pf::NormalizedPhase{0.0}, 5.0, std::nullopt};
    auto snap = snapshot_with_field(1.0, 0.0);
    s.band_choice_policy = pf::BandChoice::always_0;
    EXPECT_FALSE(pf::choose_band(s, v, 1.0, pf::NormalizedPhase{0.1}, snap, 0));
    s.band_choice_policy = pf::BandChoice::always_1;
    EXPECT_TRUE(pf::choose_band(s, v, 1.0, pf::NormalizedPhase{0.1}, snap, 0));
    s.band_choice_policy = pf::BandChoice::adaptive;
    EXPECT_FALSE(pf::choose_band(s, v, 1.0, pf::NormalizedPhase{0.1}, snap, 0));
    EXPECT_TRUE(pf::choose_band(s, v, 1.0, pf::NormalizedPhase{0.5}, snap, 0));
    s.band_choice_policy = pf::BandChoice::random;
    int yes = 0;
    for (std::uint64_t k = 0; k < 1000; ++k) yes += pf::choose_band(s, v, 1.0, std::nullopt, snap, k);
    EXPECT_GT(yes, 400);
    EXPECT_LT(yes, 600);
}
