#include <pulsefield/config.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace pf = pulsefield;

TEST(Config, DefaultsResolveThresholdsFromRecordCount) {
    auto c = pf::parse_config("n = 100\nomega = 1\n");
    EXPECT_EQ(c.record_count(), 100);
    EXPECT_DOUBLE_EQ(c.R0, 5.0);
    EXPECT_NEAR(c.R1, 100.0 / (2.0 * std::numbers::pi), 1e-12);
    EXPECT_EQ(c.resolved_steps(), 300);
}

TEST(Config, ParsesEveryKeyAndComments) {
    const char* text =
        "# a comment\n"
        "n = 12   # trailing comment\n"
        "f = 3\n d = 0.02\nrho=0.001\nT = 500\nomega = 4\nc_max = 100000\nR0 = 3\nR1 = 9\n"
        "eps_max = 0.5\nmode = half_random_walk\nfault_strategy = anti_phase\nseed = 99\nsteps = 10\n"
        "trials = 4\ndelay_policy = max\ndrift_policy = oscillating\nband_choice = always_1\n"
        "hostile_init = false\ntrig = integer\nnoise = true\nsample_dt = 0.002\nhold = 1.5\npi_target = 0.05\n";
    auto c = pf::parse_config(text);
    EXPECT_EQ(c.n, 12);
    EXPECT_EQ(c.f, 3);
    EXPECT_EQ(c.mode, pf::SyncMode::half_random_walk);
    EXPECT_EQ(c.fault_strategy, pf::FaultPolicy::anti_phase);
    EXPECT_EQ(c.seed, 99u);
    EXPECT_EQ(c.delay_policy, pf::DelayPolicy::max);
    EXPECT_EQ(c.drift_policy, pf::DriftPolicy::oscillating);
    EXPECT_EQ(c.band_choice, pf::BandChoice::always_1);
    EXPECT_FALSE(c.hostile_init);
    EXPECT_EQ(c.trig, pf::TrigPath::integer);
    EXPECT_TRUE(c.noise);
    EXPECT_DOUBLE_EQ(c.pi_target, 0.05);
    EXPECT_EQ(pf::config_keys().size(), 24u);
}

TEST(Config, OverridesApplyAfterFile) {
    auto c = pf::parse_config("n = 10\nseed = 1\n", {"seed=7", "R0=20"});
    EXPECT_EQ(c.seed, 7u);
    EXPECT_DOUBLE_EQ(c.R0, 20.0);
}

TEST(Config, RejectsBadInput) {
    EXPECT_THROW(pf::parse_config("bogus = 1\n"), pf::ConfigError);
    EXPECT_THROW(pf::parse_config("n = 1\nn = 2\n"), pf::ConfigError);
    EXPECT_THROW(pf::parse_config("n = ten\n"), pf::ConfigError);
    EXPECT_THROW(pf::parse_config("mode = Extended\n"), pf::ConfigError);
    EXPECT_THROW(pf::parse_config("n 4\n"), pf::ConfigError);
    EXPECT_THROW(pf::parse_config("", {"bogus=1"}), pf::ConfigError);
}

TEST(Config, ValidationNamesTheConstraint) {
    auto msg = [](const std::string& text) {
        try {
            pf::parse_config(text);
        } catch (const pf::ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_EQ(msg("trials = 0\n"), "trials must be >= 1");
    EXPECT_EQ(msg("f = 16\n"), "f must satisfy 0 <= f < n");
    EXPECT_EQ(msg("rho = 1\n"), "rho must satisfy 0 <= rho < 1");
    EXPECT_EQ(msg("T = 1\n"), "T must be >= 2");
    EXPECT_EQ(msg("c_max = 12000\n"), "c_max must exceed 2*omega*T");
    EXPECT_EQ(msg("R1 = 1000\n"), "thresholds must satisfy 0 < R0, R1 <= N");
    EXPECT_EQ(msg("n = 4\nmode = bogus\n"), "line 2: unknown tag for mode: 'bogus'");
}

TEST(Config, LowerThresholdAboveUpperIsAccepted) {
    auto c = pf::parse_config("n = 100\nomega = 1\nR0 = 20\n");
    EXPECT_GT(c.R0, c.R1);
}

TEST(Config, MissingFileIsConfigError) {
    EXPECT_THROW(pf::load_config("/nonexistent/pulsefield.cfg"), pf::ConfigError);
}

TEST(Tags, RoundTrip) {
    for (auto m : {pf::SyncMode::one_kick_auth, pf::SyncMode::random_walk, pf::SyncMode::half_random_walk,
                   pf::SyncMode::extended}) {
        EXPECT_EQ(pf::parse_tag<pf::SyncMode>(pf::to_string(m)), m);
    }
    EXPECT_EQ(pf::to_string(pf::TrigPath::floating), "float");
    EXPECT_FALSE(pf::parse_tag<pf::FaultPolicy>("byzantine"));
}
