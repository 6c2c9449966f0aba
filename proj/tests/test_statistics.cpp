#include <pulsefield/metrics.hpp>
#include <pulsefield/simulator.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace pf = pulsefield;

TEST(OneKick, InitialStrengthFollowsTheRayleighTail) {
    auto c = pf::parse_config("n = 100\nomega = 2\nd = 0\nrho = 0\nmode = one_kick_auth\nhostile_init = false\n");
    const int runs = 100000;
    std::vector<double> strengths;
    strengths.reserve(runs);
    for (int i = 0; i < runs; ++i) {
        c.seed = static_cast<std::uint64_t>(i) + 1;
        strengths.push_back(pf::one_kick_initial_strength(c));
    }
    for (double r : {5.0, 10.0, 15.0}) {
        const auto hits = std::count_if(strengths.begin(), strengths.end(), [&](double s) { return s >= r; });
        EXPECT_NEAR(static_cast<double>(hits) / runs, std::exp(-r * r / 100.0), 0.02) << "r=" << r;
    }
}

TEST(RandomWalk, AngleSpreadObeysTheSineBound) {
    // Over any interval of length tau0 every node measures at least once. The
    // measured angles, advanced to a common instant, must agree to within
    // eps2 = 2 eps / (r - eps) where r is the weakest strength seen in the
    // interval and eps = (2(1+rho) omega (e0 + f))^sigma + 2 n (1+rho) tau0 + 2 omega n d.
    const std::int64_t n = 4;
    const std::int64_t omega = 400;
    auto c = pf::parse_config("n = 4\nomega = 400\nd = 0\nrho = 0\nmode = random_walk\nhostile_init = false\n"
                              "steps = 800\nseed = 17\n");
    const auto tr = pf::run(c);
    const double tau0 = 1.5 / (1.0 - c.rho);
    const double sigma = 1.0;
    const double e0 = pf::measured_error(tr, tr.flush_time);
    const double eps = std::pow(2.0 * (1.0 + c.rho) * static_cast<double>(omega) * (e0 + static_cast<double>(c.f)), sigma) +
                       2.0 * static_cast<double>(n) * (1.0 + c.rho) * tau0 +
                       2.0 * static_cast<double>(omega * n) * c.d;

    std::vector<const pf::Measurement*> ms;
    for (const auto& m : tr.measurements) {
        if (m.t >= tr.flush_time && m.angle) ms.push_back(&m);
    }
    ASSERT_GT(ms.size(), 100u);

    std::size_t windows = 0;
    std::size_t meaningful = 0;
    std::size_t violations = 0;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const double t0 = ms[i]->t;
        if (t0 + tau0 > tr.t_end) break;
        std::size_t j = i;
        double r = ms[i]->strength;
        while (j < ms.size() && ms[j]->t <= t0 + tau0) r = std::min(r, ms[j++]->strength);
        ++windows;
        if (r <= eps) continue;
        const double eps2 = 2.0 * eps / (r - eps);
        if (eps2 >= 1.0) continue;
        ++meaningful;
        for (std::size_t a = i; a < j; ++a) {
            for (std::size_t b = a + 1; b < j; ++b) {
                // Angles are measured relative to "now", so the same field
                // seen dt later reads dt smaller.
                const double dt = ms[b]->t - ms[a]->t;
                const double dist = pf::ring_distance(*ms[a]->angle - dt, *ms[b]->angle);
                const double s = dist >= 0.25 ? 1.0 : std::sin(2.0 * std::numbers::pi * dist);
                if (s > eps2) ++violations;
            }
        }
    }
    EXPECT_GT(windows, 100u);
    EXPECT_GT(meaningful, 10u);
    EXPECT_EQ(violations, 0u);
}
