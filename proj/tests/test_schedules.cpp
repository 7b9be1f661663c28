#include <gtest/gtest.h>

#include <cmath>

#include "nepfw/solvers.hpp"

using namespace nepfw;

namespace {

RateConstants linear_constants() {
    RateConstants rc;
    rc.alpha = 2.0;
    rc.beta = 3.0;
    rc.big_c = 5.0;
    rc.big_m = 40.0;
    rc.mu = 0.5;
    return rc;
}

}  // namespace

TEST(RhoSchedule, ZeroIsZero) {
    EXPECT_EQ(rho_schedule_value(RhoSchedule{}, 7, RateConstants{}, 0.3, 4), (std::vector<double>{0.0}));
}

TEST(RhoSchedule, FixedLinearRateAtFirstIteration) {
    RhoSchedule s;
    s.kind = RhoKind::fixed_theorem3;
    const RateConstants rc = linear_constants();
    const double r1 = std::min(std::sqrt(2.0 * 5.0 * 10.0 * 0.25 / 2.0), 1.0) / 80.0;
    ASSERT_EQ(rho_schedule_value(s, 1, rc, 0.0, 10).size(), 1u);
    EXPECT_DOUBLE_EQ(rho_schedule_value(s, 1, rc, 0.0, 10)[0], r1);
    // Once the root falls below one the value decays like exp(-(t-1)/(8M)).
    RateConstants small = rc;
    small.big_c = 1e-4;
    const double a = rho_schedule_value(s, 1, small, 0.0, 10)[0];
    const double b = rho_schedule_value(s, 81, small, 0.0, 10)[0];
    EXPECT_NEAR(b / a, std::exp(-80.0 / (8.0 * 40.0)), 1e-12);
}

TEST(RhoSchedule, GeometricMatchesPowers) {
    RhoSchedule s;
    s.kind = RhoKind::geometric;
    s.q = 0.5;
    EXPECT_DOUBLE_EQ(rho_schedule_value(s, 1, {}, 0.0, 3)[0], 0.25);
    EXPECT_DOUBLE_EQ(rho_schedule_value(s, 3, {}, 0.0, 3)[0], 1.0 / 16.0);
    s.q = std::sqrt(0.5);
    EXPECT_NEAR(rho_schedule_value(s, 3, {}, 0.0, 3)[0], 0.25, 1e-15);
}

TEST(RhoSchedule, AdaptiveGridAroundPrevious) {
    RhoSchedule s;
    s.kind = RhoKind::adaptive_theorem5;
    const auto c = rho_schedule_value(s, 4, {}, 0.5, 3);
    ASSERT_EQ(c.size(), 9u);
    EXPECT_DOUBLE_EQ(c.front(), 0.25);
    EXPECT_DOUBLE_EQ(c[4], 0.5);
    EXPECT_DOUBLE_EQ(c.back(), 1.0);
    for (std::size_t i = 1; i < c.size(); ++i) EXPECT_NEAR(c[i] / c[i - 1], std::exp2(0.25), 1e-14);
}

TEST(RhoSchedule, GridSearchAndClamping) {
    RhoSchedule s;
    s.kind = RhoKind::grid_search;
    EXPECT_THROW(rho_schedule_value(s, 1, {}, 0.5, 3), InvalidArgument);
    s.base = 2.0;
    s.exponents = {-1.0, 0.0, 3.0};
    EXPECT_EQ(rho_schedule_value(s, 2, {}, 0.5, 3), (std::vector<double>{0.25, 0.5, 1.0}));
    s.kind = RhoKind::adaptive_theorem5;
    for (double v : rho_schedule_value(s, 2, {}, 0.9, 3)) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(RhoSchedule, TwoPhaseSwitchesAtTau) {
    RhoSchedule s;
    s.kind = RhoKind::two_phase_theorem4;
    RateConstants rc;
    rc.big_c = 1e-6;
    rc.delta = 0.1;
    rc.kappa = 4.0;
    rc.m1 = 84.0;
    rc.m2 = 68.0;
    rc.tau = 10.0;
    const double phase1 = std::sqrt(2.0 * 10.0 * 1e-6 * std::exp(-8.0 / (4.0 * 84.0))) / (2.0 * 84.0);
    EXPECT_NEAR(rho_schedule_value(s, 9, rc, 0.0, 3)[0], phase1, 1e-15);
    const double phase2 = std::min(2.0 * 0.1 * 4.0 * std::exp(-2.0 / (8.0 * 68.0)), 1.0) / (2.0 * 68.0);
    EXPECT_NEAR(rho_schedule_value(s, 12, rc, 0.0, 3)[0], phase2, 1e-15);

    rc.tau.reset();
    std::vector<std::string> notes;
    rho_schedule_value(s, 1, rc, 0.0, 3, &notes);
    EXPECT_EQ(notes.size(), 1u);
}

TEST(RhoSchedule, MissingConstantsAreReported) {
    RhoSchedule s;
    s.kind = RhoKind::fixed_theorem3;
    RateConstants rc = linear_constants();
    rc.big_m.reset();
    EXPECT_THROW(rho_schedule_value(s, 1, rc, 0.0, 3), InvalidArgument);
    s.kind = RhoKind::two_phase_theorem4;
    EXPECT_THROW(rho_schedule_value(s, 1, linear_constants(), 0.0, 3), InvalidArgument);
    EXPECT_THROW(rho_schedule_value(RhoSchedule{}, 0, {}, 0.0, 3), InvalidArgument);
}

TEST(RhoSchedule, ParsesNames) {
    EXPECT_EQ(parse_rho_kind("geometric"), RhoKind::geometric);
    EXPECT_THROW(parse_rho_kind("cosine"), InvalidArgument);
    EXPECT_EQ(parse_variant("nep_fc_opt2"), Variant::nep_fc_opt2);
    EXPECT_EQ(to_string(Variant::nep_sfw), "nep_sfw");
    EXPECT_THROW(parse_variant("pfw"), InvalidArgument);
}

TEST(BatchSize, TakesTheLargerTerm) {
    // G = beta = D_K = 1: first term (t+1)^2; with D* = 1 the second matches.
    EXPECT_EQ(sfw_batch_size(1, 1.0, 1.0, 1.0, 1.0, 0.0), 4u);
    EXPECT_EQ(sfw_batch_size(3, 1.0, 1.0, 1.0, 1.0, 0.0), 16u);
    // A small D* dominates: (G D_K (t+1) / (beta D*^2))^2 = (2 / 0.25)^2.
    EXPECT_EQ(sfw_batch_size(1, 1.0, 1.0, 1.0, 0.5, 0.0), 64u);
    // With alpha the second term takes the smaller of the two bounds.
    EXPECT_EQ(sfw_batch_size(1, 1.0, 1.0, 1.0, 0.5, 1.0), 4u);
    // D* = 0 without alpha leaves only the first term.
    EXPECT_EQ(sfw_batch_size(1, 1.0, 1.0, 1.0, 0.0, 0.0), 4u);
    EXPECT_GE(sfw_batch_size(1, 1e-9, 1.0, 1.0, 1.0, 0.0), 1u);
}
