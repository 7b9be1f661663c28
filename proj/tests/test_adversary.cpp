#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "brute_force.hpp"
#include "nepfw/adversary.hpp"

using namespace nepfw;

TEST(AdversarialOracle, BlockStructure) {
    const AdversarialOracle oracle(50, 3);
    EXPECT_EQ(oracle.k(), 6u);
    std::set<std::size_t> seen;
    for (std::size_t i = 1; i <= oracle.k(); ++i) {
        EXPECT_EQ(oracle.block(i).size(), 6u);
        for (std::size_t c : oracle.block(i)) {
            EXPECT_GE(c, 4u);
            EXPECT_TRUE(seen.insert(c).second);
        }
    }
    for (std::size_t c : oracle.block(0)) EXPECT_TRUE(seen.insert(c).second);
    EXPECT_EQ(seen.size(), 50u - 4u);
    EXPECT_THROW(AdversarialOracle(4, 3), InvalidArgument);
    EXPECT_THROW(AdversarialOracle(10, 0), InvalidArgument);
}

TEST(AdversarialOracle, FirstAnswerIsATrueMinimizer) {
    AdversarialOracle oracle(10, 2);
    const DensePoint x1 = adversarial_start(10, 2);
    const DensePoint grad = x1 - adversarial_optimum(10, 2);
    const VertexAtom v = oracle.lmo(grad);
    const double best = bf::min_value(bf::cube_vertices(10), [&](const DensePoint& u) { return dot(u, grad); });
    EXPECT_DOUBLE_EQ(dot(v.point, grad), best);
    EXPECT_EQ(v.origin, SetKind::adversarial_cube);
}

TEST(AdversarialOracle, AnswersUseDisjointBlocks) {
    const std::size_t d = 60, m = 3;
    AdversarialOracle oracle(d, m);
    std::vector<DensePoint> answers;
    const CombinerPolicy record = [&](const HarnessHistory& h) {
        answers.push_back(h.points.back());
        return harmonic_policy()(h);
    };
    generic_fw_harness(record, oracle, static_cast<int>(oracle.k()));
    ASSERT_EQ(answers.size(), oracle.k());
    for (std::size_t i = 0; i < answers.size(); ++i) {
        double tail = 0.0;
        for (std::size_t c = m + 1; c < d; ++c) tail += answers[i][c] * answers[i][c];
        EXPECT_DOUBLE_EQ(tail, static_cast<double>(oracle.k()));
        EXPECT_EQ(answers[i][m], 0.0);
        for (std::size_t j = 0; j < i; ++j) {
            for (std::size_t c = m + 1; c < d; ++c) EXPECT_EQ(answers[i][c] * answers[j][c], 0.0);
        }
    }
}

TEST(Harness, InitialGap) {
    for (std::size_t m : {1u, 3u, 5u}) {
        AdversarialOracle oracle(40, m);
        const HarnessResult r = generic_fw_harness(harmonic_policy(), oracle, 0);
        ASSERT_EQ(r.gaps.size(), 1u);
        EXPECT_DOUBLE_EQ(r.gaps[0], 0.5 + m / 8.0);
    }
}

TEST(Harness, LowerBoundForEveryPolicy) {
    const std::vector<std::pair<std::size_t, std::size_t>> cases{{50, 3}, {101, 4}, {200, 5}};
    for (const auto& [d, m] : cases) {
        for (const auto& policy : {harmonic_policy(), line_search_policy(), best_combination_policy()}) {
            AdversarialOracle oracle(d, m);
            const int k = static_cast<int>(oracle.k());
            const HarnessResult r = generic_fw_harness(policy, oracle, k);
            ASSERT_EQ(r.gaps.size(), static_cast<std::size_t>(k + 1));
            for (int t = 1; t <= k; ++t) EXPECT_GE(r.gaps[t - 1], 0.25 - 1e-12) << d << "," << m << " t=" << t;
        }
    }
}

TEST(Harness, RejectsNonConvexWeights) {
    AdversarialOracle oracle(20, 2);
    const CombinerPolicy bad = [](const HarnessHistory& h) {
        std::vector<double> w(h.points.size(), 0.0);
        w.back() = 1.5;
        w.front() = -0.5;
        return w;
    };
    EXPECT_THROW(generic_fw_harness(bad, oracle, 2), InvalidArgument);
    AdversarialOracle again(20, 2);
    const CombinerPolicy short_w = [](const HarnessHistory&) { return std::vector<double>{1.0}; };
    EXPECT_THROW(generic_fw_harness(short_w, again, 2), InvalidArgument);
}

TEST(Contrast, NepFwDropsBelowAQuarterWithinBudget) {
    for (const auto& [d, m] : std::vector<std::pair<std::size_t, std::size_t>>{{50, 3}, {101, 4}, {200, 5}}) {
        const double beta = QuadraticObjective::distance_to(adversarial_optimum(d, m)).smoothness_beta();
        const int budget = nep_fw_contrast_budget(m, beta);
        EXPECT_EQ(budget, static_cast<int>(std::ceil(16.0 * beta * (m + 4.0 + m))));
        const RunResult r = nep_fw_on_adversarial_instance(d, m, budget);
        const bool reached = std::any_of(r.records.begin(), r.records.end(),
                                         [](const RunRecord& row) { return *row.gap < 0.25; });
        EXPECT_TRUE(reached) << d << "," << m;
    }
}
