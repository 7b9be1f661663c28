#include <gtest/gtest.h>

#include <random>

#include "brute_force.hpp"
#include "nepfw/core.hpp"
#include "nepfw/feasible_sets.hpp"

using namespace nepfw;

namespace {

VertexAtom atom(std::initializer_list<double> coords, std::int64_t id) {
    return VertexAtom{DensePoint(coords), AtomId{{id}}, SetKind::explicit_hull};
}

}  // namespace

TEST(DensePoint, ArithmeticAndFiniteness) {
    const DensePoint a{1.0, 2.0}, b{3.0, -1.0};
    EXPECT_EQ(a + b, (DensePoint{4.0, 1.0}));
    EXPECT_EQ(a - b, (DensePoint{-2.0, 3.0}));
    EXPECT_EQ(2.0 * a, (DensePoint{2.0, 4.0}));
    EXPECT_DOUBLE_EQ(dot(a, b), 1.0);
    EXPECT_DOUBLE_EQ(squared_distance(a, b), 13.0);
    EXPECT_DOUBLE_EQ(norm(DensePoint{3.0, 4.0}), 5.0);
    EXPECT_EQ(convex_step(a, b, 0.25), (DensePoint{1.5, 1.25}));
    EXPECT_TRUE(a.all_finite());
    EXPECT_FALSE((DensePoint{1.0, std::nan("")}).all_finite());
    EXPECT_THROW(dot(a, DensePoint(3)), DimensionMismatch);
}

TEST(AtomId, LexicographicOrder) {
    EXPECT_LT((AtomId{{0, 5}}), (AtomId{{1, 0}}));
    EXPECT_LT((AtomId{{1}}), (AtomId{{1, 0}}));
    EXPECT_EQ((AtomId{{2, 3}}), (AtomId{{2, 3}}));
}

TEST(Materialize, SpecExamples) {
    EXPECT_EQ(materialize(ConvexDecomposition::single(atom({1, 0, 1}, 0))), (DensePoint{1, 0, 1}));
    EXPECT_EQ(materialize(ConvexDecomposition({atom({0, 0}, 0), atom({1, 1}, 1)}, {0.5, 0.5})),
              (DensePoint{0.5, 0.5}));
    const DensePoint x = materialize(
        ConvexDecomposition({atom({1, 0, 0}, 0), atom({0, 1, 0}, 1), atom({0, 0, 1}, 2)}, {0.2, 0.3, 0.5}));
    EXPECT_NEAR(x[0], 0.2, 1e-15);
    EXPECT_NEAR(x[1], 0.3, 1e-15);
    EXPECT_NEAR(x[2], 0.5, 1e-15);
}

TEST(Materialize, RejectsWeightSumViolation) {
    EXPECT_THROW(ConvexDecomposition({atom({0}, 0), atom({1}, 1)}, {0.5, 0.6}), InvalidDecomposition);
    EXPECT_THROW(ConvexDecomposition({atom({0}, 0), atom({1}, 1)}, {1.1, -0.1}), InvalidDecomposition);
    EXPECT_NO_THROW(ConvexDecomposition({atom({0}, 0), atom({1}, 1)}, {0.5, 0.5 + 5e-13}));
}

TEST(ConvexDecomposition, MergesDuplicateIdsOnConstruction) {
    const ConvexDecomposition d({atom({0}, 7), atom({1}, 3), atom({0}, 7)}, {0.25, 0.5, 0.25});
    ASSERT_EQ(d.size(), 2u);
    EXPECT_DOUBLE_EQ(d.weights()[*d.find(AtomId{{7}})], 0.5);
}

TEST(MergeAtom, ExistingIdKeepsCountAndSumsWeights) {
    const ConvexDecomposition d({atom({0, 0}, 0), atom({1, 0}, 1)}, {0.5, 0.5});
    const std::vector<double> w{0.25, 0.5, 0.25};
    const ConvexDecomposition m = merge_atom(d, atom({0, 0}, 0), w);
    ASSERT_EQ(m.size(), 2u);
    EXPECT_DOUBLE_EQ(m.weights()[*m.find(AtomId{{0}})], 0.5);
    EXPECT_DOUBLE_EQ(m.weights()[*m.find(AtomId{{1}})], 0.5);
}

TEST(MergeAtom, ZeroWeightNewAtomIsDropped) {
    const ConvexDecomposition d({atom({0, 0}, 0), atom({1, 0}, 1)}, {0.5, 0.5});
    const std::vector<double> w{0.5, 0.5, 0.0};
    const ConvexDecomposition m = merge_atom(d, atom({1, 1}, 9), w);
    EXPECT_EQ(m.size(), 2u);
    EXPECT_FALSE(m.find(AtomId{{9}}).has_value());
}

TEST(MergeAtom, TinyWeightDroppedAndRenormalized) {
    const ConvexDecomposition d({atom({0, 0}, 0), atom({1, 0}, 1)}, {0.5, 0.5});
    const std::vector<double> w{0.5, 0.5, 1e-15};
    const ConvexDecomposition m = merge_atom(d, atom({1, 1}, 2), w);
    ASSERT_EQ(m.size(), 2u);
    EXPECT_EQ(m.weights()[0], 0.5);
    EXPECT_EQ(m.weights()[1], 0.5);
}

TEST(MergeAtom, NegativeWeightIsSubsolverInconsistency) {
    const ConvexDecomposition d = ConvexDecomposition::single(atom({0}, 0));
    const std::vector<double> w{1.1, -0.1};
    EXPECT_THROW(merge_atom(d, atom({1}, 1), w), SubsolverInconsistency);
    const std::vector<double> short_w{1.0};
    EXPECT_THROW(merge_atom(d, atom({1}, 1), short_w), DimensionMismatch);
}

TEST(MergeAtom, RandomUpdatesKeepInvariants) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 15);
    const Hypercube cube(4);
    const auto vertices = cube.enumerate_vertices();
    ConvexDecomposition d = ConvexDecomposition::single(vertices[0]);
    for (int it = 0; it < 300; ++it) {
        const VertexAtom& v = vertices[static_cast<std::size_t>(pick(rng))];
        std::vector<double> w(d.size() + 1);
        double total = 0.0;
        for (double& x : w) total += (x = u(rng) < 0.2 ? 0.0 : u(rng));
        if (total == 0.0) w.back() = total = 1.0;
        for (double& x : w) x /= total;
        const std::size_t before = d.size();
        d = merge_atom(d, v, w);
        EXPECT_LE(d.size(), before + 1);
        double sum = 0.0;
        for (double x : d.weights()) {
            EXPECT_GE(x, 0.0);
            sum += x;
        }
        EXPECT_NEAR(sum, 1.0, 1e-15);
        for (std::size_t i = 0; i < d.size(); ++i) {
            for (std::size_t j = i + 1; j < d.size(); ++j) EXPECT_NE(d.atoms()[i].id, d.atoms()[j].id);
        }
        EXPECT_TRUE(cube.contains(materialize(d)));
    }
}

TEST(RateConstants, MinimumBigMFormula) {
    EXPECT_DOUBLE_EQ(minimum_big_m(2.0, 1.0, 3, 1.0, 1.0), 2.0 * (4.0 + 24.0));
    EXPECT_DOUBLE_EQ(minimum_big_m(1e-6, 1.0, 1, 1.0, 0.0), 0.5);
    const RateConstants rc = derive_linear_rate_constants(2.0, 1.0, 3, 1.0, 1.0, 7.0);
    EXPECT_EQ(*rc.big_c, 7.0);
    EXPECT_EQ(*rc.big_m, 56.0);
    EXPECT_THROW(derive_linear_rate_constants(2.0, 0.0, 3, 1.0, 1.0, 1.0), InvalidArgument);
}

TEST(RateConstants, AuditFlagsSmallUserM) {
    RateConstants rc;
    rc.alpha = 1.0;
    rc.beta = 2.0;
    rc.big_m = 10.0;
    EXPECT_EQ(audit_rate_constants(rc, 3, 1.0).size(), 1u);
    rc.big_m = 56.0;
    EXPECT_TRUE(audit_rate_constants(rc, 3, 1.0).empty());
}

TEST(RateConstants, TwoPhaseNeedsDelta) {
    RateConstants rc;
    rc.alpha = 1.0;
    rc.beta = 1.0;
    rc.big_c = 1.0;
    EXPECT_THROW(derive_two_phase_constants(rc, 1.0, 2), InvalidArgument);
    rc.delta = 0.1;
    const RateConstants out = derive_two_phase_constants(rc, 1.0, 2);
    EXPECT_DOUBLE_EQ(*out.kappa, 4.0);
    EXPECT_DOUBLE_EQ(*out.m1, 4.0 + 8.0 * 10.0);
    EXPECT_DOUBLE_EQ(*out.m2, 4.0 + 16.0 * 4.0);
}

TEST(ProblemDiagnostics, OrderingCheck) {
    ProblemDiagnostics d;
    d.d_k = 2.0;
    d.d_star = 1.0;
    d.d_f_star = 1.5;
    EXPECT_TRUE(d.ordering_holds());
    d.d_star = 1.6;
    EXPECT_FALSE(d.ordering_holds());
}
