#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <random>

#include "brute_force.hpp"
#include "nepfw/objectives.hpp"

using namespace nepfw;

namespace {

QuadraticObjective random_objective(std::size_t m, std::size_t d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> a(m * d), b(m);
    for (double& v : a) v = n(rng);
    for (double& v : b) v = n(rng);
    return QuadraticObjective(m, d, a, b);
}

double eigen_largest(const QuadraticObjective& obj) {
    Eigen::MatrixXd a(obj.rows(), obj.dim());
    for (std::size_t i = 0; i < obj.rows(); ++i)
        for (std::size_t j = 0; j < obj.dim(); ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = obj.a()[i * obj.dim() + j];
    const Eigen::MatrixXd g = a.transpose() * a;
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().maxCoeff();
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "nepfw_tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Quadratic, HandComputedValues) {
    const auto zero = QuadraticObjective::distance_to(DensePoint{0, 0});
    EXPECT_EQ(zero.value(DensePoint{0, 0}), 0.0);
    EXPECT_EQ(zero.grad(DensePoint{0, 0}), (DensePoint{0, 0}));
    const auto ones = QuadraticObjective::distance_to(DensePoint{1, 1});
    EXPECT_EQ(ones.value(DensePoint{0, 0}), 1.0);
    EXPECT_EQ(ones.grad(DensePoint{0, 0}), (DensePoint{-1, -1}));
    EXPECT_THROW(ones.value(DensePoint{0, 0, 0}), DimensionMismatch);
}

TEST(Quadratic, GradientMatchesCentralDifferences) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const auto obj = random_objective(5, 3, rng);
        const DensePoint x = bf::gaussian(3, rng);
        const DensePoint g = obj.grad(x);
        const double h = 1e-5 * (1.0 + norm(x));
        for (std::size_t j = 0; j < 3; ++j) {
            DensePoint xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const double fd = (obj.value(xp) - obj.value(xm)) / (2.0 * h);
            EXPECT_LE(std::abs(fd - g[j]), 1e-6 * std::max(1.0, std::abs(g[j]))) << trial << "," << j;
        }
    }
}

TEST(Quadratic, SmoothnessExamples) {
    std::vector<double> two_i{2, 0, 0, 0, 2, 0, 0, 0, 2};
    EXPECT_NEAR(QuadraticObjective(3, 3, two_i, {0, 0, 0}).smoothness_beta(), 4.0, 4.0 * 2e-8);
    EXPECT_NEAR(QuadraticObjective(2, 2, {1, 0, 0, 3}, {0, 0}).smoothness_beta(), 9.0, 9.0 * 2e-8);
}

TEST(Quadratic, SmoothnessIsTightUpperBound) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto obj = random_objective(10, 6, rng);
        const double truth = eigen_largest(obj);
        EXPECT_GE(obj.smoothness_beta(), truth);
        EXPECT_LE(std::abs(obj.smoothness_beta() / (1.0 + 1e-8) - truth) / truth, 1e-8);
    }
}

TEST(Quadratic, PowerIterationReportsNonConvergence) {
    std::mt19937_64 rng(3);
    const auto obj = random_objective(30, 30, rng);
    EXPECT_THROW(power_iteration_gram(30, 30, obj.a(), 2), NonConvergence);
}

TEST(Quadratic, ConvexitySmoothnessSandwich) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const auto obj = random_objective(7, 5, rng);
        const DensePoint x = bf::gaussian(5, rng), y = bf::gaussian(5, rng);
        const double lin = obj.value(y) - obj.value(x) - dot(obj.grad(x), y - x);
        const double scale = 1e-12 * (1.0 + obj.value(x) + obj.value(y));
        EXPECT_GE(lin, -scale);
        EXPECT_LE(lin, obj.smoothness_beta() / 2.0 * squared_distance(x, y) + scale);
    }
}

TEST(Quadratic, ExactLineSearch) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto obj = random_objective(6, 4, rng);
        const DensePoint x = bf::gaussian(4, rng), v = bf::gaussian(4, rng);
        const double eta = obj.line_search(x, v);
        const double best = obj.value(convex_step(x, v, eta));
        for (int k = 0; k <= 1000; ++k) {
            EXPECT_LE(best, obj.value(convex_step(x, v, k / 1000.0)) + 1e-12);
        }
    }
}

TEST(HypercubeInstance, SpecProperties) {
    const Instance inst = make_hypercube_instance(175, 200, 5, 9);
    const DensePoint& x_star = *inst.diagnostics.x_star;
    EXPECT_NEAR(inst.objective.value(x_star), 0.0, 1e-20);
    for (double g : inst.objective.grad(x_star)) EXPECT_NEAR(g, 0.0, 1e-10);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(x_star[i], 0.5);
    for (std::size_t i = 5; i < 200; ++i) EXPECT_TRUE(x_star[i] == 0.0 || x_star[i] == 1.0);
    EXPECT_DOUBLE_EQ(*inst.diagnostics.d_f_star * *inst.diagnostics.d_f_star, 5.0);
    EXPECT_DOUBLE_EQ(inst.diagnostics.d_k, std::sqrt(200.0));
    EXPECT_EQ(*inst.diagnostics.f_star, 0.0);
    EXPECT_TRUE(inst.diagnostics.ordering_holds());
    EXPECT_FALSE(inst.diagnostics.alpha.has_value());  // rank deficient
}

TEST(HypercubeInstance, VertexOptimumHasZeroDStar) {
    const Instance inst = make_hypercube_instance(12, 8, 0, 1);
    EXPECT_EQ(*inst.diagnostics.d_star, 0.0);
    EXPECT_EQ(inst.support.size(), 1u);
    EXPECT_THROW(make_hypercube_instance(4, 4, 4, 1), InvalidArgument);
}

TEST(HypercubeInstance, QuadraticGrowthOnFullRank) {
    std::mt19937_64 rng(6);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Instance inst = make_hypercube_instance(20, 10, 3, seed);
        ASSERT_TRUE(inst.diagnostics.alpha.has_value());
        const double alpha = *inst.diagnostics.alpha;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 100; ++k) {
            DensePoint x(10);
            for (std::size_t j = 0; j < 10; ++j) x[j] = u(rng);
            const double dist = inst.diagnostics.dist_to_opt(x);
            EXPECT_LE(dist * dist, 2.0 / alpha * inst.objective.value(x) * (1.0 + 1e-10) + 1e-14);
        }
    }
}

TEST(FlowInstance, DiamondMidpointAndSinglePath) {
    const FlowPolytope flow(DagInstance::diamond());
    const Instance both = make_flow_instance(flow, 1, 2);
    EXPECT_EQ(both.support.size(), 2u);
    EXPECT_EQ(*both.diagnostics.dim_f_star, 1);
    EXPECT_NEAR(both.objective.value(*both.diagnostics.x_star), 0.0, 1e-20);
    const Instance one = make_flow_instance(flow, 1, 1);
    EXPECT_EQ(*one.diagnostics.d_star, 0.0);
}

TEST(FlowInstance, LayeredThreePaths) {
    const FlowPolytope flow(DagInstance::layered(3, 3, 0.6, 4));
    const Instance inst = make_flow_instance(flow, 7, 3);
    EXPECT_EQ(inst.support.size(), 3u);
    EXPECT_TRUE(flow.contains(*inst.diagnostics.x_star));
    EXPECT_NEAR(inst.objective.value(*inst.diagnostics.x_star), 0.0, 1e-18);
    EXPECT_TRUE(inst.diagnostics.ordering_holds());
    for (const auto& v : inst.support) EXPECT_TRUE(flow.is_vertex(v));
}

TEST(Stochastic, FullStratifiedBatchIsExact) {
    std::mt19937_64 rng(7);
    const auto obj = random_objective(9, 4, rng);
    StochasticGradOracle oracle(obj, 1.0, 3, true);
    const DensePoint x = bf::gaussian(4, rng);
    const DensePoint g = oracle.sample(x, 9), exact = obj.grad(x);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(g[j], exact[j], 1e-12 * (1.0 + std::abs(exact[j])));
    EXPECT_EQ(oracle.samples_drawn(), 9u);
    EXPECT_THROW(oracle.sample(x, 0), InvalidArgument);
}

TEST(Stochastic, SameSeedSameStream) {
    std::mt19937_64 rng(8);
    const auto obj = random_objective(9, 4, rng);
    StochasticGradOracle a(obj, 1.0, 5), b(obj, 1.0, 5);
    const DensePoint x = bf::gaussian(4, rng);
    for (int k = 0; k < 5; ++k) EXPECT_EQ(a.sample(x, 3), b.sample(x, 3));
}

TEST(Stochastic, BoundHoldsOverTheSet) {
    const Instance inst = make_hypercube_instance(15, 6, 2, 3);
    const Hypercube cube(6);
    const double bound = stochastic_bound(inst.objective, cube.max_vertex_norm());
    for (const auto& v : cube.enumerate_vertices()) {
        for (std::size_t i = 0; i < 15; ++i) {
            const auto a = inst.objective.row(i);
            double r = -inst.objective.b()[i];
            for (std::size_t j = 0; j < 6; ++j) r += a[j] * v.point[j];
            double n2 = 0.0;
            for (double x : a) n2 += x * x;
            EXPECT_LE(15.0 * std::abs(r) * std::sqrt(n2), bound);
        }
    }
}

TEST(Stochastic, MonteCarloConcentration) {
    const Instance inst = make_hypercube_instance(12, 5, 2, 11);
    const Hypercube cube(5);
    const double bound = stochastic_bound(inst.objective, cube.max_vertex_norm());
    const DensePoint x = *inst.diagnostics.x_star + DensePoint{0.1, -0.1, 0.0, 0.0, 0.0};
    const DensePoint exact = inst.objective.grad(x);
    StochasticGradOracle oracle(inst.objective, bound, 21);
    int inside = 0;
    for (int trial = 0; trial < 100; ++trial) {
        if (std::sqrt(squared_distance(oracle.sample(x, 10000), exact)) <= 5.0 * bound / 100.0) ++inside;
    }
    EXPECT_GE(inside, 99);
}

TEST(InstanceFiles, RoundTripExactly) {
    const Instance inst = make_hypercube_instance(6, 4, 1, 12);
    const std::string prefix = scratch("roundtrip").string();
    write_instance(prefix, inst, "hypercube_ls", 12);
    const QuadraticObjective back = read_objective(prefix);
    EXPECT_EQ(back.a(), inst.objective.a());
    EXPECT_EQ(back.b(), inst.objective.b());
    EXPECT_EQ(back.smoothness_beta(), inst.objective.smoothness_beta());
}
