#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "nepfw/core.hpp"
#include "nepfw/feasible_sets.hpp"

namespace nepfw {

/// f(x) = 1/2 ||Ax - b||^2 with A stored row-major.
class QuadraticObjective {
public:
    QuadraticObjective(std::size_t rows, std::size_t cols, std::vector<double> a, std::vector<double> b);
    /// f(x) = 1/2 ||x - center||^2
    static QuadraticObjective distance_to(const DensePoint& center);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t dim() const noexcept { return cols_; }
    const std::vector<double>& a() const noexcept { return a_; }
    const std::vector<double>& b() const noexcept { return b_; }
    std::span<const double> row(std::size_t i) const;

    double value(const DensePoint& x) const;
    DensePoint grad(const DensePoint& x) const;
    /// Ax
    DensePoint apply(const DensePoint& x) const;
    /// Exact minimizer over [0, 1] of eta -> f((1 - eta) x + eta v).
    double line_search(const DensePoint& x, const DensePoint& v) const;

    /// Largest eigenvalue of A^T A, inflated by 1 + 1e-8.
    double smoothness_beta() const noexcept { return beta_; }
    /// Smallest eigenvalue of A^T A (dense eigensolver).
    double min_curvature() const;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> a_;
    std::vector<double> b_;
    double beta_;
};

/// Largest eigenvalue of A^T A by power iteration; stops when the eigen
/// residual drops below 1e-10 times the estimate.
double power_iteration_gram(std::size_t rows, std::size_t cols, std::span<const double> a,
                            int max_iters = 100000);

/// Row-sampling gradient estimator m * a_i (a_i . x - b_i). Stateful; one
/// instance per worker.
class StochasticGradOracle {
public:
    StochasticGradOracle(const QuadraticObjective& obj, double bound, std::uint64_t seed,
                         bool stratified = false);

    /// Mean of `batch` single-row estimates. Stratified mode walks the rows
    /// cyclically instead of sampling.
    DensePoint sample(const DensePoint& x, std::size_t batch);

    const QuadraticObjective& objective() const noexcept { return *obj_; }
    double bound() const noexcept { return bound_; }
    std::uint64_t samples_drawn() const noexcept { return drawn_; }

private:
    const QuadraticObjective* obj_;
    double bound_;
    std::mt19937_64 rng_;
    bool stratified_;
    std::size_t cursor_ = 0;
    std::uint64_t drawn_ = 0;
};

/// m * max_i ||a_i|| (||a_i|| R + |b_i|), a bound on every single-row
/// estimate over a set whose vertices have norm at most R.
double stochastic_bound(const QuadraticObjective& obj, double max_vertex_norm);

struct Instance {
    QuadraticObjective objective;
    ProblemDiagnostics diagnostics;
    /// Extreme points whose hull holds the optimum.
    std::vector<VertexAtom> support;
};

/// Gaussian A (m x d); x* a random 0/1 vertex with its first face_dim
/// entries set to 1/2; b = A x*.
Instance make_hypercube_instance(std::size_t m, std::size_t d, std::size_t face_dim,
                                 std::uint64_t seed);

/// x* a random convex combination of `paths` distinct s-t paths; Gaussian A
/// with `rows` rows (0 means one row per edge); b = A x*.
Instance make_flow_instance(const FlowPolytope& set, std::uint64_t seed, std::size_t paths = 3,
                            std::size_t rows = 0);

/// Writes <prefix>.A.csv (row-major A), <prefix>.b.csv and <prefix>.json.
void write_instance(const std::string& prefix, const Instance& instance, const std::string& kind,
                    std::uint64_t seed);
/// Reads the objective written by write_instance.
QuadraticObjective read_objective(const std::string& prefix);

}  // namespace nepfw
