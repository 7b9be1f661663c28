#include "nepfw/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "nepfw/correction.hpp"
#include "nepfw/feasible_sets.hpp"

namespace nepfw {

namespace {

constexpr std::size_t kBruteForceDim = 16;

std::size_t isqrt(std::size_t n) {
    auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

void check_valid_minimizer(const DensePoint& v, const DensePoint& c) {
    for (std::size_t i = 0; i < c.size(); ++i) {
        if ((c[i] < 0.0 && v[i] != 1.0) || (c[i] > 0.0 && v[i] != 0.0)) {
            throw ConstructionViolated("adversarial answer is not a minimizer at coordinate " +
                                       std::to_string(i));
        }
    }
    if (c.size() <= kBruteForceDim) {
        double best = std::numeric_limits<double>::infinity();
        double value = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) value += v[i] * c[i];
        const Hypercube cube(c.size());
        for (const auto& u : cube.enumerate_vertices()) best = std::min(best, dot(u.point, c));
        if (value > best + 1e-12 * (1.0 + std::abs(best))) {
            throw ConstructionViolated("adversarial answer beaten by exhaustive search");
        }
    }
}

}  // namespace

AdversarialOracle::AdversarialOracle(std::size_t d, std::size_t m) : d_(d), m_(m) {
    if (m == 0 || m + 1 >= d) throw InvalidArgument("adversarial oracle: need 0 < m < d - 1");
    const std::size_t tail = d - m - 1;
    k_ = isqrt(tail);
    blocks_.assign(k_ + 1, {});
    // Coordinates m+1 .. d-1 (0-based) split into k blocks of k; the rest go to S_0.
    std::size_t next = m + 1;
    for (std::size_t i = 1; i <= k_; ++i) {
        for (std::size_t j = 0; j < k_; ++j) blocks_[i].push_back(next++);
    }
    while (next < d) blocks_[0].push_back(next++);
}

VertexAtom AdversarialOracle::lmo(const DensePoint& c) {
    if (c.size() != d_) throw DimensionMismatch(d_, c.size());
    ++calls_;
    const Hypercube cube(d_);
    if (calls_ > k_) return cube.lmo(c);
    DensePoint v(d_);
    for (std::size_t i = 0; i < m_; ++i) v[i] = c[i] < 0.0 ? 1.0 : 0.0;
    for (std::size_t i : blocks_[calls_]) v[i] = 1.0;
    check_valid_minimizer(v, c);
    VertexAtom atom = cube.make_vertex(v);
    atom.origin = SetKind::adversarial_cube;
    return atom;
}

DensePoint adversarial_optimum(std::size_t d, std::size_t m) {
    DensePoint x(d);
    for (std::size_t i = 0; i < m; ++i) x[i] = 0.5;
    return x;
}

DensePoint adversarial_start(std::size_t d, std::size_t m) {
    DensePoint x(d);
    x[m] = 1.0;
    return x;
}

// ---------------------------------------------------------------------------

namespace {

DensePoint combine(const std::vector<DensePoint>& points, const std::vector<double>& w) {
    DensePoint x(points.front().size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        for (std::size_t j = 0; j < x.size(); ++j) x[j] += w[i] * points[i][j];
    }
    return x;
}

std::vector<double> step_weights(const std::vector<double>& current, double eta) {
    std::vector<double> w;
    w.reserve(current.size() + 1);
    for (double c : current) w.push_back((1.0 - eta) * c);
    w.push_back(eta);
    return w;
}

}  // namespace

CombinerPolicy harmonic_policy() {
    return [](const HarnessHistory& h) { return step_weights(h.weights, 2.0 / (h.t + 1.0)); };
}

CombinerPolicy line_search_policy() {
    return [](const HarnessHistory& h) {
        const DensePoint x = combine(h.points, h.weights);
        const DensePoint& v = h.points.back();
        // Exact step for f with identity Hessian: -<grad, v - x> / ||v - x||^2.
        const DensePoint dir = v - x;
        const double curvature = dot(dir, dir);
        double eta = 0.0;
        if (curvature > 0.0) eta = std::clamp(-dot(h.gradients.back(), dir) / curvature, 0.0, 1.0);
        return step_weights(h.weights, eta);
    };
}

CombinerPolicy best_combination_policy() {
    return [](const HarnessHistory& h) {
        // f has identity Hessian, so f over the hull is the option-2 QP with
        // images equal to the points and b = x* = x_t - grad f(x_t).
        HullGram hull;
        for (const auto& p : h.points) hull = hull.extended(AtomId{}, p);
        const DensePoint x = combine(h.points, h.weights);
        const DensePoint x_star = x - h.gradients.back();
        std::vector<double> warm = h.weights;
        warm.push_back(0.0);
        FistaOptions opts;
        opts.mode = StopMode::tolerance;
        opts.max_iters = 20000;
        opts.tolerance = 1e-13;
        return fista_simplex(option2_qp(hull, x_star.span()), warm, opts).weights;
    };
}

HarnessResult generic_fw_harness(const CombinerPolicy& policy, AdversarialOracle& oracle, int budget) {
    const std::size_t d = oracle.dim(), m = oracle.m();
    const DensePoint x_star = adversarial_optimum(d, m);
    const auto f = [x_star](const DensePoint& x) { return 0.5 * squared_distance(x, x_star); };

    HarnessHistory history;
    history.points.push_back(adversarial_start(d, m));
    history.weights = {1.0};
    history.value = f;

    HarnessResult result;
    DensePoint x = history.points.front();
    for (int t = 1;; ++t) {
        result.iterates.push_back(x);
        result.gaps.push_back(f(x));
        if (t > budget) break;
        const DensePoint grad = x - x_star;
        history.gradients.push_back(grad);
        history.points.push_back(oracle.lmo(grad).point);
        history.t = t;
        std::vector<double> w = policy(history);
        if (w.size() != history.points.size()) {
            throw InvalidArgument("harness: policy returned " + std::to_string(w.size()) + " weights for " +
                                  std::to_string(history.points.size()) + " points");
        }
        double sum = 0.0;
        for (double wi : w) {
            if (!std::isfinite(wi) || wi < -1e-12) throw InvalidArgument("harness: policy weights are not convex");
            sum += wi;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("harness: policy weights do not sum to one");
        for (double& wi : w) wi = std::max(wi, 0.0) / sum;
        history.weights = std::move(w);
        x = combine(history.points, history.weights);
    }
    return result;
}

int nep_fw_contrast_budget(std::size_t m, double beta) {
    const double initial_gap = 0.5 + static_cast<double>(m) / 8.0;
    const double d_star2 = static_cast<double>(m);
    const double d_l2 = 8.0 * initial_gap;
    return static_cast<int>(std::ceil(8.0 * 2.0 * beta * (d_star2 + d_l2)));
}

RunResult nep_fw_on_adversarial_instance(std::size_t d, std::size_t m, int budget) {
    const Hypercube cube(d);
    const auto obj = QuadraticObjective::distance_to(adversarial_optimum(d, m));
    SolverConfig cfg;
    cfg.variant = Variant::nep_fw;
    cfg.max_iters = budget;
    cfg.start = cube.make_vertex(adversarial_start(d, m));
    cfg.f_star = 0.0;
    return nep_fw_run(obj, cube, cfg);
}

}  // namespace nepfw
