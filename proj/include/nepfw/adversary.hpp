#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "nepfw/core.hpp"
#include "nepfw/objectives.hpp"
#include "nepfw/solvers.hpp"

namespace nepfw {

/// Linear minimization oracle over {0,1}^d that answers the first k calls
/// with the block vertices of the lower-bound construction, checking each
/// answer is a true minimizer, then falls back to the plain hypercube oracle.
class AdversarialOracle {
public:
    AdversarialOracle(std::size_t d, std::size_t m);

    VertexAtom lmo(const DensePoint& c);

    std::size_t dim() const noexcept { return d_; }
    std::size_t m() const noexcept { return m_; }
    std::size_t k() const noexcept { return k_; }
    std::size_t calls() const noexcept { return calls_; }
    /// Coordinates of S_i (0-based); S_0 holds the leftovers.
    const std::vector<std::size_t>& block(std::size_t i) const { return blocks_.at(i); }

private:
    std::size_t d_, m_, k_;
    std::vector<std::vector<std::size_t>> blocks_;
    std::size_t calls_ = 0;
};

/// 1/2 sum_{i<m} e_i
DensePoint adversarial_optimum(std::size_t d, std::size_t m);
/// e_{m+1} in 1-based coordinates.
DensePoint adversarial_start(std::size_t d, std::size_t m);

/// What a policy may see: the starting point, the oracle answers so far, the
/// gradients they were queried at, the current iterate's weights over the
/// history points, and the objective value function.
struct HarnessHistory {
    std::vector<DensePoint> points;  // x_1, v_1, ..., v_t
    std::vector<DensePoint> gradients;
    std::vector<double> weights;     // current iterate over points[0..t-1]
    int t = 1;
    std::function<double(const DensePoint&)> value;
};

/// Maps the history after call t to convex weights over points[0..t].
using CombinerPolicy = std::function<std::vector<double>(const HarnessHistory&)>;

CombinerPolicy harmonic_policy();
CombinerPolicy line_search_policy();
CombinerPolicy best_combination_policy();

struct HarnessResult {
    std::vector<DensePoint> iterates;  // x_1 .. x_{budget+1}
    std::vector<double> gaps;          // f(x_t) - f*
};

/// Runs a Frank-Wolfe-type method (one oracle call per iteration, iterate a
/// convex combination of the history) on f = 1/2 ||x - x*||^2 from x_1.
/// Throws InvalidArgument when the policy returns non-convex weights.
HarnessResult generic_fw_harness(const CombinerPolicy& policy, AdversarialOracle& oracle, int budget);

/// ceil(16 beta (D*^2 + D_L^2)) with D* = sqrt(m) and D_L^2 = 8 (f(x_1) - f*).
int nep_fw_contrast_budget(std::size_t m, double beta);

/// NEP-FW on the same instance, with the harmonic step and line search.
RunResult nep_fw_on_adversarial_instance(std::size_t d, std::size_t m, int budget);

}  // namespace nepfw
