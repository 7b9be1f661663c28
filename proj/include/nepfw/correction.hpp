#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nepfw/core.hpp"

namespace nepfw {

class QuadraticObjective;

/// Euclidean projection onto {w >= 0, sum w = 1}.
std::vector<double> simplex_project(std::span<const double> w);

/// minimize 1/2 w^T Q w + q^T w + constant over the weight simplex.
struct SimplexQP {
    std::size_t n = 0;
    std::vector<double> q_matrix;  // n x n, row-major, symmetric PSD
    std::vector<double> linear;
    double constant = 0.0;

    double value(std::span<const double> w) const;
    std::vector<double> gradient(std::span<const double> w) const;
    /// Largest eigenvalue of Q.
    double largest_eigenvalue() const;
};

enum class StopMode { budget, tolerance };

struct FistaOptions {
    int max_iters = 50;
    /// Step constant; 0 means the largest eigenvalue of Q.
    double lipschitz = 0.0;
    StopMode mode = StopMode::budget;
    /// Gradient-mapping norm at which tolerance mode stops.
    double tolerance = 1e-12;
};

struct FistaResult {
    std::vector<double> weights;
    double value = 0.0;
    int iterations = 0;
    /// Gradient-mapping norm at the returned weights.
    double residual = 0.0;
    /// Tolerance mode only: the residual target was met.
    bool converged = true;
};

/// Accelerated projected gradient over the simplex, started at `warm`. The
/// returned value never exceeds the value at `warm`.
FistaResult fista_simplex(const SimplexQP& qp, std::span<const double> warm, const FistaOptions& opts);

/// Atom images and their Gram matrix, kept in step with a decomposition so
/// correction QPs can be assembled without recomputing old inner products.
class HullGram {
public:
    HullGram() = default;

    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<AtomId>& ids() const noexcept { return ids_; }
    const std::vector<DensePoint>& images() const noexcept { return images_; }
    double gram(std::size_t i, std::size_t j) const { return gram_[i * ids_.size() + j]; }

    /// Copy with one more image appended (ids may repeat).
    HullGram extended(const AtomId& id, DensePoint image) const;
    /// Copy restricted to `keep`, in that order. Every id must be present.
    HullGram restricted(const std::vector<AtomId>& keep) const;

private:
    std::vector<AtomId> ids_;
    std::vector<DensePoint> images_;
    std::vector<double> gram_;
};

/// Surrogate of line 7: x.g + (beta/2) ||x - x_t||^2 over the hull. The
/// images must be the atoms themselves.
SimplexQP option1_qp(const HullGram& hull, const DensePoint& grad, const DensePoint& x_t, double beta);

/// f over the hull for f = 1/2 ||Ax - b||^2. The images must be A v_i.
SimplexQP option2_qp(const HullGram& hull, std::span<const double> b);

FistaResult solve_option1(const SimplexQP& qp, std::span<const double> warm, const FistaOptions& opts);
FistaResult solve_option2(const SimplexQP& qp, std::span<const double> warm, const FistaOptions& opts);

/// Option 2 for an atom list from scratch (no cached Gram).
FistaResult solve_option2(const std::vector<VertexAtom>& atoms, const QuadraticObjective& obj,
                          std::span<const double> warm, const FistaOptions& opts);

/// Euclidean distance from x to conv(points), by Wolfe's minimum-norm-point
/// method (finite, exact up to rounding).
double distance_to_hull(const std::vector<DensePoint>& points, const DensePoint& x);

}  // namespace nepfw
