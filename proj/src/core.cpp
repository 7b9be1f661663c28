#include "nepfw/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "nepfw/kernels.hpp"

namespace nepfw {

DimensionMismatch::DimensionMismatch(std::size_t expected, std::size_t got)
    : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
            std::to_string(got)) {}

ParseError::ParseError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

bool DensePoint::all_finite() const noexcept {
    return std::all_of(coords_.begin(), coords_.end(), [](double v) { return std::isfinite(v); });
}

double dot(const DensePoint& a, const DensePoint& b) {
    if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
    return kernels::dot(a.span(), b.span());
}

double squared_distance(const DensePoint& a, const DensePoint& b) {
    if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
    return kernels::squared_distance(a.span(), b.span());
}

double norm(const DensePoint& a) { return std::sqrt(kernels::squared_norm(a.span())); }

DensePoint operator-(const DensePoint& a, const DensePoint& b) {
    if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
    DensePoint out = a;
    kernels::axpy(-1.0, b.span(), out.span());
    return out;
}

DensePoint operator+(const DensePoint& a, const DensePoint& b) {
    if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
    DensePoint out = a;
    kernels::axpy(1.0, b.span(), out.span());
    return out;
}

DensePoint operator*(double s, const DensePoint& a) {
    DensePoint out(a.size());
    kernels::axpy(s, a.span(), out.span());
    return out;
}

DensePoint convex_step(const DensePoint& x, const DensePoint& v, double eta) {
    if (x.size() != v.size()) throw DimensionMismatch(x.size(), v.size());
    DensePoint out = x;
    kernels::axpby(eta, v.span(), 1.0 - eta, out.span());
    return out;
}

std::string to_string(SetKind kind) {
    switch (kind) {
    case SetKind::hypercube: return "hypercube";
    case SetKind::unit_simplex: return "unit_simplex";
    case SetKind::l1_ball: return "l1_ball";
    case SetKind::l2_ball: return "l2_ball";
    case SetKind::linf_ball: return "linf_ball";
    case SetKind::flow_polytope: return "flow_polytope";
    case SetKind::explicit_hull: return "explicit_hull";
    case SetKind::adversarial_cube: return "adversarial_cube";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

namespace {

void check_weights(std::span<const double> weights, const char* context) {
    double sum = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w)) {
            throw InvalidDecomposition(std::string(context) + ": non-finite weight");
        }
        if (w < -kWeightTolerance) {
            std::ostringstream os;
            os << context << ": weight " << w << " below -tol";
            throw InvalidDecomposition(os.str());
        }
        sum += w;
    }
    if (std::abs(sum - 1.0) > kWeightTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << context << ": weights sum to " << sum;
        throw InvalidDecomposition(os.str());
    }
}

}  // namespace

ConvexDecomposition ConvexDecomposition::single(VertexAtom atom) {
    ConvexDecomposition d;
    d.atoms_.push_back(std::move(atom));
    d.weights_.push_back(1.0);
    return d;
}

ConvexDecomposition::ConvexDecomposition(std::vector<VertexAtom> atoms, std::vector<double> weights) {
    if (atoms.size() != weights.size()) throw DimensionMismatch(atoms.size(), weights.size());
    if (atoms.empty()) throw InvalidDecomposition("decomposition needs at least one atom");
    check_weights(weights, "decomposition");
    const std::size_t dim = atoms.front().point.size();
    std::map<AtomId, std::size_t> seen;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].point.size() != dim) throw DimensionMismatch(dim, atoms[i].point.size());
        auto [it, inserted] = seen.emplace(atoms[i].id, atoms_.size());
        if (inserted) {
            atoms_.push_back(std::move(atoms[i]));
            weights_.push_back(weights[i]);
        } else {
            weights_[it->second] += weights[i];
        }
    }
}

std::optional<std::size_t> ConvexDecomposition::find(const AtomId& id) const {
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        if (atoms_[i].id == id) return i;
    }
    return std::nullopt;
}

DensePoint materialize(const ConvexDecomposition& decomp) {
    if (decomp.empty()) throw InvalidDecomposition("materialize: empty decomposition");
    check_weights(decomp.weights(), "materialize");
    DensePoint x(decomp.dim());
    for (std::size_t i = 0; i < decomp.size(); ++i) {
        kernels::axpy(decomp.weights()[i], decomp.atoms()[i].point.span(), x.span());
    }
    return x;
}

ConvexDecomposition merge_atom(const ConvexDecomposition& decomp, const VertexAtom& atom,
                               std::span<const double> weight_update) {
    const std::size_t k = decomp.size();
    if (weight_update.size() != k + 1) throw DimensionMismatch(k + 1, weight_update.size());
    if (k > 0 && atom.point.size() != decomp.dim()) {
        throw DimensionMismatch(decomp.dim(), atom.point.size());
    }
    for (double w : weight_update) {
        if (!std::isfinite(w) || w < -kWeightTolerance) {
            std::ostringstream os;
            os << "merge_atom: subsolver returned weight " << w;
            throw SubsolverInconsistency(os.str());
        }
    }

    std::vector<VertexAtom> atoms;
    std::vector<double> weights;
    atoms.reserve(k + 1);
    weights.reserve(k + 1);
    auto push = [&](const VertexAtom& a, double w) {
        for (std::size_t j = 0; j < atoms.size(); ++j) {
            if (atoms[j].id == a.id) {
                weights[j] += w;
                return;
            }
        }
        atoms.push_back(a);
        weights.push_back(w);
    };
    for (std::size_t i = 0; i < k; ++i) push(decomp.atoms()[i], weight_update[i]);
    push(atom, weight_update[k]);

    std::vector<VertexAtom> kept_atoms;
    std::vector<double> kept_weights;
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (weights[i] < kDropTolerance) continue;
        kept_atoms.push_back(std::move(atoms[i]));
        kept_weights.push_back(weights[i]);
        total += weights[i];
    }
    if (kept_atoms.empty() || !(total > 0.0)) {
        throw SubsolverInconsistency("merge_atom: all weights vanished");
    }
    for (double& w : kept_weights) w /= total;
    return ConvexDecomposition(std::move(kept_atoms), std::move(kept_weights));
}

// ---------------------------------------------------------------------------

bool ProblemDiagnostics::ordering_holds(double tol) const {
    if (d_k < 0.0) return false;
    if (d_star && *d_star < -tol) return false;
    if (d_star && *d_star > d_k + tol) return false;
    if (d_f_star && *d_f_star > d_k + tol) return false;
    if (d_star && d_f_star && *d_star > *d_f_star + tol) return false;
    return true;
}

double minimum_big_m(double beta, double alpha, std::size_t dim, double mu, double d_f_star) {
    const double m = beta / alpha *
                     (4.0 + 8.0 * static_cast<double>(dim) * mu * mu * d_f_star * d_f_star);
    return std::max(m, 0.5);
}

RateConstants derive_linear_rate_constants(double beta, double alpha, std::size_t dim, double mu,
                                           double d_f_star, double initial_gap) {
    if (!(alpha > 0.0) || !(beta > 0.0)) {
        throw InvalidArgument("rate constants need alpha > 0 and beta > 0");
    }
    RateConstants rc;
    rc.alpha = alpha;
    rc.beta = beta;
    rc.mu = mu;
    rc.big_c = std::max(initial_gap, 0.0);
    rc.big_m = minimum_big_m(beta, alpha, dim, mu, d_f_star);
    return rc;
}

RateConstants derive_two_phase_constants(RateConstants rc, double d_f_star, int dim_f_star) {
    if (!rc.alpha || !rc.beta || !rc.big_c || !rc.delta) {
        throw InvalidArgument("two-phase constants need alpha, beta, C and delta");
    }
    const double alpha = *rc.alpha, beta = *rc.beta, delta = *rc.delta;
    const double d2 = d_f_star * d_f_star;
    const double kappa = 2.0 * rc.mu * rc.mu * dim_f_star / alpha;
    rc.kappa = kappa;
    rc.m1 = std::max(4.0 * beta / alpha + 8.0 * beta * d2 * std::max(2.0 * kappa, 1.0 / delta), 0.5);
    rc.m2 = std::max(4.0 * beta / alpha + 16.0 * beta * kappa * d2, 0.5);
    if (kappa > 0.0 && 2.0 * kappa <= 1.0 / delta) {
        const double ratio = *rc.big_c / (delta * delta * kappa);
        rc.tau = std::ceil(4.0 * *rc.m1 * std::log(std::max(ratio, 1.0)) + 1.0);
    }
    return rc;
}

std::vector<std::string> audit_rate_constants(const RateConstants& rc, std::size_t dim,
                                              std::optional<double> d_f_star) {
    std::vector<std::string> notes;
    if (rc.big_m && rc.alpha && rc.beta && d_f_star) {
        const double need = minimum_big_m(*rc.beta, *rc.alpha, dim, rc.mu, *d_f_star);
        if (*rc.big_m < need) {
            std::ostringstream os;
            os << "user-supplied M=" << *rc.big_m << " is below the derived minimum " << need;
            notes.push_back(os.str());
        }
    }
    if (rc.mu < 1.0) notes.push_back("mu below 1 is outside the admissible range");
    return notes;
}

}  // namespace nepfw
