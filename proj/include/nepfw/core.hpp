#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nepfw {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    DimensionMismatch(std::size_t expected, std::size_t got);
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Decomposition weights violate the simplex constraints beyond tolerance.
class InvalidDecomposition : public Error {
public:
    using Error::Error;
};

/// A correction subsolver produced weights no valid solver could produce.
class SubsolverInconsistency : public Error {
public:
    using Error::Error;
};

class EnumerationRefused : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

/// The adversarial construction was asked for an answer that is not a valid
/// linear minimizer.
class ConstructionViolated : public Error {
public:
    using Error::Error;
};

/// Malformed text input; carries the 1-based line the problem was found on.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// ---------------------------------------------------------------------------
// Points and atoms
// ---------------------------------------------------------------------------

class DensePoint {
public:
    DensePoint() = default;
    explicit DensePoint(std::size_t dim, double fill = 0.0) : coords_(dim, fill) {}
    explicit DensePoint(std::vector<double> coords) : coords_(std::move(coords)) {}
    DensePoint(std::initializer_list<double> coords) : coords_(coords) {}

    std::size_t size() const noexcept { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }
    double& operator[](std::size_t i) { return coords_[i]; }

    std::span<const double> span() const noexcept { return coords_; }
    std::span<double> span() noexcept { return coords_; }
    const double* data() const noexcept { return coords_.data(); }
    double* data() noexcept { return coords_.data(); }
    const std::vector<double>& coords() const noexcept { return coords_; }

    auto begin() const noexcept { return coords_.begin(); }
    auto end() const noexcept { return coords_.end(); }

    bool all_finite() const noexcept;

    friend bool operator==(const DensePoint&, const DensePoint&) = default;

private:
    std::vector<double> coords_;
};

double dot(const DensePoint& a, const DensePoint& b);
double squared_distance(const DensePoint& a, const DensePoint& b);
double norm(const DensePoint& a);
DensePoint operator-(const DensePoint& a, const DensePoint& b);
DensePoint operator+(const DensePoint& a, const DensePoint& b);
DensePoint operator*(double s, const DensePoint& a);
/// (1 - eta) * x + eta * v
DensePoint convex_step(const DensePoint& x, const DensePoint& v, double eta);

/// Backend-defined discrete identity of an extreme point. Ties in oracles
/// resolve to the lexicographically smallest key.
struct AtomId {
    std::vector<std::int64_t> key;
    friend auto operator<=>(const AtomId&, const AtomId&) = default;
    friend bool operator==(const AtomId&, const AtomId&) = default;
};

enum class SetKind {
    hypercube,
    unit_simplex,
    l1_ball,
    l2_ball,
    linf_ball,
    flow_polytope,
    explicit_hull,
    adversarial_cube,
};

std::string to_string(SetKind kind);

struct VertexAtom {
    DensePoint point;
    AtomId id;
    SetKind origin = SetKind::explicit_hull;
};

// ---------------------------------------------------------------------------
// Convex decomposition
// ---------------------------------------------------------------------------

inline constexpr double kWeightTolerance = 1e-12;
inline constexpr double kDropTolerance = 1e-12;

/// Iterate represented as explicit convex weights over stored atoms. Values
/// are immutable; updates produce a new decomposition.
class ConvexDecomposition {
public:
    ConvexDecomposition() = default;
    static ConvexDecomposition single(VertexAtom atom);
    /// Validates weights against kWeightTolerance and merges duplicate ids.
    ConvexDecomposition(std::vector<VertexAtom> atoms, std::vector<double> weights);

    std::size_t size() const noexcept { return atoms_.size(); }
    bool empty() const noexcept { return atoms_.empty(); }
    std::size_t dim() const noexcept { return atoms_.empty() ? 0 : atoms_.front().point.size(); }
    const std::vector<VertexAtom>& atoms() const noexcept { return atoms_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::optional<std::size_t> find(const AtomId& id) const;

private:
    std::vector<VertexAtom> atoms_;
    std::vector<double> weights_;
};

/// Sum of weight * atom. Throws InvalidDecomposition when the weights leave
/// the simplex by more than kWeightTolerance.
DensePoint materialize(const ConvexDecomposition& decomp);

/// Applies weights from a correction step over (atoms..., atom). The update
/// has one entry per existing atom followed by the new atom's weight.
/// Weights below kDropTolerance are dropped, duplicate ids merged and the
/// rest renormalized to sum to exactly one.
ConvexDecomposition merge_atom(const ConvexDecomposition& decomp, const VertexAtom& atom,
                               std::span<const double> weight_update);

// ---------------------------------------------------------------------------
// Diagnostics and rate constants
// ---------------------------------------------------------------------------

/// Geometry of a constructed test instance. Fields other than d_k are only
/// known when the instance was built around a known optimum.
struct ProblemDiagnostics {
    double d_k = 0.0;
    /// Upper bound on D*: the diameter of an explicit vertex set whose hull
    /// holds the optimum. Exact (0) when the optimum is a vertex.
    std::optional<double> d_star;
    std::optional<double> d_f_star;
    std::function<double(const DensePoint&)> dist_to_opt;
    std::optional<double> f_star;
    std::optional<int> dim_f_star;
    /// Quadratic growth parameter, when derivable.
    std::optional<double> alpha;
    std::optional<DensePoint> x_star;

    /// 0 <= d_star <= d_f_star <= d_k over the fields that are present.
    bool ordering_holds(double tol = 1e-12) const;
};

struct RateConstants {
    std::optional<double> alpha;
    std::optional<double> beta;
    double mu = 1.0;
    std::optional<double> big_c;
    std::optional<double> big_m;
    std::optional<double> m1;
    std::optional<double> m2;
    std::optional<double> kappa;
    std::optional<double> delta;
    std::optional<double> tau;
};

/// max(beta/alpha * (4 + 8 d mu^2 D_F*^2), 1/2)
double minimum_big_m(double beta, double alpha, std::size_t dim, double mu, double d_f_star);

/// Fills alpha, beta, C and M for the fixed linear-rate schedule from instance
/// data. C is f(x_1) - f*.
RateConstants derive_linear_rate_constants(double beta, double alpha, std::size_t dim, double mu,
                                           double d_f_star, double initial_gap);

/// Fills M1, M2, kappa and tau for the two-phase schedule (needs alpha, beta,
/// C and delta already set).
RateConstants derive_two_phase_constants(RateConstants base, double d_f_star, int dim_f_star);

/// Human-readable notes about user-supplied constants that fall below the
/// values the linear-rate guarantees need.
std::vector<std::string> audit_rate_constants(const RateConstants& rc, std::size_t dim,
                                              std::optional<double> d_f_star);

}  // namespace nepfw
