#include "nepfw/feasible_sets.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "nepfw/correction.hpp"
#include "nepfw/kernels.hpp"

namespace nepfw {

void FeasibleSet::check_dim(const DensePoint& p) const {
    if (p.size() != dim()) throw DimensionMismatch(dim(), p.size());
}

VertexAtom FeasibleSet::nep(const DensePoint& y) const {
    check_dim(y);
    DensePoint cost(dim());
    switch (nep_strategy()) {
    case NepStrategy::zero_one:
        for (std::size_t i = 0; i < dim(); ++i) cost[i] = 1.0 - 2.0 * y[i];
        return lmo(cost);
    case NepStrategy::norm_uniform:
        for (std::size_t i = 0; i < dim(); ++i) cost[i] = -2.0 * y[i];
        return lmo(cost);
    case NepStrategy::full_scan: break;
    }
    // Full-scan backends override nep; reaching here means a backend forgot to.
    throw Error("nep: backend " + to_string(kind()) + " has no nearest-point rule");
}

VertexAtom regularized_lmo(const FeasibleSet& set, const DensePoint& g, const DensePoint& x,
                           double lambda) {
    if (!(lambda >= 0.0)) throw InvalidArgument("regularized_lmo: lambda must be >= 0");
    if (g.size() != set.dim()) throw DimensionMismatch(set.dim(), g.size());
    if (lambda == 0.0) return set.lmo(g);
    if (x.size() != set.dim()) throw DimensionMismatch(set.dim(), x.size());
    DensePoint y = x;
    kernels::axpy(-1.0 / (2.0 * lambda), g.span(), y.span());
    return set.nep(y);
}

double max_pairwise_distance(const std::vector<VertexAtom>& atoms) {
    double best = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        for (std::size_t j = i + 1; j < atoms.size(); ++j) {
            best = std::max(best, squared_distance(atoms[i].point, atoms[j].point));
        }
    }
    return std::sqrt(best);
}

namespace {

bool is_zero_one_vector(const DensePoint& p) {
    return std::all_of(p.begin(), p.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

void check_enumeration(double count, std::size_t cap, SetKind kind) {
    if (!(count <= static_cast<double>(cap))) {
        throw EnumerationRefused("enumerate_vertices: " + to_string(kind) + " has " +
                                 std::to_string(count) + " vertices, cap is " +
                                 std::to_string(cap));
    }
}

}  // namespace

AtomId pack_bits(const DensePoint& bits) {
    AtomId id;
    id.key.assign((bits.size() + 62) / 63, 0);
    // 63 bits per word keeps every word non-negative, so signed comparison of
    // words matches lexicographic order of the bit string.
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != 0.0) id.key[i / 63] |= std::int64_t{1} << (62 - i % 63);
    }
    return id;
}

// ---------------------------------------------------------------------------
// Hypercube

Hypercube::Hypercube(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw InvalidArgument("hypercube: dimension must be positive");
}

VertexAtom Hypercube::make_vertex(const DensePoint& bits) const {
    check_dim(bits);
    return VertexAtom{bits, pack_bits(bits), SetKind::hypercube};
}

VertexAtom Hypercube::lmo(const DensePoint& c) const {
    check_dim(c);
    DensePoint v(dim_);
    for (std::size_t i = 0; i < dim_; ++i) v[i] = c[i] < 0.0 ? 1.0 : 0.0;
    return make_vertex(v);
}

double Hypercube::diameter() const { return std::sqrt(static_cast<double>(dim_)); }

bool Hypercube::contains(const DensePoint& x, double tol) const {
    if (x.size() != dim_ || !x.all_finite()) return false;
    return std::all_of(x.begin(), x.end(), [tol](double v) { return v >= -tol && v <= 1.0 + tol; });
}

bool Hypercube::is_vertex(const VertexAtom& atom) const {
    return atom.point.size() == dim_ && is_zero_one_vector(atom.point) &&
           atom.id == pack_bits(atom.point);
}

std::optional<double> Hypercube::vertex_count() const {
    return std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(dim_, 4000)));
}

std::vector<VertexAtom> Hypercube::enumerate_vertices(std::size_t cap) const {
    check_enumeration(*vertex_count(), cap, kind());
    const std::size_t count = std::size_t{1} << dim_;
    std::vector<VertexAtom> out;
    out.reserve(count);
    DensePoint v(dim_);
    for (std::size_t mask = 0; mask < count; ++mask) {
        for (std::size_t i = 0; i < dim_; ++i) v[i] = (mask >> i) & 1U ? 1.0 : 0.0;
        out.push_back(make_vertex(v));
    }
    return out;
}

double Hypercube::max_vertex_norm() const { return diameter(); }

// ---------------------------------------------------------------------------
// Unit simplex

UnitSimplex::UnitSimplex(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw InvalidArgument("unit simplex: dimension must be positive");
}

VertexAtom UnitSimplex::vertex(std::size_t i) const {
    DensePoint v(dim_);
    v[i] = 1.0;
    return VertexAtom{std::move(v), AtomId{{static_cast<std::int64_t>(i)}}, SetKind::unit_simplex};
}

VertexAtom UnitSimplex::lmo(const DensePoint& c) const {
    check_dim(c);
    std::size_t best = 0;
    for (std::size_t i = 1; i < dim_; ++i) {
        if (c[i] < c[best]) best = i;
    }
    return vertex(best);
}

double UnitSimplex::diameter() const { return dim_ >= 2 ? std::sqrt(2.0) : 0.0; }

bool UnitSimplex::contains(const DensePoint& x, double tol) const {
    if (x.size() != dim_ || !x.all_finite()) return false;
    double sum = 0.0;
    for (double v : x) {
        if (v < -tol) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

bool UnitSimplex::is_vertex(const VertexAtom& atom) const {
    if (atom.point.size() != dim_ || !is_zero_one_vector(atom.point)) return false;
    if (std::count(atom.point.begin(), atom.point.end(), 1.0) != 1) return false;
    const auto i = std::find(atom.point.begin(), atom.point.end(), 1.0) - atom.point.begin();
    return atom.id == AtomId{{static_cast<std::int64_t>(i)}};
}

std::optional<double> UnitSimplex::vertex_count() const { return static_cast<double>(dim_); }

std::vector<VertexAtom> UnitSimplex::enumerate_vertices(std::size_t cap) const {
    check_enumeration(static_cast<double>(dim_), cap, kind());
    std::vector<VertexAtom> out;
    for (std::size_t i = 0; i < dim_; ++i) out.push_back(vertex(i));
    return out;
}

// ---------------------------------------------------------------------------
// l1 ball

L1Ball::L1Ball(std::size_t dim, double radius) : dim_(dim), radius_(radius) {
    if (dim == 0 || !(radius > 0.0)) throw InvalidArgument("l1 ball: need dim > 0 and radius > 0");
}

VertexAtom L1Ball::vertex(std::size_t i, bool negative) const {
    DensePoint v(dim_);
    v[i] = negative ? -radius_ : radius_;
    return VertexAtom{std::move(v), AtomId{{static_cast<std::int64_t>(i), negative ? 1 : 0}},
                      SetKind::l1_ball};
}

VertexAtom L1Ball::lmo(const DensePoint& c) const {
    check_dim(c);
    std::size_t best = 0;
    for (std::size_t i = 1; i < dim_; ++i) {
        if (std::abs(c[i]) > std::abs(c[best])) best = i;
    }
    return vertex(best, c[best] > 0.0);
}

bool L1Ball::contains(const DensePoint& x, double tol) const {
    if (x.size() != dim_ || !x.all_finite()) return false;
    double s = 0.0;
    for (double v : x) s += std::abs(v);
    return s <= radius_ + tol;
}

bool L1Ball::is_vertex(const VertexAtom& atom) const {
    if (atom.point.size() != dim_) return false;
    std::size_t nonzero = 0, at = 0;
    for (std::size_t i = 0; i < dim_; ++i) {
        if (atom.point[i] != 0.0) {
            ++nonzero;
            at = i;
        }
    }
    if (nonzero != 1 || std::abs(atom.point[at]) != radius_) return false;
    return atom.id == AtomId{{static_cast<std::int64_t>(at), atom.point[at] < 0.0 ? 1 : 0}};
}

std::optional<double> L1Ball::vertex_count() const { return 2.0 * static_cast<double>(dim_); }

std::vector<VertexAtom> L1Ball::enumerate_vertices(std::size_t cap) const {
    check_enumeration(*vertex_count(), cap, kind());
    std::vector<VertexAtom> out;
    for (std::size_t i = 0; i < dim_; ++i) {
        out.push_back(vertex(i, false));
        out.push_back(vertex(i, true));
    }
    return out;
}

// ---------------------------------------------------------------------------
// l2 ball

L2Ball::L2Ball(std::size_t dim, double radius) : dim_(dim), radius_(radius) {
    if (dim == 0 || !(radius > 0.0)) throw InvalidArgument("l2 ball: need dim > 0 and radius > 0");
}

VertexAtom L2Ball::make_atom(DensePoint p) const {
    AtomId id;
    id.key.reserve(p.size());
    for (double v : p) id.key.push_back(std::bit_cast<std::int64_t>(v));
    return VertexAtom{std::move(p), std::move(id), SetKind::l2_ball};
}

VertexAtom L2Ball::lmo(const DensePoint& c) const {
    check_dim(c);
    const double n = norm(c);
    DensePoint v(dim_);
    if (n == 0.0) {
        v[0] = radius_;
    } else {
        for (std::size_t i = 0; i < dim_; ++i) v[i] = -radius_ * (c[i] / n);
    }
    return make_atom(std::move(v));
}

bool L2Ball::contains(const DensePoint& x, double tol) const {
    if (x.size() != dim_ || !x.all_finite()) return false;
    return norm(x) <= radius_ + tol;
}

bool L2Ball::is_vertex(const VertexAtom& atom) const {
    if (atom.point.size() != dim_ || !atom.point.all_finite()) return false;
    return std::abs(norm(atom.point) - radius_) <= 1e-12 * radius_ &&
           atom.id == make_atom(atom.point).id;
}

std::vector<VertexAtom> L2Ball::enumerate_vertices(std::size_t) const {
    throw EnumerationRefused("enumerate_vertices: l2 ball has infinitely many extreme points");
}

// ---------------------------------------------------------------------------
// linf ball

LinfBall::LinfBall(std::size_t dim, double radius) : dim_(dim), radius_(radius) {
    if (dim == 0 || !(radius > 0.0)) {
        throw InvalidArgument("linf ball: need dim > 0 and radius > 0");
    }
}

VertexAtom LinfBall::from_signs(const std::vector<bool>& negative) const {
    DensePoint v(dim_), bits(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        v[i] = negative[i] ? -radius_ : radius_;
        bits[i] = negative[i] ? 1.0 : 0.0;
    }
    return VertexAtom{std::move(v), pack_bits(bits), SetKind::linf_ball};
}

VertexAtom LinfBall::lmo(const DensePoint& c) const {
    check_dim(c);
    std::vector<bool> negative(dim_);
    for (std::size_t i = 0; i < dim_; ++i) negative[i] = c[i] > 0.0;
    return from_signs(negative);
}

double LinfBall::diameter() const { return 2.0 * radius_ * std::sqrt(static_cast<double>(dim_)); }

double LinfBall::max_vertex_norm() const { return radius_ * std::sqrt(static_cast<double>(dim_)); }

bool LinfBall::contains(const DensePoint& x, double tol) const {
    if (x.size() != dim_ || !x.all_finite()) return false;
    return std::all_of(x.begin(), x.end(), [&](double v) { return std::abs(v) <= radius_ + tol; });
}

bool LinfBall::is_vertex(const VertexAtom& atom) const {
    if (atom.point.size() != dim_) return false;
    std::vector<bool> negative(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        if (std::abs(atom.point[i]) != radius_) return false;
        negative[i] = atom.point[i] < 0.0;
    }
    return atom.id == from_signs(negative).id;
}

std::optional<double> LinfBall::vertex_count() const {
    return std::ldexp(1.0, static_cast<int>(std::min<std::size_t>(dim_, 4000)));
}

std::vector<VertexAtom> LinfBall::enumerate_vertices(std::size_t cap) const {
    check_enumeration(*vertex_count(), cap, kind());
    const std::size_t count = std::size_t{1} << dim_;
    std::vector<VertexAtom> out;
    out.reserve(count);
    std::vector<bool> negative(dim_);
    for (std::size_t mask = 0; mask < count; ++mask) {
        for (std::size_t i = 0; i < dim_; ++i) negative[i] = (mask >> i) & 1U;
        out.push_back(from_signs(negative));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Explicit hull

ExplicitHull::ExplicitHull(std::vector<DensePoint> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) throw InvalidArgument("explicit hull: empty vertex list");
    dim_ = vertices_.front().size();
    if (dim_ == 0) throw InvalidArgument("explicit hull: zero-dimensional vertices");
    for (const auto& v : vertices_) {
        if (v.size() != dim_) throw DimensionMismatch(dim_, v.size());
        if (!v.all_finite()) throw InvalidArgument("explicit hull: non-finite vertex");
    }
    double best = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
            best = std::max(best, squared_distance(vertices_[i], vertices_[j]));
        }
    }
    diameter_ = std::sqrt(best);
}

VertexAtom ExplicitHull::vertex(std::size_t i) const {
    return VertexAtom{vertices_[i], AtomId{{static_cast<std::int64_t>(i)}}, SetKind::explicit_hull};
}

VertexAtom ExplicitHull::lmo(const DensePoint& c) const {
    check_dim(c);
    std::size_t best = 0;
    double best_value = dot(vertices_[0], c);
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        const double value = dot(vertices_[i], c);
        if (value < best_value) {
            best_value = value;
            best = i;
        }
    }
    return vertex(best);
}

VertexAtom ExplicitHull::nep(const DensePoint& y) const {
    check_dim(y);
    std::size_t best = 0;
    double best_value = squared_distance(vertices_[0], y);
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        const double value = squared_distance(vertices_[i], y);
        if (value < best_value) {
            best_value = value;
            best = i;
        }
    }
    return vertex(best);
}

double ExplicitHull::diameter() const { return diameter_; }

bool ExplicitHull::contains(const DensePoint& x, double tol) const {
    if (x.size() != dim_ || !x.all_finite()) return false;
    return distance_to_hull(vertices_, x) <= tol;
}

bool ExplicitHull::is_vertex(const VertexAtom& atom) const {
    if (atom.id.key.size() != 1) return false;
    const auto i = atom.id.key[0];
    if (i < 0 || static_cast<std::size_t>(i) >= vertices_.size()) return false;
    return vertices_[static_cast<std::size_t>(i)] == atom.point;
}

std::optional<double> ExplicitHull::vertex_count() const {
    return static_cast<double>(vertices_.size());
}

std::vector<VertexAtom> ExplicitHull::enumerate_vertices(std::size_t cap) const {
    check_enumeration(static_cast<double>(vertices_.size()), cap, kind());
    std::vector<VertexAtom> out;
    for (std::size_t i = 0; i < vertices_.size(); ++i) out.push_back(vertex(i));
    return out;
}

double ExplicitHull::max_vertex_norm() const {
    double best = 0.0;
    for (const auto& v : vertices_) best = std::max(best, norm(v));
    return best;
}

// ---------------------------------------------------------------------------
// Flow polytope

namespace {
constexpr std::size_t kPairwiseDiameterCap = 4096;
}

FlowPolytope::FlowPolytope(DagInstance dag) : dag_(std::move(dag)), diameter_(0.0) {
    diameter_ = compute_diameter();
}

VertexAtom FlowPolytope::path_vertex(const std::vector<int>& path_edges) const {
    DensePoint v(dim());
    AtomId id;
    id.key.reserve(path_edges.size());
    for (int e : path_edges) {
        v[static_cast<std::size_t>(e)] = 1.0;
        id.key.push_back(e);
    }
    return VertexAtom{std::move(v), std::move(id), SetKind::flow_polytope};
}

VertexAtom FlowPolytope::lmo(const DensePoint& c) const {
    check_dim(c);
    const auto n = static_cast<std::size_t>(dag_.node_count());
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> to_sink(n, inf);
    std::vector<int> choice(n, -1);
    to_sink[static_cast<std::size_t>(dag_.sink())] = 0.0;
    const auto& order = dag_.topological_order();
    // Costs may be negative; reverse topological order makes one pass exact.
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const auto u = static_cast<std::size_t>(*it);
        if (static_cast<int>(u) == dag_.sink()) continue;
        for (int e : dag_.out_edges()[u]) {
            const auto head = static_cast<std::size_t>(dag_.edges()[static_cast<std::size_t>(e)].to);
            if (to_sink[head] == inf) continue;
            const double value = c[static_cast<std::size_t>(e)] + to_sink[head];
            if (value < to_sink[u]) {
                to_sink[u] = value;
                choice[u] = e;
            }
        }
    }
    std::vector<int> path;
    int u = dag_.source();
    while (u != dag_.sink()) {
        const int e = choice[static_cast<std::size_t>(u)];
        path.push_back(e);
        u = dag_.edges()[static_cast<std::size_t>(e)].to;
    }
    return path_vertex(path);
}

bool FlowPolytope::contains(const DensePoint& x, double tol) const {
    if (x.size() != dim() || !x.all_finite()) return false;
    std::vector<double> balance(static_cast<std::size_t>(dag_.node_count()), 0.0);
    for (std::size_t e = 0; e < dim(); ++e) {
        if (x[e] < -tol || x[e] > 1.0 + tol) return false;
        balance[static_cast<std::size_t>(dag_.edges()[e].from)] += x[e];
        balance[static_cast<std::size_t>(dag_.edges()[e].to)] -= x[e];
    }
    for (int v = 0; v < dag_.node_count(); ++v) {
        const double expected = v == dag_.source() ? 1.0 : v == dag_.sink() ? -1.0 : 0.0;
        if (std::abs(balance[static_cast<std::size_t>(v)] - expected) > tol) return false;
    }
    return true;
}

bool FlowPolytope::is_vertex(const VertexAtom& atom) const {
    if (atom.point.size() != dim() || !is_zero_one_vector(atom.point)) return false;
    std::vector<int> path;
    int u = dag_.source();
    while (u != dag_.sink()) {
        int next = -1;
        for (int e : dag_.out_edges()[static_cast<std::size_t>(u)]) {
            if (atom.point[static_cast<std::size_t>(e)] == 1.0) {
                if (next != -1) return false;
                next = e;
            }
        }
        if (next == -1) return false;
        path.push_back(next);
        u = dag_.edges()[static_cast<std::size_t>(next)].to;
    }
    const auto ones = std::count(atom.point.begin(), atom.point.end(), 1.0);
    if (static_cast<std::size_t>(ones) != path.size()) return false;
    return atom.id == path_vertex(path).id;
}

std::vector<VertexAtom> FlowPolytope::enumerate_vertices(std::size_t cap) const {
    check_enumeration(dag_.path_count(), cap, kind());
    std::vector<VertexAtom> out;
    std::vector<int> path;
    // Iterative DFS over out-edges in index order.
    std::vector<std::size_t> cursor{0};
    std::vector<int> stack{dag_.source()};
    while (!stack.empty()) {
        const int u = stack.back();
        if (u == dag_.sink()) {
            out.push_back(path_vertex(path));
            stack.pop_back();
            cursor.pop_back();
            if (!path.empty()) path.pop_back();
            continue;
        }
        const auto& outs = dag_.out_edges()[static_cast<std::size_t>(u)];
        std::size_t& next = cursor.back();
        if (next < outs.size()) {
            const int e = outs[next++];
            path.push_back(e);
            stack.push_back(dag_.edges()[static_cast<std::size_t>(e)].to);
            cursor.push_back(0);
        } else {
            stack.pop_back();
            cursor.pop_back();
            if (!path.empty()) path.pop_back();
        }
    }
    return out;
}

double FlowPolytope::max_vertex_norm() const {
    return std::sqrt(static_cast<double>(dag_.longest_path_edges()));
}

double FlowPolytope::compute_diameter() const {
    if (dag_.path_count() <= static_cast<double>(kPairwiseDiameterCap)) {
        return max_pairwise_distance(enumerate_vertices());
    }
    // ||u - v||^2 = |u| + |v| - 2|u & v| for 0/1 vectors.
    const double bound = std::min(static_cast<double>(dim()),
                                  2.0 * static_cast<double>(dag_.longest_path_edges()));
    return std::sqrt(bound);
}

}  // namespace nepfw
