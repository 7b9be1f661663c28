#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nepfw/core.hpp"

namespace nepfw {

inline constexpr std::size_t kEnumerationCap = std::size_t{1} << 20;

/// How a backend answers nearest-extreme-point queries.
enum class NepStrategy {
    zero_one,      // lmo with cost 1 - 2y
    norm_uniform,  // lmo with cost -2y
    full_scan,     // exhaustive over the stored vertex list
};

/// Oracle surface of a compact convex set given as the hull of its extreme
/// points. Backends are immutable and oracle calls are pure.
class FeasibleSet {
public:
    virtual ~FeasibleSet() = default;

    virtual std::size_t dim() const noexcept = 0;
    virtual SetKind kind() const noexcept = 0;
    virtual NepStrategy nep_strategy() const noexcept = 0;

    /// argmin over extreme points of <v, c>. Ties go to the smallest AtomId.
    virtual VertexAtom lmo(const DensePoint& c) const = 0;

    /// argmin over extreme points of ||v - y||^2. y need not be feasible.
    virtual VertexAtom nep(const DensePoint& y) const;

    virtual double diameter() const = 0;
    virtual bool contains(const DensePoint& x, double tol = 1e-9) const = 0;
    /// Membership plus extremality of an atom claimed to come from this set.
    virtual bool is_vertex(const VertexAtom& atom) const = 0;

    /// Finite vertex count, if known without enumerating.
    virtual std::optional<double> vertex_count() const = 0;
    virtual std::vector<VertexAtom> enumerate_vertices(std::size_t cap = kEnumerationCap) const = 0;

    /// Largest Euclidean norm of an extreme point.
    virtual double max_vertex_norm() const = 0;

    /// Every extreme point lies in {0,1}^d.
    bool is_zero_one() const noexcept { return nep_strategy() == NepStrategy::zero_one; }

protected:
    void check_dim(const DensePoint& p) const;
};

/// lambda > 0: nep(x - g / (2 lambda)); lambda == 0: lmo(g).
VertexAtom regularized_lmo(const FeasibleSet& set, const DensePoint& g, const DensePoint& x,
                           double lambda);

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

/// [0,1]^d. Ids are the 0/1 vector packed most-significant-bit first, so the
/// smallest id sets tied coordinates to 0.
class Hypercube final : public FeasibleSet {
public:
    explicit Hypercube(std::size_t dim);
    std::size_t dim() const noexcept override { return dim_; }
    SetKind kind() const noexcept override { return SetKind::hypercube; }
    NepStrategy nep_strategy() const noexcept override { return NepStrategy::zero_one; }
    VertexAtom lmo(const DensePoint& c) const override;
    double diameter() const override;
    bool contains(const DensePoint& x, double tol = 1e-9) const override;
    bool is_vertex(const VertexAtom& atom) const override;
    std::optional<double> vertex_count() const override;
    std::vector<VertexAtom> enumerate_vertices(std::size_t cap = kEnumerationCap) const override;
    double max_vertex_norm() const override;

    /// Atom for an arbitrary 0/1 vector.
    VertexAtom make_vertex(const DensePoint& bits) const;

private:
    std::size_t dim_;
};

/// Packs a 0/1 vector into an id, bit 0 most significant.
AtomId pack_bits(const DensePoint& bits);

/// conv{e_1, ..., e_d}. Ids are the coordinate index.
class UnitSimplex final : public FeasibleSet {
public:
    explicit UnitSimplex(std::size_t dim);
    std::size_t dim() const noexcept override { return dim_; }
    SetKind kind() const noexcept override { return SetKind::unit_simplex; }
    NepStrategy nep_strategy() const noexcept override { return NepStrategy::zero_one; }
    VertexAtom lmo(const DensePoint& c) const override;
    double diameter() const override;
    bool contains(const DensePoint& x, double tol = 1e-9) const override;
    bool is_vertex(const VertexAtom& atom) const override;
    std::optional<double> vertex_count() const override;
    std::vector<VertexAtom> enumerate_vertices(std::size_t cap = kEnumerationCap) const override;
    double max_vertex_norm() const override { return 1.0; }

private:
    VertexAtom vertex(std::size_t i) const;
    std::size_t dim_;
};

/// {x : ||x||_1 <= r}; vertices +-r e_i with id (i, sign), sign 0 for +.
class L1Ball final : public FeasibleSet {
public:
    L1Ball(std::size_t dim, double radius);
    std::size_t dim() const noexcept override { return dim_; }
    SetKind kind() const noexcept override { return SetKind::l1_ball; }
    NepStrategy nep_strategy() const noexcept override { return NepStrategy::norm_uniform; }
    VertexAtom lmo(const DensePoint& c) const override;
    double diameter() const override { return 2.0 * radius_; }
    bool contains(const DensePoint& x, double tol = 1e-9) const override;
    bool is_vertex(const VertexAtom& atom) const override;
    std::optional<double> vertex_count() const override;
    std::vector<VertexAtom> enumerate_vertices(std::size_t cap = kEnumerationCap) const override;
    double max_vertex_norm() const override { return radius_; }

private:
    VertexAtom vertex(std::size_t i, bool negative) const;
    std::size_t dim_;
    double radius_;
};

/// {x : ||x||_2 <= r}. Every sphere point is extreme; the id is the bit
/// pattern of the coordinates. A zero query answers r e_1.
class L2Ball final : public FeasibleSet {
public:
    L2Ball(std::size_t dim, double radius);
    std::size_t dim() const noexcept override { return dim_; }
    SetKind kind() const noexcept override { return SetKind::l2_ball; }
    NepStrategy nep_strategy() const noexcept override { return NepStrategy::norm_uniform; }
    VertexAtom lmo(const DensePoint& c) const override;
    double diameter() const override { return 2.0 * radius_; }
    bool contains(const DensePoint& x, double tol = 1e-9) const override;
    bool is_vertex(const VertexAtom& atom) const override;
    std::optional<double> vertex_count() const override { return std::nullopt; }
    std::vector<VertexAtom> enumerate_vertices(std::size_t cap = kEnumerationCap) const override;
    double max_vertex_norm() const override { return radius_; }

private:
    VertexAtom make_atom(DensePoint p) const;
    std::size_t dim_;
    double radius_;
};

/// {x : ||x||_inf <= r}; vertices r s for s in {-1,+1}^d, id = sign bits
/// (0 for +).
class LinfBall final : public FeasibleSet {
public:
    LinfBall(std::size_t dim, double radius);
    std::size_t dim() const noexcept override { return dim_; }
    SetKind kind() const noexcept override { return SetKind::linf_ball; }
    NepStrategy nep_strategy() const noexcept override { return NepStrategy::norm_uniform; }
    VertexAtom lmo(const DensePoint& c) const override;
    double diameter() const override;
    bool contains(const DensePoint& x, double tol = 1e-9) const override;
    bool is_vertex(const VertexAtom& atom) const override;
    std::optional<double> vertex_count() const override;
    std::vector<VertexAtom> enumerate_vertices(std::size_t cap = kEnumerationCap) const override;
    double max_vertex_norm() const override;

private:
    VertexAtom from_signs(const std::vector<bool>& negative) const;
    std::size_t dim_;
    double radius_;
};

/// Convex hull of an explicit vertex list. Ids are list positions; the list
/// is assumed to hold extreme points only.
class ExplicitHull final : public FeasibleSet {
public:
    explicit ExplicitHull(std::vector<DensePoint> vertices);
    std::size_t dim() const noexcept override { return dim_; }
    SetKind kind() const noexcept override { return SetKind::explicit_hull; }
    NepStrategy nep_strategy() const noexcept override { return NepStrategy::full_scan; }
    VertexAtom lmo(const DensePoint& c) const override;
    VertexAtom nep(const DensePoint& y) const override;
    double diameter() const override;
    bool contains(const DensePoint& x, double tol = 1e-9) const override;
    bool is_vertex(const VertexAtom& atom) const override;
    std::optional<double> vertex_count() const override;
    std::vector<VertexAtom> enumerate_vertices(std::size_t cap = kEnumerationCap) const override;
    double max_vertex_norm() const override;

    const std::vector<DensePoint>& vertices() const noexcept { return vertices_; }

private:
    VertexAtom vertex(std::size_t i) const;
    std::vector<DensePoint> vertices_;
    std::size_t dim_;
    double diameter_;
};

// ---------------------------------------------------------------------------
// Flow polytope
// ---------------------------------------------------------------------------

struct Edge {
    int from;
    int to;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed acyclic graph with a source and sink. Text format: a header line
/// "n s t" followed by one "u v" line per edge, 0-indexed nodes. Blank lines
/// and lines starting with '#' are ignored.
class DagInstance {
public:
    /// Throws InvalidArgument when the graph has a cycle, an out-of-range
    /// node, or no s-t path.
    DagInstance(int node_count, int source, int sink, std::vector<Edge> edges);

    static DagInstance parse(std::istream& in);
    static DagInstance parse_file(const std::string& path);
    void write(std::ostream& out) const;

    /// Layered DAG: source -> layer_1 -> ... -> layer_L -> sink, each layer
    /// `width` nodes, consecutive layers joined with probability `density`
    /// (at least one out- and in-edge per node so every node lies on a path).
    static DagInstance layered(int layers, int width, double density, std::uint64_t seed);
    /// s -> a -> t, s -> b -> t.
    static DagInstance diamond();

    int node_count() const noexcept { return node_count_; }
    int source() const noexcept { return source_; }
    int sink() const noexcept { return sink_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<int>& topological_order() const noexcept { return topo_; }
    const std::vector<std::vector<int>>& out_edges() const noexcept { return out_; }

    /// Number of s-t paths (as a double; may be astronomically large).
    double path_count() const;
    /// Longest s-t path in edges.
    std::size_t longest_path_edges() const;

    friend bool operator==(const DagInstance& a, const DagInstance& b) {
        return a.node_count_ == b.node_count_ && a.source_ == b.source_ && a.sink_ == b.sink_ &&
               a.edges_ == b.edges_;
    }

private:
    int node_count_;
    int source_;
    int sink_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> out_;
    std::vector<int> topo_;
};

/// Convex hull of s-t path indicator vectors over the edges of a DAG. Ids are
/// the edge indices in path order; ties resolve to the lexicographically
/// smallest such sequence.
class FlowPolytope final : public FeasibleSet {
public:
    explicit FlowPolytope(DagInstance dag);
    std::size_t dim() const noexcept override { return dag_.edge_count(); }
    SetKind kind() const noexcept override { return SetKind::flow_polytope; }
    NepStrategy nep_strategy() const noexcept override { return NepStrategy::zero_one; }
    VertexAtom lmo(const DensePoint& c) const override;
    double diameter() const override { return diameter_; }
    bool contains(const DensePoint& x, double tol = 1e-9) const override;
    bool is_vertex(const VertexAtom& atom) const override;
    std::optional<double> vertex_count() const override { return dag_.path_count(); }
    std::vector<VertexAtom> enumerate_vertices(std::size_t cap = kEnumerationCap) const override;
    double max_vertex_norm() const override;

    const DagInstance& dag() const noexcept { return dag_; }
    /// Atom for a path given as edge indices in order.
    VertexAtom path_vertex(const std::vector<int>& path_edges) const;

private:
    double compute_diameter() const;
    DagInstance dag_;
    double diameter_;
};

/// Pairwise maximum distance over a vertex list.
double max_pairwise_distance(const std::vector<VertexAtom>& atoms);

}  // namespace nepfw
