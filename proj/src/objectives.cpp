#include "nepfw/objectives.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "nepfw/kernels.hpp"

namespace nepfw {

namespace {

constexpr double kBetaSafety = 1.0 + 1e-8;

std::vector<double> gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> a(rows * cols);
    for (double& v : a) v = normal(rng);
    return a;
}

}  // namespace

double power_iteration_gram(std::size_t rows, std::size_t cols, std::span<const double> a,
                            int max_iters) {
    std::vector<double> v(cols), av(rows), w(cols);
    for (std::size_t i = 0; i < cols; ++i) v[i] = 1.0 + 0.5 * std::sin(static_cast<double>(i + 1));
    double n = std::sqrt(kernels::squared_norm(v));
    for (double& x : v) x /= n;
    for (int iter = 0; iter < max_iters; ++iter) {
        kernels::gemv(a, rows, cols, v, av);
        kernels::gemv_transposed(a, rows, cols, av, w);
        const double theta = kernels::dot(v, w);
        if (theta <= 0.0) return 0.0;
        // w - theta v
        std::vector<double> r = w;
        kernels::axpy(-theta, v, r);
        const double residual = std::sqrt(kernels::squared_norm(r));
        if (residual <= 1e-10 * theta) return theta;
        n = std::sqrt(kernels::squared_norm(w));
        for (std::size_t i = 0; i < cols; ++i) v[i] = w[i] / n;
    }
    throw NonConvergence("power iteration did not converge in " + std::to_string(max_iters) +
                         " iterations");
}

QuadraticObjective::QuadraticObjective(std::size_t rows, std::size_t cols, std::vector<double> a,
                                       std::vector<double> b)
    : rows_(rows), cols_(cols), a_(std::move(a)), b_(std::move(b)), beta_(0.0) {
    if (rows_ == 0 || cols_ == 0) throw InvalidArgument("quadratic: empty matrix");
    if (a_.size() != rows_ * cols_) throw DimensionMismatch(rows_ * cols_, a_.size());
    if (b_.size() != rows_) throw DimensionMismatch(rows_, b_.size());
    beta_ = power_iteration_gram(rows_, cols_, a_) * kBetaSafety;
}

QuadraticObjective QuadraticObjective::distance_to(const DensePoint& center) {
    const std::size_t d = center.size();
    std::vector<double> a(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) a[i * d + i] = 1.0;
    return QuadraticObjective(d, d, std::move(a), center.coords());
}

std::span<const double> QuadraticObjective::row(std::size_t i) const {
    return std::span<const double>(a_).subspan(i * cols_, cols_);
}

DensePoint QuadraticObjective::apply(const DensePoint& x) const {
    if (x.size() != cols_) throw DimensionMismatch(cols_, x.size());
    DensePoint out(rows_);
    kernels::gemv(a_, rows_, cols_, x.span(), out.span());
    return out;
}

double QuadraticObjective::value(const DensePoint& x) const {
    DensePoint r = apply(x);
    kernels::axpy(-1.0, b_, r.span());
    return 0.5 * kernels::squared_norm(r.span());
}

DensePoint QuadraticObjective::grad(const DensePoint& x) const {
    DensePoint r = apply(x);
    kernels::axpy(-1.0, b_, r.span());
    DensePoint g(cols_);
    kernels::gemv_transposed(a_, rows_, cols_, r.span(), g.span());
    return g;
}

double QuadraticObjective::line_search(const DensePoint& x, const DensePoint& v) const {
    // f(x + eta (v - x)) = f(x) + eta <r, A(v-x)> + eta^2/2 ||A(v-x)||^2
    const DensePoint dir = apply(v - x);
    DensePoint r = apply(x);
    kernels::axpy(-1.0, b_, r.span());
    const double curvature = kernels::squared_norm(dir.span());
    const double slope = kernels::dot(r.span(), dir.span());
    if (curvature <= 0.0) return slope < 0.0 ? 1.0 : 0.0;
    return std::clamp(-slope / curvature, 0.0, 1.0);
}

double QuadraticObjective::min_curvature() const {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
        a_.data(), static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    const Eigen::MatrixXd gram = a.transpose() * a;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
    return std::max(0.0, solver.eigenvalues()(0));
}

// ---------------------------------------------------------------------------

StochasticGradOracle::StochasticGradOracle(const QuadraticObjective& obj, double bound,
                                           std::uint64_t seed, bool stratified)
    : obj_(&obj), bound_(bound), rng_(seed), stratified_(stratified) {}

DensePoint StochasticGradOracle::sample(const DensePoint& x, std::size_t batch) {
    if (batch == 0) throw InvalidArgument("stochastic gradient: batch must be >= 1");
    if (x.size() != obj_->dim()) throw DimensionMismatch(obj_->dim(), x.size());
    const std::size_t m = obj_->rows();
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    DensePoint g(obj_->dim());
    for (std::size_t s = 0; s < batch; ++s) {
        std::size_t i;
        if (stratified_) {
            i = cursor_;
            cursor_ = (cursor_ + 1) % m;
        } else {
            i = pick(rng_);
        }
        const auto a_i = obj_->row(i);
        const double residual = kernels::dot(a_i, x.span()) - obj_->b()[i];
        kernels::axpy(residual, a_i, g.span());
    }
    drawn_ += batch;
    const double scale = static_cast<double>(m) / static_cast<double>(batch);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] *= scale;
    return g;
}

double stochastic_bound(const QuadraticObjective& obj, double max_vertex_norm) {
    double best = 0.0;
    for (std::size_t i = 0; i < obj.rows(); ++i) {
        const double a_norm = std::sqrt(kernels::squared_norm(obj.row(i)));
        best = std::max(best, a_norm * (a_norm * max_vertex_norm + std::abs(obj.b()[i])));
    }
    return static_cast<double>(obj.rows()) * best;
}

// ---------------------------------------------------------------------------

namespace {

ProblemDiagnostics point_optimum_diagnostics(const QuadraticObjective& obj, const DensePoint& x_star,
                                             double d_k) {
    ProblemDiagnostics diag;
    diag.d_k = d_k;
    diag.f_star = 0.0;
    diag.x_star = x_star;
    diag.dist_to_opt = [x_star](const DensePoint& x) { return std::sqrt(squared_distance(x, x_star)); };
    if (obj.rows() >= obj.dim()) {
        const double alpha = obj.min_curvature();
        if (alpha > 0.0) diag.alpha = alpha;
    }
    return diag;
}

}  // namespace

Instance make_hypercube_instance(std::size_t m, std::size_t d, std::size_t face_dim,
                                 std::uint64_t seed) {
    if (face_dim >= d) throw InvalidArgument("hypercube instance: face_dim must be < d");
    std::mt19937_64 rng(seed);
    std::vector<double> a = gaussian_matrix(m, d, rng);
    std::bernoulli_distribution coin(0.5);
    DensePoint corner(d);
    for (std::size_t i = 0; i < d; ++i) corner[i] = coin(rng) ? 1.0 : 0.0;

    DensePoint low = corner, high = corner, x_star = corner;
    for (std::size_t i = 0; i < face_dim; ++i) {
        low[i] = 0.0;
        high[i] = 1.0;
        x_star[i] = 0.5;
    }
    DensePoint b(m);
    kernels::gemv(a, m, d, x_star.span(), b.span());
    QuadraticObjective obj(m, d, std::move(a), b.coords());

    const Hypercube cube(d);
    Instance inst{std::move(obj), {}, {}};
    inst.diagnostics = point_optimum_diagnostics(inst.objective, x_star, cube.diameter());
    const double face = std::sqrt(static_cast<double>(face_dim));
    inst.diagnostics.d_star = face;
    inst.diagnostics.d_f_star = face;
    inst.diagnostics.dim_f_star = static_cast<int>(face_dim);
    inst.support.push_back(cube.make_vertex(low));
    if (face_dim > 0) inst.support.push_back(cube.make_vertex(high));
    return inst;
}

namespace {

// Distinct s-t paths drawn by random walks restricted to edges that can still
// reach the sink.
std::vector<VertexAtom> sample_paths(const FlowPolytope& set, std::size_t count, std::mt19937_64& rng) {
    const DagInstance& dag = set.dag();
    const auto n = static_cast<std::size_t>(dag.node_count());
    std::vector<bool> reaches(n, false);
    reaches[static_cast<std::size_t>(dag.sink())] = true;
    const auto& order = dag.topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        for (int e : dag.out_edges()[static_cast<std::size_t>(*it)]) {
            if (reaches[static_cast<std::size_t>(dag.edges()[static_cast<std::size_t>(e)].to)]) {
                reaches[static_cast<std::size_t>(*it)] = true;
            }
        }
    }
    const double available = dag.path_count();
    const std::size_t k = available < static_cast<double>(count) ? static_cast<std::size_t>(available) : count;
    std::vector<VertexAtom> found;
    for (int attempt = 0; found.size() < k && attempt < 100000; ++attempt) {
        std::vector<int> path;
        for (int node = dag.source(); node != dag.sink();) {
            std::vector<int> options;
            for (int e : dag.out_edges()[static_cast<std::size_t>(node)]) {
                if (reaches[static_cast<std::size_t>(dag.edges()[static_cast<std::size_t>(e)].to)]) options.push_back(e);
            }
            std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
            const int e = options[pick(rng)];
            path.push_back(e);
            node = dag.edges()[static_cast<std::size_t>(e)].to;
        }
        VertexAtom v = set.path_vertex(path);
        const bool fresh = std::none_of(found.begin(), found.end(), [&](const VertexAtom& u) { return u.id == v.id; });
        if (fresh) found.push_back(std::move(v));
    }
    return found;
}

}  // namespace

Instance make_flow_instance(const FlowPolytope& set, std::uint64_t seed, std::size_t paths,
                            std::size_t rows) {
    if (paths == 0) throw InvalidArgument("flow instance: need at least one path");
    std::mt19937_64 rng(seed);
    std::vector<VertexAtom> support = sample_paths(set, paths, rng);
    const std::size_t k = support.size();
    std::sort(support.begin(), support.end(),
              [](const VertexAtom& x, const VertexAtom& y) { return x.id < y.id; });

    std::exponential_distribution<double> expo(1.0);
    std::vector<double> weights(k);
    for (double& w : weights) w = expo(rng) + 0.1;
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (double& w : weights) w /= total;
    const DensePoint x_star = materialize(ConvexDecomposition(support, weights));

    const std::size_t d = set.dim();
    const std::size_t m = rows == 0 ? d : rows;
    std::vector<double> a = gaussian_matrix(m, d, rng);
    DensePoint b(m);
    kernels::gemv(a, m, d, x_star.span(), b.span());
    QuadraticObjective obj(m, d, std::move(a), b.coords());

    Instance inst{std::move(obj), {}, {}};
    inst.diagnostics = point_optimum_diagnostics(inst.objective, x_star, set.diameter());
    inst.diagnostics.d_star = max_pairwise_distance(support);

    // Smallest face holding x*: paths using only edges in the support of x*.
    std::vector<bool> used(d, false);
    for (std::size_t e = 0; e < d; ++e) used[e] = x_star[e] > 0.0;
    // Distances between paths inside the support subgraph equal their
    // distances in the full edge space.
    std::vector<Edge> kept;
    for (std::size_t e = 0; e < d; ++e) {
        if (used[e]) kept.push_back(set.dag().edges()[e]);
    }
    const FlowPolytope face(DagInstance(set.dag().node_count(), set.dag().source(), set.dag().sink(), kept));
    inst.diagnostics.d_f_star = face.diameter();
    std::vector<bool> touched(static_cast<std::size_t>(set.dag().node_count()), false);
    int edge_count = 0;
    for (std::size_t e = 0; e < d; ++e) {
        if (!used[e]) continue;
        ++edge_count;
        touched[static_cast<std::size_t>(set.dag().edges()[e].from)] = true;
        touched[static_cast<std::size_t>(set.dag().edges()[e].to)] = true;
    }
    const int node_count = static_cast<int>(std::count(touched.begin(), touched.end(), true));
    // A flow face on a connected support subgraph has dimension |E| - |V| + 1.
    inst.diagnostics.dim_f_star = edge_count - node_count + 1;
    inst.support = std::move(support);
    return inst;
}

// ---------------------------------------------------------------------------

namespace {

void write_csv_rows(const std::string& path, std::span<const double> values, std::size_t cols) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    char buf[32];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", values[i]);
        out << buf << ((i + 1) % cols == 0 ? '\n' : ',');
    }
    if (!out) throw Error("write failed for " + path);
}

std::vector<double> read_csv_values(const std::string& path, std::size_t& rows) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::vector<double> values;
    std::string line;
    rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++rows;
        std::stringstream fields(line);
        std::string cell;
        while (std::getline(fields, cell, ',')) {
            try {
                values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError(rows, path + ": bad number '" + cell + "'");
            }
        }
    }
    return values;
}

}  // namespace

void write_instance(const std::string& prefix, const Instance& instance, const std::string& kind,
                    std::uint64_t seed) {
    const auto& obj = instance.objective;
    write_csv_rows(prefix + ".A.csv", obj.a(), obj.dim());
    write_csv_rows(prefix + ".b.csv", obj.b(), 1);

    const auto& diag = instance.diagnostics;
    nlohmann::json meta;
    meta["kind"] = kind;
    meta["seed"] = seed;
    meta["rows"] = obj.rows();
    meta["dim"] = obj.dim();
    meta["beta"] = obj.smoothness_beta();
    meta["d_k"] = diag.d_k;
    if (diag.d_star) meta["d_star"] = *diag.d_star;
    if (diag.d_f_star) meta["d_f_star"] = *diag.d_f_star;
    if (diag.f_star) meta["f_star"] = *diag.f_star;
    if (diag.dim_f_star) meta["dim_f_star"] = *diag.dim_f_star;
    if (diag.alpha) meta["alpha"] = *diag.alpha;
    if (diag.x_star) meta["x_star"] = diag.x_star->coords();
    std::ofstream out(prefix + ".json");
    if (!out) throw Error("cannot write " + prefix + ".json");
    out << meta.dump(2) << '\n';
}

QuadraticObjective read_objective(const std::string& prefix) {
    std::ifstream meta_in(prefix + ".json");
    if (!meta_in) throw Error("cannot open " + prefix + ".json");
    const auto meta = nlohmann::json::parse(meta_in);
    const auto rows = meta.at("rows").get<std::size_t>();
    const auto dim = meta.at("dim").get<std::size_t>();
    std::size_t a_rows = 0, b_rows = 0;
    auto a = read_csv_values(prefix + ".A.csv", a_rows);
    auto b = read_csv_values(prefix + ".b.csv", b_rows);
    if (a_rows != rows || a.size() != rows * dim) throw DimensionMismatch(rows * dim, a.size());
    return QuadraticObjective(rows, dim, std::move(a), std::move(b));
}

}  // namespace nepfw
