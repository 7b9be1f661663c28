#include "nepfw/correction.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "nepfw/kernels.hpp"
#include "nepfw/objectives.hpp"

namespace nepfw {

std::vector<double> simplex_project(std::span<const double> w) {
    const std::size_t n = w.size();
    if (n == 0) return {};
    std::vector<double> u(w.begin(), w.end());
    std::sort(u.begin(), u.end(), std::greater<>{});
    double cumulative = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        cumulative += u[j];
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (u[j] - candidate > 0.0) theta = candidate;
    }
    std::vector<double> out(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::max(w[i] - theta, 0.0);
        sum += out[i];
    }
    if (sum > 0.0) {
        for (double& v : out) v /= sum;
    } else {
        // Only reachable with non-finite input.
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(n));
    }
    return out;
}

double SimplexQP::value(std::span<const double> w) const {
    double quad = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        quad += w[i] * kernels::dot(std::span<const double>(q_matrix).subspan(i * n, n), w);
    }
    return 0.5 * quad + kernels::dot(linear, w) + constant;
}

std::vector<double> SimplexQP::gradient(std::span<const double> w) const {
    std::vector<double> g = linear;
    for (std::size_t i = 0; i < n; ++i) {
        g[i] += kernels::dot(std::span<const double>(q_matrix).subspan(i * n, n), w);
    }
    return g;
}

double SimplexQP::largest_eigenvalue() const {
    if (n == 0) return 0.0;
    Eigen::Map<const Eigen::MatrixXd> q(q_matrix.data(), static_cast<Eigen::Index>(n),
                                        static_cast<Eigen::Index>(n));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q, Eigen::EigenvaluesOnly);
    return std::max(0.0, solver.eigenvalues()(static_cast<Eigen::Index>(n) - 1));
}

namespace {

double gradient_mapping_norm(const SimplexQP& qp, std::span<const double> w, double lipschitz) {
    const auto g = qp.gradient(w);
    std::vector<double> step(w.begin(), w.end());
    for (std::size_t i = 0; i < step.size(); ++i) step[i] -= g[i] / lipschitz;
    const auto projected = simplex_project(step);
    double s = 0.0;
    for (std::size_t i = 0; i < projected.size(); ++i) s += (w[i] - projected[i]) * (w[i] - projected[i]);
    return lipschitz * std::sqrt(s);
}

}  // namespace

FistaResult fista_simplex(const SimplexQP& qp, std::span<const double> warm, const FistaOptions& opts) {
    if (warm.size() != qp.n) throw DimensionMismatch(qp.n, warm.size());
    if (qp.n == 0) throw InvalidArgument("fista: empty problem");
    double lipschitz = opts.lipschitz > 0.0 ? opts.lipschitz : qp.largest_eigenvalue();
    if (!(lipschitz > 0.0)) lipschitz = 1.0;

    FistaResult result;
    std::vector<double> x = simplex_project(warm);
    double x_value = qp.value(x);
    result.weights = x;
    result.value = x_value;
    const double warm_value = x_value;

    const bool tolerance_mode = opts.mode == StopMode::tolerance;
    std::vector<double> y = x, step(qp.n);
    double t = 1.0;
    int iter = 0;
    for (; iter < opts.max_iters; ++iter) {
        const auto g = qp.gradient(y);
        for (std::size_t i = 0; i < qp.n; ++i) step[i] = y[i] - g[i] / lipschitz;
        std::vector<double> x_next = simplex_project(step);
        const double next_value = qp.value(x_next);
        double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t * t)) / 2.0;
        if (tolerance_mode && next_value > x_value && t > 1.0) {
            // Momentum overshot: restart from the current point. Without
            // momentum the plain projected step is taken even if rounding
            // makes it look uphill, otherwise the loop stalls.
            t = 1.0;
            y = x;
            continue;
        }
        const double momentum = (t - 1.0) / t_next;
        for (std::size_t i = 0; i < qp.n; ++i) y[i] = x_next[i] + momentum * (x_next[i] - x[i]);
        x = std::move(x_next);
        x_value = next_value;
        t = t_next;
        if (x_value < result.value) {
            result.value = x_value;
            result.weights = x;
        }
        if (tolerance_mode && gradient_mapping_norm(qp, x, lipschitz) <= opts.tolerance) {
            // Near the optimum values only differ by rounding, so prefer the
            // certified point over the lowest-valued one.
            if (x_value <= warm_value) {
                result.value = x_value;
                result.weights = x;
            }
            ++iter;
            break;
        }
    }
    result.iterations = iter;
    result.residual = gradient_mapping_norm(qp, result.weights, lipschitz);
    result.converged = !tolerance_mode || result.residual <= opts.tolerance;
    return result;
}

// ---------------------------------------------------------------------------

HullGram HullGram::extended(const AtomId& id, DensePoint image) const {
    const std::size_t k = size();
    if (k > 0 && image.size() != images_.front().size()) {
        throw DimensionMismatch(images_.front().size(), image.size());
    }
    HullGram out;
    out.ids_ = ids_;
    out.images_ = images_;
    out.gram_.assign((k + 1) * (k + 1), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        std::copy_n(gram_.begin() + static_cast<std::ptrdiff_t>(i * k), k,
                    out.gram_.begin() + static_cast<std::ptrdiff_t>(i * (k + 1)));
    }
    for (std::size_t i = 0; i < k; ++i) {
        const double g = dot(images_[i], image);
        out.gram_[i * (k + 1) + k] = g;
        out.gram_[k * (k + 1) + i] = g;
    }
    out.gram_[k * (k + 1) + k] = dot(image, image);
    out.ids_.push_back(id);
    out.images_.push_back(std::move(image));
    return out;
}

HullGram HullGram::restricted(const std::vector<AtomId>& keep) const {
    std::map<AtomId, std::size_t> index;
    for (std::size_t i = 0; i < ids_.size(); ++i) index.emplace(ids_[i], i);
    std::vector<std::size_t> pos;
    pos.reserve(keep.size());
    for (const auto& id : keep) {
        auto it = index.find(id);
        if (it == index.end()) throw InvalidArgument("hull gram: unknown atom id");
        pos.push_back(it->second);
    }
    const std::size_t k = size(), n = keep.size();
    HullGram out;
    out.ids_ = keep;
    out.gram_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        out.images_.push_back(images_[pos[i]]);
        for (std::size_t j = 0; j < n; ++j) out.gram_[i * n + j] = gram_[pos[i] * k + pos[j]];
    }
    return out;
}

SimplexQP option1_qp(const HullGram& hull, const DensePoint& grad, const DensePoint& x_t, double beta) {
    const std::size_t n = hull.size();
    SimplexQP qp;
    qp.n = n;
    qp.q_matrix.resize(n * n);
    qp.linear.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) qp.q_matrix[i * n + j] = beta * hull.gram(i, j);
        qp.linear[i] = dot(hull.images()[i], grad) - beta * dot(hull.images()[i], x_t);
    }
    qp.constant = 0.5 * beta * dot(x_t, x_t);
    return qp;
}

SimplexQP option2_qp(const HullGram& hull, std::span<const double> b) {
    const std::size_t n = hull.size();
    SimplexQP qp;
    qp.n = n;
    qp.q_matrix.resize(n * n);
    qp.linear.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) qp.q_matrix[i * n + j] = hull.gram(i, j);
        qp.linear[i] = -kernels::dot(hull.images()[i].span(), b);
    }
    qp.constant = 0.5 * kernels::squared_norm(b);
    return qp;
}

FistaResult solve_option1(const SimplexQP& qp, std::span<const double> warm, const FistaOptions& opts) {
    return fista_simplex(qp, warm, opts);
}

FistaResult solve_option2(const SimplexQP& qp, std::span<const double> warm, const FistaOptions& opts) {
    return fista_simplex(qp, warm, opts);
}

FistaResult solve_option2(const std::vector<VertexAtom>& atoms, const QuadraticObjective& obj,
                          std::span<const double> warm, const FistaOptions& opts) {
    HullGram hull;
    for (const auto& atom : atoms) hull = hull.extended(atom.id, obj.apply(atom.point));
    return fista_simplex(option2_qp(hull, obj.b()), warm, opts);
}

// ---------------------------------------------------------------------------

double distance_to_hull(const std::vector<DensePoint>& points, const DensePoint& x) {
    if (points.empty()) throw InvalidArgument("distance_to_hull: no points");
    const std::size_t n = points.size();
    std::vector<DensePoint> p;
    p.reserve(n);
    double max_norm2 = 0.0;
    for (const auto& v : points) {
        p.push_back(v - x);
        max_norm2 = std::max(max_norm2, dot(p.back(), p.back()));
    }
    constexpr double z1 = 1e-14, z2 = 1e-12;

    std::size_t first = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (dot(p[i], p[i]) < dot(p[first], p[first])) first = i;
    }
    std::vector<std::size_t> active{first};
    std::vector<double> w{1.0};
    DensePoint cur = p[first];

    auto combine = [&]() {
        DensePoint out(x.size());
        for (std::size_t i = 0; i < active.size(); ++i) kernels::axpy(w[i], p[active[i]].span(), out.span());
        return out;
    };

    for (std::size_t major = 0; major < 100 * n + 100; ++major) {
        std::size_t j = 0;
        double best = dot(cur, p[0]);
        for (std::size_t i = 1; i < n; ++i) {
            const double value = dot(cur, p[i]);
            if (value < best) {
                best = value;
                j = i;
            }
        }
        if (dot(cur, cur) - best <= z1 * std::max(max_norm2, 1.0)) break;
        if (std::find(active.begin(), active.end(), j) != active.end()) break;
        active.push_back(j);
        w.push_back(0.0);

        for (;;) {
            const auto k = static_cast<Eigen::Index>(active.size());
            Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(k + 1, k + 1);
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
            for (Eigen::Index a = 0; a < k; ++a) {
                for (Eigen::Index b = 0; b < k; ++b) {
                    kkt(a, b) = dot(p[active[static_cast<std::size_t>(a)]], p[active[static_cast<std::size_t>(b)]]);
                }
                kkt(a, k) = 1.0;
                kkt(k, a) = 1.0;
            }
            rhs(k) = 1.0;
            const Eigen::VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
            bool positive = true;
            for (Eigen::Index a = 0; a < k; ++a) positive = positive && sol(a) > z2;
            if (positive) {
                for (Eigen::Index a = 0; a < k; ++a) w[static_cast<std::size_t>(a)] = sol(a);
                break;
            }
            double theta = 1.0;
            std::size_t blocking = 0;
            for (Eigen::Index a = 0; a < k; ++a) {
                const auto ai = static_cast<std::size_t>(a);
                if (sol(a) <= z2 && w[ai] - sol(a) > 0.0) {
                    const double ratio = w[ai] / (w[ai] - sol(a));
                    if (ratio < theta) {
                        theta = ratio;
                        blocking = ai;
                    }
                }
            }
            for (Eigen::Index a = 0; a < k; ++a) {
                const auto ai = static_cast<std::size_t>(a);
                w[ai] = theta * sol(a) + (1.0 - theta) * w[ai];
            }
            w[blocking] = 0.0;
            std::vector<std::size_t> next_active;
            std::vector<double> next_w;
            for (std::size_t i = 0; i < active.size(); ++i) {
                if (w[i] > z2) {
                    next_active.push_back(active[i]);
                    next_w.push_back(w[i]);
                }
            }
            const double total = std::accumulate(next_w.begin(), next_w.end(), 0.0);
            for (double& v : next_w) v /= total;
            active = std::move(next_active);
            w = std::move(next_w);
            if (active.size() == 1) break;
        }
        cur = combine();
    }
    return norm(cur);
}

}  // namespace nepfw
