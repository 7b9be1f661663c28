#include "nepfw/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "nepfw/feasible_sets.hpp"
#include "nepfw/objectives.hpp"
#include "nepfw/solvers.hpp"

namespace nepfw {

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(b)); }

DensePoint gaussian(std::size_t d, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> n(0.0, scale);
    DensePoint p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = n(rng);
    return p;
}

struct NamedSet {
    std::string name;
    std::unique_ptr<FeasibleSet> set;
};

std::vector<NamedSet> small_sets(std::mt19937_64& rng) {
    std::vector<NamedSet> sets;
    sets.push_back({"hypercube(8)", std::make_unique<Hypercube>(8)});
    sets.push_back({"simplex(12)", std::make_unique<UnitSimplex>(12)});
    sets.push_back({"l1(6)", std::make_unique<L1Ball>(6, 1.5)});
    sets.push_back({"linf(6)", std::make_unique<LinfBall>(6, 0.75)});
    std::vector<DensePoint> pts;
    for (int i = 0; i < 40; ++i) pts.push_back(gaussian(5, rng));
    sets.push_back({"hull(40x5)", std::make_unique<ExplicitHull>(pts)});
    sets.push_back({"flow(diamond)", std::make_unique<FlowPolytope>(DagInstance::diamond())});
    sets.push_back({"flow(layered)", std::make_unique<FlowPolytope>(DagInstance::layered(3, 3, 0.6, rng()))});
    return sets;
}

CheckResult oracle_brute_force(std::mt19937_64& rng) {
    CheckResult r{"oracle brute force", 0, 0, ""};
    for (auto& [name, set] : small_sets(rng)) {
        const auto vertices = set->enumerate_vertices();
        for (int q = 0; q < 100; ++q) {
            const DensePoint c = gaussian(set->dim(), rng);
            const DensePoint y = gaussian(set->dim(), rng, 0.8);
            double best_lin = std::numeric_limits<double>::infinity();
            double best_dist = std::numeric_limits<double>::infinity();
            for (const auto& v : vertices) {
                best_lin = std::min(best_lin, dot(v.point, c));
                best_dist = std::min(best_dist, squared_distance(v.point, y));
            }
            r.cases += 2;
            if (!close(dot(set->lmo(c).point, c), best_lin, 1e-12)) {
                ++r.failures;
                r.detail = name + ": lmo differs from enumeration";
            }
            if (!close(squared_distance(set->nep(y).point, y), best_dist, 1e-12)) {
                ++r.failures;
                r.detail = name + ": nep differs from enumeration";
            }
        }
    }
    return r;
}

CheckResult reduction_identities(std::mt19937_64& rng) {
    CheckResult r{"reduction identities", 0, 0, ""};
    for (auto& [name, set] : small_sets(rng)) {
        const NepStrategy s = set->nep_strategy();
        if (s == NepStrategy::full_scan) continue;
        for (int q = 0; q < 100; ++q) {
            const DensePoint y = gaussian(set->dim(), rng);
            DensePoint c(set->dim());
            for (std::size_t i = 0; i < c.size(); ++i) c[i] = (s == NepStrategy::zero_one ? 1.0 : 0.0) - 2.0 * y[i];
            ++r.cases;
            const double via_lmo = squared_distance(set->lmo(c).point, y);
            const double via_nep = squared_distance(set->nep(y).point, y);
            if (!close(via_nep, via_lmo, 1e-14)) {
                ++r.failures;
                r.detail = name + ": nep and shifted lmo disagree";
            }
        }
    }
    return r;
}

CheckResult scalar_recursion(std::mt19937_64& rng) {
    CheckResult r{"scalar recursion", 0, 0, ""};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s < 1000; ++s) {
        const double big_m = 0.1 + 10.0 * u(rng);
        double a = big_m * u(rng), sum_b = 0.0;
        for (int t = 1; t < 200; ++t) {
            const double b = big_m * u(rng);
            const double tt = t;
            const double cap = (1.0 - 2.0 / (tt + 1.0)) * a + b / ((tt + 1.0) * (tt + 1.0));
            a = u(rng) < 0.5 ? cap : cap * u(rng);
            sum_b += b;
            const double next = tt + 1.0;
            ++r.cases;
            if (a > sum_b / (next * next) * (1.0 + 1e-12) || a > big_m / (next + 1.0) * (1.0 + 1e-12)) {
                ++r.failures;
                r.detail = "bound violated at t=" + std::to_string(t + 1);
            }
        }
    }
    return r;
}

struct DescentStats {
    CheckResult lemma{"descent inequality", 0, 0, ""};
    CheckResult sublinear{"sublinear envelope", 0, 0, ""};
};

DescentStats descent_runs(std::uint64_t seed, int runs) {
    DescentStats s;
    for (int k = 0; k < runs; ++k) {
        const std::size_t d = 20 + static_cast<std::size_t>(k % 3) * 10;
        const Instance inst = make_hypercube_instance(d + 10, d, 3, seed + static_cast<std::uint64_t>(k));
        const Hypercube cube(d);
        SolverConfig cfg;
        cfg.variant = Variant::nep_fw;
        cfg.max_iters = 150;
        cfg.keep_iterates = true;
        cfg.f_star = inst.diagnostics.f_star;
        const RunResult run = nep_fw_run(inst.objective, cube, cfg);
        const double beta = inst.objective.smoothness_beta();
        const double f_star = *inst.diagnostics.f_star;
        const double d_star = *inst.diagnostics.d_star, d_k = inst.diagnostics.d_k;
        for (std::size_t i = 0; i + 1 < run.iterates.size(); ++i) {
            const double t = static_cast<double>(i) + 1.0;
            const double eta = 2.0 / (t + 1.0);
            const double h = inst.objective.value(run.iterates[i]) - f_star;
            const double h_next = inst.objective.value(run.iterates[i + 1]) - f_star;
            const double dist = inst.diagnostics.dist_to_opt(run.iterates[i]);
            const double rhs = (1.0 - eta) * h + beta * eta * eta / 2.0 * (dist * dist + d_star * d_star);
            ++s.lemma.cases;
            if (h_next > rhs + 1e-9) {
                ++s.lemma.failures;
                s.lemma.detail = "violated at t=" + std::to_string(i + 1);
            }
        }
        for (std::size_t i = 1; i < run.iterates.size(); ++i) {
            const double t = static_cast<double>(i) + 1.0;
            const double h = inst.objective.value(run.iterates[i]) - f_star;
            ++s.sublinear.cases;
            if (h > 2.0 * beta * (d_star * d_star + d_k * d_k) / (t + 1.0) + 1e-9) {
                ++s.sublinear.failures;
                s.sublinear.detail = "violated at t=" + std::to_string(i + 1);
            }
        }
    }
    return s;
}

CheckResult linear_envelope(std::uint64_t seed) {
    CheckResult r{"linear envelope", 0, 0, ""};
    const std::size_t d = 8;
    const Instance inst = make_hypercube_instance(16, d, 2, seed);
    const Hypercube cube(d);
    SolverConfig cfg;
    cfg.variant = Variant::nep_fc_opt1;
    cfg.max_iters = 100;
    cfg.f_star = inst.diagnostics.f_star;
    cfg.rho.kind = RhoKind::fixed_theorem3;
    cfg.fista.mode = StopMode::tolerance;
    cfg.fista.max_iters = 5000;
    cfg.fista.tolerance = 1e-12;
    const double f_star = *inst.diagnostics.f_star;
    const double c = inst.objective.value(cube.lmo(DensePoint(d)).point) - f_star;
    cfg.rate_constants = derive_linear_rate_constants(inst.objective.smoothness_beta(), *inst.diagnostics.alpha, d,
                                                      1.0, *inst.diagnostics.d_f_star, c);
    const double big_m = *cfg.rate_constants.big_m;
    for (const auto& rec : run_solver(inst.objective, cube, cfg).records) {
        ++r.cases;
        if (*rec.gap > c * std::exp(-(rec.t - 1.0) / (4.0 * big_m)) + 1e-12) {
            ++r.failures;
            r.detail = "violated at t=" + std::to_string(rec.t);
        }
    }
    return r;
}

CheckResult stochastic_envelope(std::uint64_t seed, int replications) {
    CheckResult r{"stochastic mean gap", 0, 0, ""};
    const std::size_t d = 10;
    const Hypercube cube(d);
    const std::vector<int> checkpoints{16, 32, 64};
    std::vector<double> mean(checkpoints.size(), 0.0), envelope(checkpoints.size(), 0.0);
    for (int rep = 0; rep < replications; ++rep) {
        const Instance inst = make_hypercube_instance(20, d, 2, seed + static_cast<std::uint64_t>(rep));
        SolverConfig cfg;
        cfg.variant = Variant::nep_sfw;
        cfg.max_iters = checkpoints.back();
        cfg.f_star = inst.diagnostics.f_star;
        cfg.d_star = inst.diagnostics.d_star;
        cfg.alpha = inst.diagnostics.alpha;
        cfg.seed = seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(rep + 1));
        const RunResult run = run_solver(inst.objective, cube, cfg);
        const double beta = inst.objective.smoothness_beta(), alpha = *inst.diagnostics.alpha;
        const double ds = *inst.diagnostics.d_star, dk = inst.diagnostics.d_k;
        for (std::size_t j = 0; j < checkpoints.size(); ++j) {
            const double t = checkpoints[j];
            mean[j] += *run.records.at(static_cast<std::size_t>(checkpoints[j]) - 1).gap / replications;
            envelope[j] += (4.0 * beta * ds * ds / (t + 1.0) + 32.0 * beta * beta / alpha * dk * dk * std::log(t) / (t * t)) /
                           replications;
        }
    }
    for (std::size_t j = 0; j < checkpoints.size(); ++j) {
        ++r.cases;
        if (mean[j] > 2.0 * envelope[j]) {
            ++r.failures;
            r.detail = "mean gap above twice the envelope at t=" + std::to_string(checkpoints[j]);
        }
    }
    return r;
}

}  // namespace

std::vector<CheckResult> verify_suite(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<CheckResult> out;
    out.push_back(oracle_brute_force(rng));
    out.push_back(reduction_identities(rng));
    out.push_back(scalar_recursion(rng));
    out.push_back(descent_runs(seed, 5).lemma);
    return out;
}

std::vector<CheckResult> envelope_suite(std::uint64_t seed, int replications) {
    std::vector<CheckResult> out;
    out.push_back(descent_runs(seed, 5).sublinear);
    out.push_back(linear_envelope(seed));
    out.push_back(stochastic_envelope(seed, replications));
    return out;
}

}  // namespace nepfw
