#include "nepfw/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace nepfw {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

VertexAtom start_vertex(const FeasibleSet& set, const SolverConfig& cfg) {
    if (cfg.start) {
        if (cfg.start->point.size() != set.dim()) throw DimensionMismatch(set.dim(), cfg.start->point.size());
        return *cfg.start;
    }
    return set.lmo(DensePoint(set.dim()));
}

double gap_from(const DensePoint& x, const VertexAtom& v, const DensePoint& grad) {
    return std::max(0.0, dot(x - v.point, grad));
}

/// Shared row bookkeeping for every variant.
class Recorder {
public:
    Recorder(const SolverConfig& cfg, RunResult& result)
        : cfg_(cfg), result_(result), start_(Clock::now()) {}

    RunRecord& push(int t, const DensePoint& x, double f, double dual_gap) {
        RunRecord r;
        r.t = t;
        r.wall_ms = elapsed_ms(start_);
        r.f_value = f;
        if (cfg_.f_star) r.gap = f - *cfg_.f_star;
        r.dual_gap = dual_gap;
        r.oracle_calls_cum = oracle_calls;
        r.grad_samples_cum = grad_samples;
        result_.records.push_back(r);
        if (cfg_.keep_iterates) result_.iterates.push_back(x);
        return result_.records.back();
    }

    bool done(int t, double dual_gap) {
        if (t > cfg_.max_iters || dual_gap <= cfg_.stop_gap) return true;
        if (cfg_.deadline && Clock::now() > *cfg_.deadline) {
            result_.out_of_time = true;
            result_.notes.push_back("wall-clock budget reached at t=" + std::to_string(t));
            return true;
        }
        return false;
    }

    std::uint64_t oracle_calls = 0;
    std::uint64_t grad_samples = 0;

private:
    const SolverConfig& cfg_;
    RunResult& result_;
    Clock::time_point start_;
};

}  // namespace

double duality_gap(const QuadraticObjective& obj, const FeasibleSet& set, const DensePoint& x) {
    const DensePoint g = obj.grad(x);
    return gap_from(x, set.lmo(g), g);
}

// ---------------------------------------------------------------------------
// Baseline FW

RunResult fw_run(const QuadraticObjective& obj, const FeasibleSet& set, const SolverConfig& cfg) {
    RunResult result;
    Recorder rec(cfg, result);
    DensePoint x = start_vertex(set, cfg).point;
    double f = obj.value(x);
    for (int t = 1;; ++t) {
        const DensePoint g = obj.grad(x);
        ++rec.grad_samples;
        const VertexAtom v = set.lmo(g);
        const double dual = gap_from(x, v, g);
        rec.push(t, x, f, dual).atoms_in_decomp = 0;
        if (rec.done(t, dual)) break;
        ++rec.oracle_calls;
        const double eta = cfg.step_rule == StepRule::harmonic ? 2.0 / (t + 1.0) : obj.line_search(x, v.point);
        x = convex_step(x, v.point, eta);
        f = obj.value(x);
    }
    result.final_x = x;
    return result;
}

// ---------------------------------------------------------------------------
// NEP Frank-Wolfe

StepOutcome nep_fw_step(const DensePoint& x, const DensePoint& grad, double f_x, double eta_t,
                        const QuadraticObjective& obj, const FeasibleSet& set, bool skip_line_search) {
    if (!(eta_t >= 0.0 && eta_t <= 1.0)) throw InvalidArgument("nep_fw_step: eta_t must lie in [0,1]");
    const double lambda = obj.smoothness_beta() * eta_t / 2.0;
    StepOutcome out{DensePoint{}, regularized_lmo(set, grad, x, lambda), eta_t};
    if (skip_line_search) {
        out.x = convex_step(x, out.v.point, eta_t);
        return out;
    }
    // The guard asks for f(x_{t+1}) <= min{f at eta_t, f(x_t)}. The exact
    // minimizer satisfies it; the comparison guards against rounding.
    const double exact = obj.line_search(x, out.v.point);
    DensePoint best = convex_step(x, out.v.point, exact);
    double best_value = obj.value(best);
    double best_eta = exact;
    DensePoint at_eta = convex_step(x, out.v.point, eta_t);
    if (const double value = obj.value(at_eta); value < best_value) {
        best = std::move(at_eta);
        best_value = value;
        best_eta = eta_t;
    }
    if (f_x < best_value) {
        best = x;
        best_eta = 0.0;
    }
    out.x = std::move(best);
    out.eta = best_eta;
    return out;
}

RunResult nep_fw_run(const QuadraticObjective& obj, const FeasibleSet& set, const SolverConfig& cfg) {
    RunResult result;
    Recorder rec(cfg, result);
    DensePoint x = start_vertex(set, cfg).point;
    double f = obj.value(x);
    const bool skip = cfg.skip_line_search && cfg.step_rule == StepRule::harmonic;
    for (int t = 1;; ++t) {
        const DensePoint g = obj.grad(x);
        ++rec.grad_samples;
        const double dual = gap_from(x, set.lmo(g), g);
        rec.push(t, x, f, dual);
        if (rec.done(t, dual)) break;
        StepOutcome step = nep_fw_step(x, g, f, 2.0 / (t + 1.0), obj, set, skip);
        ++rec.oracle_calls;
        x = std::move(step.x);
        f = obj.value(x);
    }
    result.final_x = x;
    return result;
}

// ---------------------------------------------------------------------------
// NEP fully corrective Frank-Wolfe

namespace {

DensePoint hull_image(const VertexAtom& v, const QuadraticObjective& obj, int option) {
    return option == 2 ? obj.apply(v.point) : v.point;
}

}  // namespace

FcState make_fc_state(const VertexAtom& start, const QuadraticObjective& obj, int option) {
    if (option != 1 && option != 2) throw InvalidArgument("correction option must be 1 or 2");
    FcState s;
    s.decomp = ConvexDecomposition::single(start);
    s.hull = HullGram{}.extended(start.id, hull_image(start, obj, option));
    s.x = start.point;
    s.f_value = obj.value(s.x);
    return s;
}

FcStepOutcome nep_fc_step(const FcState& state, const DensePoint& grad, double rho,
                          const QuadraticObjective& obj, const FeasibleSet& set, int option,
                          const FistaOptions& fista) {
    if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidArgument("nep_fc_step: rho must lie in [0,1]");
    if (option != 1 && option != 2) throw InvalidArgument("correction option must be 1 or 2");
    const double beta = obj.smoothness_beta();
    const VertexAtom v = regularized_lmo(set, grad, state.x, beta * rho);
    const HullGram hull = state.hull.extended(v.id, hull_image(v, obj, option));

    const SimplexQP qp =
        option == 2 ? option2_qp(hull, obj.b()) : option1_qp(hull, grad, state.x, beta);
    std::vector<double> warm = state.decomp.weights();
    warm.push_back(0.0);
    FcStepOutcome out;
    out.correction = option == 2 ? solve_option2(qp, warm, fista) : solve_option1(qp, warm, fista);

    FcState next;
    next.decomp = merge_atom(state.decomp, v, out.correction.weights);
    std::vector<AtomId> ids;
    for (const auto& atom : next.decomp.atoms()) ids.push_back(atom.id);
    next.hull = hull.restricted(ids);
    next.x = materialize(next.decomp);
    next.f_value = obj.value(next.x);
    if (option == 2 && next.f_value > state.f_value) {
        // Dropping tiny weights can cost a rounding-level increase; the
        // incumbent is feasible for the subproblem, so keep it.
        out.state = state;
        return out;
    }
    out.state = std::move(next);
    return out;
}

RunResult nep_fc_run(const QuadraticObjective& obj, const FeasibleSet& set, const SolverConfig& cfg) {
    int option = 0;
    switch (cfg.variant) {
    case Variant::fc:
        if (cfg.rho.kind != RhoKind::zero) throw InvalidArgument("variant fc requires rho schedule zero");
        option = 2;
        break;
    case Variant::nep_fc_opt1: option = 1; break;
    case Variant::nep_fc_opt2: option = 2; break;
    default: throw InvalidArgument("nep_fc_run: variant " + to_string(cfg.variant));
    }

    RunResult result;
    Recorder rec(cfg, result);
    FcState state = make_fc_state(start_vertex(set, cfg), obj, option);
    double previous_rho = cfg.rho.initial;
    double worst_residual = 0.0;
    int unconverged = 0;
    for (int t = 1;; ++t) {
        const DensePoint g = obj.grad(state.x);
        ++rec.grad_samples;
        const double dual = gap_from(state.x, set.lmo(g), g);
        RunRecord& row = rec.push(t, state.x, state.f_value, dual);
        row.atoms_in_decomp = state.decomp.size();
        if (rec.done(t, dual)) break;

        const auto candidates =
            rho_schedule_value(cfg.rho, t, cfg.rate_constants, previous_rho, set.dim(), &result.notes);
        std::optional<FcStepOutcome> best;
        double chosen = 0.0;
        for (double rho : candidates) {
            FcStepOutcome trial = nep_fc_step(state, g, rho, obj, set, option, cfg.fista);
            ++rec.oracle_calls;
            if (!trial.correction.converged) {
                ++unconverged;
                worst_residual = std::max(worst_residual, trial.correction.residual);
            }
            if (!best || trial.state.f_value < best->state.f_value) {
                best = std::move(trial);
                chosen = rho;
            }
        }
        result.records.back().rho_t = chosen;
        previous_rho = chosen;
        state = std::move(best->state);
    }
    if (unconverged > 0) {
        std::ostringstream os;
        os << "correction missed its tolerance in " << unconverged
           << " subproblems; worst gradient-mapping residual " << worst_residual;
        result.notes.push_back(os.str());
    }
    result.final_x = state.x;
    result.final_decomp = state.decomp;
    return result;
}

// ---------------------------------------------------------------------------
// NEP stochastic Frank-Wolfe

RunResult nep_sfw_run(StochasticGradOracle& oracle, const FeasibleSet& set, const SolverConfig& cfg) {
    const QuadraticObjective& obj = oracle.objective();
    RunResult result;
    Recorder rec(cfg, result);
    DensePoint x = start_vertex(set, cfg).point;
    const double beta = obj.smoothness_beta();
    const double d_k = set.diameter();
    const double d_star = cfg.d_star.value_or(d_k);
    const double alpha = cfg.alpha.value_or(0.0);
    for (int t = 1;; ++t) {
        const double dual = duality_gap(obj, set, x);
        RunRecord& row = rec.push(t, x, obj.value(x), dual);
        if (rec.done(t, dual)) break;
        const std::uint64_t batch =
            cfg.fixed_batch > 0 ? cfg.fixed_batch : sfw_batch_size(t, oracle.bound(), beta, d_k, d_star, alpha);
        if (cfg.sample_budget > 0 &&
            (batch > cfg.sample_budget || rec.grad_samples > cfg.sample_budget - batch)) {
            result.truncated = true;
            std::ostringstream os;
            os << "sample budget " << cfg.sample_budget << " reached at t=" << t << " (next batch " << batch
               << ")";
            result.notes.push_back(os.str());
            break;
        }
        row.batch = batch;
        const DensePoint g = oracle.sample(x, static_cast<std::size_t>(batch));
        rec.grad_samples += batch;
        const double eta = 2.0 / (t + 1.0);
        const VertexAtom v = regularized_lmo(set, g, x, beta * eta / 2.0);
        ++rec.oracle_calls;
        x = convex_step(x, v.point, eta);
    }
    result.final_x = x;
    return result;
}

RunResult run_solver(const QuadraticObjective& obj, const FeasibleSet& set, const SolverConfig& cfg) {
    if (obj.dim() != set.dim()) throw DimensionMismatch(set.dim(), obj.dim());
    switch (cfg.variant) {
    case Variant::fw: return fw_run(obj, set, cfg);
    case Variant::nep_fw: return nep_fw_run(obj, set, cfg);
    case Variant::fc:
    case Variant::nep_fc_opt1:
    case Variant::nep_fc_opt2: return nep_fc_run(obj, set, cfg);
    case Variant::nep_sfw: {
        StochasticGradOracle oracle(obj, stochastic_bound(obj, set.max_vertex_norm()), cfg.seed, cfg.stratified);
        return nep_sfw_run(oracle, set, cfg);
    }
    }
    throw InvalidArgument("run_solver: unknown variant");
}

}  // namespace nepfw
