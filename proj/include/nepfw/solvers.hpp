#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nepfw/core.hpp"
#include "nepfw/correction.hpp"
#include "nepfw/feasible_sets.hpp"
#include "nepfw/objectives.hpp"

namespace nepfw {

enum class Variant { fw, nep_fw, fc, nep_fc_opt1, nep_fc_opt2, nep_sfw };
enum class StepRule { harmonic, line_search };
enum class RhoKind { zero, fixed_theorem3, two_phase_theorem4, adaptive_theorem5, geometric, grid_search };

std::string to_string(Variant v);
Variant parse_variant(const std::string& name);
RhoKind parse_rho_kind(const std::string& name);

struct RhoSchedule {
    RhoKind kind = RhoKind::zero;
    /// geometric: rho_t = q^(t+1)
    double q = 0.7071067811865476;
    /// grid_search: candidates rho_{t-1} * base^e
    double base = 2.0;
    std::vector<double> exponents;
    /// adaptive / grid: rho_0
    double initial = 0.5;
};

struct SolverConfig {
    Variant variant = Variant::nep_fw;
    StepRule step_rule = StepRule::harmonic;
    /// nep_fw only: use eta_t directly instead of the line-search guard.
    bool skip_line_search = false;
    RhoSchedule rho;
    RateConstants rate_constants;
    int max_iters = 100;
    double stop_gap = 0.0;
    std::uint64_t seed = 0;
    FistaOptions fista;
    /// Starting vertex; defaults to lmo(0).
    std::optional<VertexAtom> start;
    /// Known f*, used only to fill the gap column.
    std::optional<double> f_star;
    /// Keep every iterate in the result (tests).
    bool keep_iterates = false;
    /// Stop early (flagging the run) once this instant passes.
    std::optional<std::chrono::steady_clock::time_point> deadline;

    // Stochastic variant
    /// D* surrogate for the batch schedule; defaults to the set diameter.
    std::optional<double> d_star;
    /// Quadratic-growth parameter for the batch schedule.
    std::optional<double> alpha;
    /// Stop once this many row samples have been drawn (0 = unlimited).
    std::uint64_t sample_budget = 0;
    bool stratified = false;
    /// Use this batch size instead of the schedule (0 = schedule).
    std::uint64_t fixed_batch = 0;
};

/// Iterate x_t after t - 1 iterations. rho_t is the value applied at x_t by
/// schedule-driven variants and is empty on the final row.
struct RunRecord {
    int t = 1;
    double wall_ms = 0.0;
    double f_value = 0.0;
    std::optional<double> gap;
    double dual_gap = 0.0;
    std::optional<double> rho_t;
    std::uint64_t oracle_calls_cum = 0;
    std::uint64_t grad_samples_cum = 0;
    std::size_t atoms_in_decomp = 0;
    /// Mini-batch size applied at x_t (stochastic variant).
    std::uint64_t batch = 0;
};

struct RunResult {
    std::vector<RunRecord> records;
    std::vector<DensePoint> iterates;
    std::vector<std::string> notes;
    /// Sample budget reached.
    bool truncated = false;
    /// Wall-clock deadline reached.
    bool out_of_time = false;
    DensePoint final_x;
    ConvexDecomposition final_decomp;
};

/// max_v (x - v).grad f(x), computed with one (uncounted) lmo call.
double duality_gap(const QuadraticObjective& obj, const FeasibleSet& set, const DensePoint& x);

/// Candidate rho values for iteration t. Fixed schedules yield one value;
/// adaptive and grid schedules yield the trial grid around previous_rho.
/// Every value is clamped to [0, 1]. Notes about fallbacks are appended.
std::vector<double> rho_schedule_value(const RhoSchedule& schedule, int t, const RateConstants& rc,
                                       double previous_rho, std::size_t dim,
                                       std::vector<std::string>* notes = nullptr);

/// Mini-batch size m_t of the stochastic variant.
std::uint64_t sfw_batch_size(int t, double g_bound, double beta, double d_k, double d_star,
                             double alpha);

struct StepOutcome {
    DensePoint x;
    VertexAtom v;
    double eta = 0.0;
};

/// One NEP-FW iteration from x_t with eta_t.
StepOutcome nep_fw_step(const DensePoint& x, const DensePoint& grad, double f_x, double eta_t,
                        const QuadraticObjective& obj, const FeasibleSet& set, bool skip_line_search);

struct FcState {
    ConvexDecomposition decomp;
    /// Images aligned with decomp.atoms(): A v for Option 2, v for Option 1.
    HullGram hull;
    DensePoint x;
    double f_value = 0.0;
};

/// Initial NEP-FC state at a single vertex.
FcState make_fc_state(const VertexAtom& start, const QuadraticObjective& obj, int option);

struct FcStepOutcome {
    FcState state;
    FistaResult correction;
};

/// One NEP-FC iteration with a given rho (option 1 or 2).
FcStepOutcome nep_fc_step(const FcState& state, const DensePoint& grad, double rho,
                          const QuadraticObjective& obj, const FeasibleSet& set, int option,
                          const FistaOptions& fista);

RunResult fw_run(const QuadraticObjective& obj, const FeasibleSet& set, const SolverConfig& cfg);
RunResult nep_fw_run(const QuadraticObjective& obj, const FeasibleSet& set, const SolverConfig& cfg);
/// Variants fc, nep_fc_opt1 and nep_fc_opt2.
RunResult nep_fc_run(const QuadraticObjective& obj, const FeasibleSet& set, const SolverConfig& cfg);
RunResult nep_sfw_run(StochasticGradOracle& oracle, const FeasibleSet& set, const SolverConfig& cfg);

/// Dispatches on cfg.variant; the stochastic variant builds its own oracle
/// seeded from cfg.seed.
RunResult run_solver(const QuadraticObjective& obj, const FeasibleSet& set, const SolverConfig& cfg);

}  // namespace nepfw
