#include <algorithm>
#include <cmath>
#include <limits>

#include "nepfw/solvers.hpp"

namespace nepfw {

std::string to_string(Variant v) {
    switch (v) {
    case Variant::fw: return "fw";
    case Variant::nep_fw: return "nep_fw";
    case Variant::fc: return "fc";
    case Variant::nep_fc_opt1: return "nep_fc_opt1";
    case Variant::nep_fc_opt2: return "nep_fc_opt2";
    case Variant::nep_sfw: return "nep_sfw";
    }
    return "unknown";
}

Variant parse_variant(const std::string& name) {
    for (Variant v : {Variant::fw, Variant::nep_fw, Variant::fc, Variant::nep_fc_opt1,
                      Variant::nep_fc_opt2, Variant::nep_sfw}) {
        if (to_string(v) == name) return v;
    }
    throw InvalidArgument("unknown solver variant '" + name + "'");
}

RhoKind parse_rho_kind(const std::string& name) {
    if (name == "zero") return RhoKind::zero;
    if (name == "fixed_theorem3") return RhoKind::fixed_theorem3;
    if (name == "two_phase_theorem4") return RhoKind::two_phase_theorem4;
    if (name == "adaptive_theorem5") return RhoKind::adaptive_theorem5;
    if (name == "geometric") return RhoKind::geometric;
    if (name == "grid_search") return RhoKind::grid_search;
    throw InvalidArgument("unknown rho schedule '" + name + "'");
}

namespace {

double require(const std::optional<double>& value, const char* name, const char* schedule) {
    if (!value) {
        throw InvalidArgument(std::string(schedule) + " schedule needs rate constant " + name);
    }
    return *value;
}

double clamp01(double rho) { return std::clamp(rho, 0.0, 1.0); }

}  // namespace

std::vector<double> rho_schedule_value(const RhoSchedule& schedule, int t, const RateConstants& rc,
                                       double previous_rho, std::size_t dim,
                                       std::vector<std::string>* notes) {
    if (t < 1) throw InvalidArgument("rho schedule: t must be >= 1");
    const double step = static_cast<double>(t - 1);
    switch (schedule.kind) {
    case RhoKind::zero: return {0.0};
    case RhoKind::fixed_theorem3: {
        const char* name = "fixed_theorem3";
        const double c = require(rc.big_c, "C", name);
        const double alpha = require(rc.alpha, "alpha", name);
        const double m = require(rc.big_m, "M", name);
        const double r = std::sqrt(2.0 * c * static_cast<double>(dim) * rc.mu * rc.mu / alpha *
                                   std::exp(-step / (4.0 * m)));
        return {clamp01(std::min(r, 1.0) / (2.0 * m))};
    }
    case RhoKind::two_phase_theorem4: {
        const char* name = "two_phase_theorem4";
        const double c = require(rc.big_c, "C", name);
        const double delta = require(rc.delta, "delta", name);
        const double kappa = require(rc.kappa, "kappa", name);
        const double m1 = require(rc.m1, "M1", name);
        if (rc.tau && static_cast<double>(t) >= *rc.tau) {
            const double m2 = require(rc.m2, "M2", name);
            const double r = 2.0 * delta * kappa * std::exp(-(t - *rc.tau) / (8.0 * m2));
            return {clamp01(std::min(r, 1.0) / (2.0 * m2))};
        }
        if (!rc.tau && t == 1 && notes) {
            notes->push_back("two_phase_theorem4: phase switch needs kappa > 0 and 2 kappa <= 1/delta; "
                             "using phase 1 throughout");
        }
        const double r = std::sqrt(2.0 * std::max(2.0 * kappa, 1.0 / delta) * c *
                                   std::exp(-step / (4.0 * m1)));
        return {clamp01(std::min(r, 1.0) / (2.0 * m1))};
    }
    case RhoKind::adaptive_theorem5: {
        std::vector<double> out;
        for (int a = -4; a <= 4; ++a) out.push_back(clamp01(previous_rho * std::exp2(a / 4.0)));
        return out;
    }
    case RhoKind::geometric: return {clamp01(std::pow(schedule.q, t + 1))};
    case RhoKind::grid_search: {
        if (schedule.exponents.empty()) throw InvalidArgument("grid_search schedule needs exponents");
        std::vector<double> out;
        for (double e : schedule.exponents) out.push_back(clamp01(previous_rho * std::pow(schedule.base, e)));
        return out;
    }
    }
    throw InvalidArgument("rho schedule: unknown kind");
}

std::uint64_t sfw_batch_size(int t, double g_bound, double beta, double d_k, double d_star,
                             double alpha) {
    const double inf = std::numeric_limits<double>::infinity();
    const double tp1 = static_cast<double>(t + 1);
    auto sq = [](double v) { return v * v; };
    const double first = sq(g_bound * tp1 / (beta * d_k));
    const double by_dstar = d_star > 0.0 ? sq(g_bound * d_k * tp1 / (beta * d_star * d_star)) : inf;
    const double by_alpha =
        alpha > 0.0 && std::isfinite(alpha) ? sq(alpha * g_bound * tp1 * tp1 / (8.0 * beta * beta * d_k)) : inf;
    double second = std::min(by_dstar, by_alpha);
    if (!std::isfinite(second)) second = 0.0;
    const double m = std::ceil(std::max({first, second, 1.0}));
    if (m >= 1.8e19) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(m);
}

}  // namespace nepfw
