#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "per_sc.hpp"
#include "recovery.hpp"
#include "roots.hpp"
#include "secrecy.hpp"

namespace swipt {

/// Multipliers of the harvest constraints (one per ER) and the total power
/// constraint.
struct DualVariables {
    std::vector<double> lambdas;
    double gamma = 0.0;

    bool operator==(const DualVariables&) const = default;
};

/// Subgradient and stopping parameters.
///
/// Steps follow step0 / (1 + t / step_decay) and are normalized by the
/// instance's constraint and multiplier scales (see dual_scales()).
struct SolverSettings {
    int max_iters = 1000;
    double lambda_step0 = 0.1;
    double gamma_step0 = 0.1;
    double step_decay = 200.0;
    double init_fraction = 1e-2;
    double tol_dual = 1e-4;
    double tol_feas = 1e-3;  // relative to Q̄_k and P_max
    double candidate_dedup_tol = 1e-9;
    bool polish = true;

    void validate() const {
        if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
        for (double x : {lambda_step0, gamma_step0, step_decay, init_fraction, tol_dual, tol_feas, candidate_dedup_tol})
            if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("solver settings must be positive");
    }
};

/// Natural magnitudes used to normalize subgradient steps.
struct DualScales {
    double gamma = 1.0;                // marginal rate per watt at uniform power
    std::vector<double> lambda;        // gamma / (zeta_k * mean ER gain)
    std::vector<double> harvest;       // harvest under uniform spend of P_max
};

inline DualScales dual_scales(const Instance& inst) {
    const auto& cfg = inst.config;
    const double N = static_cast<double>(cfg.num_subcarriers);
    const double mean_w = std::accumulate(cfg.weights.begin(), cfg.weights.end(), 0.0) / cfg.weights.size();
    DualScales s;
    s.gamma = mean_w * N / (cfg.total_power * std::numbers::ln2);
    for (std::size_t j = 0; j < cfg.num_ers; ++j) {
        const auto row = inst.channels.er_row(j);
        const double mean_gain = std::max(std::accumulate(row.begin(), row.end(), 0.0) / N, 1e-300);
        const double slope = cfg.harvest_efficiency[j] * mean_gain;
        s.lambda.push_back(s.gamma / slope);
        s.harvest.push_back(slope * cfg.total_power);
    }
    return s;
}

/// Step sizes xi_k (per ER) and nu at one iteration.
struct StepSizes {
    std::vector<double> xi;
    double nu = 0.0;
};

/// Diminishing steps step0 / (1 + t / step_decay), expressed in units of
/// each multiplier's natural scale per unit of normalized violation. When
/// the current iterate is given, the steps are additionally divided by the
/// norm of the normalized subgradient so one step moves the multipliers by
/// at most step0 / (1 + t / step_decay) of their scale.
inline StepSizes step_schedule(const SolverSettings& settings, const DualScales& scales, const Instance& inst, int t,
                               const Allocation* iterate = nullptr) {
    const double decay = 1.0 / (1.0 + t / settings.step_decay);
    const double pmax = inst.config.total_power;
    double norm = 1.0;
    if (iterate) {
        const auto q = harvested_powers(inst, *iterate);
        const double sp = (pmax - total_power(*iterate)) / pmax;
        double sq = sp * sp;
        for (std::size_t j = 0; j < q.size(); ++j) {
            const double sj = (q[j] - inst.config.harvest_targets[j]) / scales.harvest[j];
            sq += sj * sj;
        }
        norm = std::max(std::sqrt(sq), 1e-3);
    }
    StepSizes s;
    for (std::size_t j = 0; j < scales.lambda.size(); ++j)
        s.xi.push_back(settings.lambda_step0 * decay * scales.lambda[j] / (scales.harvest[j] * norm));
    s.nu = settings.gamma_step0 * decay * scales.gamma / (pmax * norm);
    return s;
}

/// Projected subgradient update:
///   lambda_k <- [lambda_k - xi_k (Q_k - Q̄_k)]^+
///   gamma    <- [gamma - nu (P_max - sum x p)]^+
inline DualVariables subgradient_step(const DualVariables& duals, const Instance& inst, const Allocation& alloc,
                                      const StepSizes& steps) {
    const auto q = harvested_powers(inst, alloc);
    DualVariables next = duals;
    for (std::size_t j = 0; j < next.lambdas.size(); ++j)
        next.lambdas[j] = std::max(0.0, duals.lambdas[j] - steps.xi[j] * (q[j] - inst.config.harvest_targets[j]));
    next.gamma = std::max(0.0, duals.gamma - steps.nu * (inst.config.total_power - total_power(alloc)));
    return next;
}

inline DualVariables subgradient_step(const DualVariables& duals, const Instance& inst, const Allocation& alloc,
                                      const SolverSettings& settings, int t) {
    return subgradient_step(duals, inst, alloc, step_schedule(settings, dual_scales(inst), inst, t, &alloc));
}

inline DualVariables initial_duals(const SolverSettings& settings, const DualScales& scales) {
    DualVariables d;
    for (double l : scales.lambda) d.lambdas.push_back(settings.init_fraction * l);
    d.gamma = settings.init_fraction * scales.gamma;
    return d;
}

/// Omega_n for every subcarrier under the given multipliers.
inline std::vector<double> omegas(const Instance& inst, const DualVariables& duals) {
    const std::size_t N = inst.num_subcarriers(), K2 = inst.num_ers();
    std::vector<double> out(N);
    std::vector<double> gains(K2);
    for (std::size_t n = 0; n < N; ++n) {
        for (std::size_t j = 0; j < K2; ++j) gains[j] = inst.channels.er_gain(j, n);
        out[n] = omega(duals.gamma, duals.lambdas, inst.config.harvest_efficiency, gains);
    }
    return out;
}

inline SubcarrierParams subcarrier_params(const Instance& inst, std::size_t k, std::size_t n, double omega_n) {
    return {inst.channels.ir_gain(k, n), inst.channels.eve_gains(k, n), inst.config.weights[k], omega_n,
            inst.config.noise_power, inst.config.peak_power};
}

/// Result of assigning subcarriers from per-cell Lagrangian optima.
struct Assignment {
    Allocation allocation;
    std::vector<double> value;  // H at the chosen cell, per subcarrier
};

/// x_{k*,n} = 1 for k* = argmax_k H_{k,n}(p*, a*), ties to the lowest k.
inline Assignment assign_subcarriers(const Matrix<ScChoice>& per_sc) {
    const std::size_t K1 = per_sc.rows(), N = per_sc.cols();
    Assignment out{Allocation::zeros(K1, N), std::vector<double>(N, 0.0)};
    for (std::size_t n = 0; n < N; ++n) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < K1; ++k)
            if (per_sc(k, n).value > per_sc(best, n).value) best = k;
        const ScChoice& c = per_sc(best, n);
        out.allocation.assign(best, n) = 1;
        out.allocation.power(best, n) = c.power;
        out.allocation.split(best, n) = c.split;
        out.value[n] = c.value;
    }
    return out;
}

/// Assignment with subcarrier n preset to IR owners[n].
inline Assignment assign_fixed(const Matrix<ScChoice>& per_sc, std::span<const std::size_t> owners) {
    const std::size_t K1 = per_sc.rows(), N = per_sc.cols();
    Assignment out{Allocation::zeros(K1, N), std::vector<double>(N, 0.0)};
    for (std::size_t n = 0; n < N; ++n) {
        const std::size_t k = owners[n];
        const ScChoice& c = per_sc(k, n);
        out.allocation.assign(k, n) = 1;
        out.allocation.power(k, n) = c.power;
        out.allocation.split(k, n) = c.split;
        out.value[n] = c.value;
    }
    return out;
}

struct TraceEntry {
    int iteration = 0;
    double dual_value = 0.0;
    double power_violation_w = 0.0;    // [sum p - P_max]^+
    double harvest_violation_w = 0.0;  // max_k [Q̄_k - Q_k]^+
    double recovered_objective = 0.0;  // after repair; NaN when repair failed
};

struct SolveReport {
    std::string scheme;
    Allocation allocation;
    double objective = 0.0;
    std::vector<double> harvested;
    double total_power = 0.0;
    double dual_value = 0.0;
    double duality_gap_rel = 0.0;
    int iterations = 0;
    bool converged = false;
    bool feasible = false;
    DualVariables duals;
    std::vector<TraceEntry> trace;
};

/// Raised when the harvest targets cannot be met by any allocation.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Necessary condition for feasibility: every ER individually reaches its
/// target when all of P_max is poured into its best subcarriers.
inline bool harvest_attainable(const Instance& inst) {
    const auto& cfg = inst.config;
    for (std::size_t j = 0; j < cfg.num_ers; ++j) {
        auto row = inst.channels.er_row(j);
        std::vector<double> g(row.begin(), row.end());
        std::sort(g.begin(), g.end(), std::greater<>());
        double left = cfg.total_power, q = 0.0;
        for (double gain : g) {
            if (left <= 0.0) break;
            const double p = std::min(left, cfg.peak_power);
            q += cfg.harvest_efficiency[j] * gain * p;
            left -= p;
        }
        if (q < cfg.harvest_targets[j]) return false;
    }
    return true;
}

/// Scheme knobs shared by the proposed algorithm and its benchmarks.
struct SchemePolicy {
    std::string name = "proposed";
    SplitRule split = SplitRule::joint();
    bool fixed_assignment = false;  // round-robin n -> n mod K1
};

namespace detail {

/// Lazily computed energy-steering allocation for the repair fallback.
struct EnergyFallback {
    const Instance* inst;
    std::optional<std::vector<double>> powers;

    const std::vector<double>& get() {
        if (!powers) powers = max_min_harvest_powers(*inst);
        return *powers;
    }
};

inline PrimalState recover(const Instance& inst, const SchemePolicy& policy, const Allocation& iterate,
                           EnergyFallback& fallback) {
    PrimalState st = PrimalState::from_allocation(inst, policy.split, iterate);
    enforce_power_budget(st);
    if (!restore_harvest(st, 4 * st.size() + 20) && blend_toward(st, fallback.get()))
        restore_harvest(st, 4 * st.size() + 20);
    return st;
}

}  // namespace detail

/// Lagrange dual decomposition with projected subgradient updates.
///
/// Each iteration solves every (IR, subcarrier) subproblem in closed form,
/// assigns subcarriers, records g(lambda, gamma), repairs the iterate into
/// a feasible allocation and steps the multipliers. The report carries the
/// best repaired allocation and the smallest dual value seen.
inline SolveReport solve_with_policy(const Instance& inst, const SolverSettings& settings, const SchemePolicy& policy) {
    inst.validate();
    settings.validate();
    if (!harvest_attainable(inst)) throw InfeasibleError("harvest targets unattainable with all power steered to ERs");

    const auto& cfg = inst.config;
    const std::size_t K1 = cfg.num_irs, K2 = cfg.num_ers, N = cfg.num_subcarriers;
    const DualScales scales = dual_scales(inst);

    std::vector<std::size_t> fixed_owner(N);
    for (std::size_t n = 0; n < N; ++n) fixed_owner[n] = n % K1;

    SolveReport rep;
    rep.scheme = policy.name;
    DualVariables duals = initial_duals(settings, scales);
    double best_dual = std::numeric_limits<double>::infinity();
    DualVariables best_duals = duals;
    detail::EnergyFallback fallback{&inst, std::nullopt};
    std::optional<PrimalState> best;
    double best_obj = -std::numeric_limits<double>::infinity();
    std::optional<PrimalState> last;
    Matrix<ScChoice> per_sc(K1, N);

    int t = 0;
    for (; t < settings.max_iters; ++t) {
        const auto om = omegas(inst, duals);
        for (std::size_t k = 0; k < K1; ++k)
            for (std::size_t n = 0; n < N; ++n) {
                if (policy.fixed_assignment && fixed_owner[n] != k) {
                    per_sc(k, n) = {};
                    continue;
                }
                per_sc(k, n) = optimize_subcarrier(subcarrier_params(inst, k, n, om[n]), policy.split,
                                                   settings.candidate_dedup_tol);
            }
        const Assignment asg = policy.fixed_assignment ? assign_fixed(per_sc, fixed_owner) : assign_subcarriers(per_sc);

        double g = std::accumulate(asg.value.begin(), asg.value.end(), 0.0) + duals.gamma * cfg.total_power;
        for (std::size_t j = 0; j < K2; ++j) g -= duals.lambdas[j] * cfg.harvest_targets[j];
        if (g < best_dual) best_dual = g, best_duals = duals;

        const auto q = harvested_powers(inst, asg.allocation);
        const double ptot = total_power(asg.allocation);
        TraceEntry te{t, g, std::max(0.0, ptot - cfg.total_power), 0.0, std::numeric_limits<double>::quiet_NaN()};
        bool harvest_met = true;
        for (std::size_t j = 0; j < K2; ++j) {
            const double short_w = cfg.harvest_targets[j] - q[j];
            te.harvest_violation_w = std::max(te.harvest_violation_w, short_w);
            if (short_w > settings.tol_feas * cfg.harvest_targets[j]) harvest_met = false;
        }

        PrimalState st = detail::recover(inst, policy, asg.allocation, fallback);
        if (st.feasible()) {
            const double obj = st.objective();
            te.recovered_objective = obj;
            if (obj > best_obj) best_obj = obj, best = st;
        }
        last = st;

        // Weak duality: every dual value bounds every feasible objective.
        if (best && g < best_obj - 1e-9 * std::max(1.0, std::abs(best_obj)))
            throw std::logic_error("weak duality violated: per-subcarrier maximization is not exact");
        rep.trace.push_back(te);

        const DualVariables next = subgradient_step(duals, inst, asg.allocation,
                                                    step_schedule(settings, scales, inst, t, &asg.allocation));
        double change = std::abs(next.gamma - duals.gamma) / std::max(duals.gamma, 1e-3 * scales.gamma);
        for (std::size_t j = 0; j < K2; ++j)
            change = std::max(change, std::abs(next.lambdas[j] - duals.lambdas[j]) /
                                          std::max(duals.lambdas[j], 1e-3 * scales.lambda[j]));
        duals = next;
        const bool power_met = ptot <= cfg.total_power * (1.0 + settings.tol_feas);
        if (change < settings.tol_dual && power_met && harvest_met) {
            rep.converged = true;
            ++t;
            break;
        }
    }
    rep.iterations = t;
    rep.duals = duals;
    rep.dual_value = best_dual;

    if (!best && last) {
        // Nothing feasible along the way; report the last repaired iterate.
        best = last;
    }
    if (best && best->feasible() && settings.polish) {
        const bool reassign = !policy.fixed_assignment;
        MultiplierVector mu{best_duals.gamma};
        mu.insert(mu.end(), best_duals.lambdas.begin(), best_duals.lambdas.end());
        std::vector<double> mu_scale{scales.gamma};
        mu_scale.insert(mu_scale.end(), scales.lambda.begin(), scales.lambda.end());

        PrimalState refined = *best;
        polish(*best, reassign);
        for (int round = 0; round < 2; ++round) {
            if (!refine_fixed_assignment(refined, mu, mu_scale)) break;
            polish(refined, reassign);
            if (refined.objective() > best->objective()) *best = refined;
        }
    }

    rep.feasible = best && best->feasible();
    rep.allocation = best ? best->to_allocation() : Allocation::zeros(K1, N);
    rep.objective = weighted_sum_rate(inst, rep.allocation);
    rep.harvested = harvested_powers(inst, rep.allocation);
    rep.total_power = total_power(rep.allocation);
    if (rep.feasible && rep.dual_value < rep.objective - 1e-9 * std::max(1.0, std::abs(rep.objective)))
        throw std::logic_error("weak duality violated after primal recovery");
    rep.duality_gap_rel = (rep.dual_value - rep.objective) / std::max(std::abs(rep.dual_value), 1e-300);
    return rep;
}

/// Joint power, splitting-ratio and subcarrier optimization.
inline SolveReport solve(const Instance& inst, const SolverSettings& settings = {}) {
    return solve_with_policy(inst, settings, SchemePolicy{});
}

}  // namespace swipt
