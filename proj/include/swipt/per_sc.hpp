#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "roots.hpp"
#include "secrecy.hpp"

namespace swipt {

/// How the AN fraction of a subcarrier is chosen.
struct SplitRule {
    bool optimized = true;
    double fixed_alpha = 0.0;

    static constexpr SplitRule joint() noexcept { return {true, 0.0}; }
    static constexpr SplitRule fixed(double alpha) noexcept { return {false, alpha}; }

    bool operator==(const SplitRule&) const = default;
};

/// Inputs of one (IR, subcarrier) Lagrangian subproblem.
struct SubcarrierParams {
    double h2 = 0.0;      // IR gain
    double b2 = 0.0;      // best eavesdropper gain
    double weight = 1.0;
    double omega = 0.0;   // energy value minus power price
    double sigma2 = 1.0;
    double peak_power = 1.0;
};

struct Candidate {
    double power = 0.0;
    double split = 0.0;
};

struct ScChoice {
    double power = 0.0;
    double split = 0.0;
    double value = 0.0;  // w R^s + Omega p
};

/// w R^s(p, a) + Omega p
inline double lagrangian_value(const SubcarrierParams& sc, double p, double alpha) {
    return sc.weight * secrecy_rate(sc.h2, sc.b2, p, alpha, sc.sigma2) + sc.omega * p;
}

/// Splitting ratio a rule assigns to power p.
inline double split_for(const SubcarrierParams& sc, SplitRule rule, double p) {
    if (!rule.optimized) return rule.fixed_alpha;
    if (!(p > 0.0) || !(sc.h2 > 0.0) || !(sc.b2 > 0.0)) return 0.0;
    return alpha_star(sc.h2, sc.b2, p, sc.sigma2);
}

namespace detail {

inline bool admissible(double p, const Threshold& zero_region, double peak) {
    return std::isfinite(p) && p > 0.0 && !zero_region.covers(p) && p <= peak * (1.0 + 1e-12);
}

/// Roots of the fixed-alpha stationarity cubic lying in (X, P_peak].
inline void add_cubic_roots(std::vector<double>& out, const SubcarrierParams& sc, double alpha,
                            const Threshold& zero_region) {
    const CubicCoeffs c = cubic_coeffs(sc.h2, sc.b2, alpha, sc.weight, sc.omega, sc.sigma2);
    // Solve in u = p / P_peak so the degenerate-degree test compares like with like.
    const CubicCoeffs u = c.rescaled(sc.peak_power);
    if (std::max({std::abs(u.a3), std::abs(u.a2), std::abs(u.a1), std::abs(u.a0)}) == 0.0) return;
    for (double r : real_roots_cubic(u)) {
        const double p = std::min(r * sc.peak_power, sc.peak_power);
        if (admissible(p, zero_region, sc.peak_power)) out.push_back(p);
    }
}

/// Roots of the alpha-eliminated quadratic lying in (X, P_peak] whose
/// unclamped alpha*(p) is a valid ratio.
inline void add_quadratic_roots(std::vector<double>& out, const SubcarrierParams& sc, const Threshold& zero_region) {
    const QuadCoeffs q = quadratic_coeffs(sc.h2, sc.b2, sc.weight, sc.omega, sc.sigma2).rescaled(sc.peak_power);
    if (std::max({std::abs(q.a2), std::abs(q.a1), std::abs(q.a0)}) == 0.0) return;
    for (double r : real_roots_quadratic(q)) {
        const double p = std::min(r * sc.peak_power, sc.peak_power);
        if (!admissible(p, zero_region, sc.peak_power)) continue;
        const double a = alpha_star_unclamped(sc.h2, sc.b2, p, sc.sigma2);
        if (a >= 0.0 && a <= 1.0) out.push_back(p);
    }
}

}  // namespace detail

/// Candidate (p, alpha) pairs that contain the maximizer of
/// w R^s(p, a) + Omega p over [0, P_peak] x (allowed alphas).
///
/// Joint rule: stationary points of the alpha = 0 and alpha = 1 cubics,
/// stationary points of the alpha-eliminated quadratic, the zero-secrecy
/// boundaries and both endpoints, each paired with alpha*(p). Fixed rule:
/// stationary points of the cubic at that alpha plus {0, [X]^+, P_peak}.
inline std::vector<Candidate> per_sc_candidates(const SubcarrierParams& sc, SplitRule rule, double dedup_tol = 1e-9) {
    std::vector<double> powers;
    powers.reserve(12);
    powers.push_back(0.0);
    powers.push_back(sc.peak_power);

    const bool has_link = sc.h2 > 0.0;
    if (!rule.optimized) {
        if (has_link || sc.b2 > 0.0) {
            const Threshold x = threshold_x(sc.h2, sc.b2, rule.fixed_alpha, sc.sigma2);
            if (!x.unbounded && x.watts > 0.0) powers.push_back(x.capped(sc.peak_power));
            if (has_link && rule.fixed_alpha < 1.0) detail::add_cubic_roots(powers, sc, rule.fixed_alpha, x);
        }
    } else if (has_link && sc.b2 <= 0.0) {
        // No eavesdropper: AN is useless and alpha* = 0.
        detail::add_cubic_roots(powers, sc, 0.0, Threshold::finite(0.0));
    } else if (has_link) {
        const Threshold x0 = threshold_x(sc.h2, sc.b2, 0.0, sc.sigma2);
        const Threshold x1 = joint_threshold(sc.h2, sc.b2, sc.sigma2);
        if (sc.omega >= 0.0) {
            powers.push_back(x0.capped(sc.peak_power));
            powers.push_back(x1.capped(sc.peak_power));
        }
        detail::add_cubic_roots(powers, sc, 0.0, x0);
        detail::add_cubic_roots(powers, sc, 1.0, x1);
        detail::add_quadratic_roots(powers, sc, x1);
    }

    std::sort(powers.begin(), powers.end());
    std::vector<Candidate> out;
    out.reserve(powers.size());
    for (double p : powers) {
        if (!out.empty()) {
            const double prev = out.back().power;
            if (p == prev || (prev > 0.0 && std::abs(p - prev) <= dedup_tol * std::max(p, prev))) continue;
        }
        out.push_back({p, p > 0.0 ? split_for(sc, rule, p) : (rule.optimized ? 0.0 : rule.fixed_alpha)});
    }
    // Keep P_peak exact when a root merged into it.
    if (out.size() > 1 && out.back().power != sc.peak_power &&
        std::abs(out.back().power - sc.peak_power) <= dedup_tol * sc.peak_power)
        out.back() = {sc.peak_power, split_for(sc, rule, sc.peak_power)};
    return out;
}

/// Candidate with the largest Lagrangian value; ties go to smaller p, then
/// smaller alpha.
inline ScChoice per_sc_optimize(std::span<const Candidate> candidates, const SubcarrierParams& sc) {
    ScChoice best{0.0, 0.0, 0.0};
    bool first = true;
    for (const Candidate& c : candidates) {
        const double v = lagrangian_value(sc, c.power, c.split);
        const bool better = first || v > best.value ||
                            (v == best.value && (c.power < best.power || (c.power == best.power && c.split < best.split)));
        if (better) best = {c.power, c.split, v};
        first = false;
    }
    return best;
}

inline ScChoice optimize_subcarrier(const SubcarrierParams& sc, SplitRule rule, double dedup_tol = 1e-9) {
    const auto candidates = per_sc_candidates(sc, rule, dedup_tol);
    return per_sc_optimize(candidates, sc);
}

}  // namespace swipt
