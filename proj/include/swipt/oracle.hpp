#pragma once

// Brute-force reference solvers. Exponential cost; intended for tests and
// verification runs only. Nothing here uses the stationarity polynomials.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "per_sc.hpp"
#include "secrecy.hpp"

namespace swipt {

struct GridSpec {
    std::size_t p_points = 2000;
    std::size_t alpha_points = 1001;

    void validate() const {
        if (p_points < 2 || alpha_points < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
    }
};

class OracleLimitExceeded : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Linear alpha lattice on [0,1]; contains 0, 1 and, for odd counts, 0.5.
inline std::vector<double> alpha_lattice(std::size_t points) {
    std::vector<double> a(points);
    for (std::size_t i = 0; i < points; ++i) a[i] = static_cast<double>(i) / static_cast<double>(points - 1);
    a.back() = 1.0;
    return a;
}

/// Log-spaced powers from s/h * 1e-3 up to P_peak, plus 0 and P_peak.
inline std::vector<double> power_lattice(const SubcarrierParams& sc, std::size_t points) {
    std::vector<double> p;
    p.reserve(points + 1);
    p.push_back(0.0);
    const double hi = sc.peak_power;
    double lo = sc.h2 > 0.0 ? sc.sigma2 / sc.h2 * 1e-3 : hi * 1e-12;
    lo = std::min(lo, hi * 1e-3);
    const double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) p.push_back(lo * std::exp(step * static_cast<double>(i)));
    p.back() = hi;
    return p;
}

/// Exhaustive maximum of w R^s + Omega p over the (p, alpha) lattice.
inline ScChoice grid_per_sc(const SubcarrierParams& sc, const GridSpec& grid) {
    grid.validate();
    const auto alphas = alpha_lattice(grid.alpha_points);
    const auto powers = power_lattice(sc, grid.p_points);
    ScChoice best{0.0, 0.0, 0.0};
    for (double p : powers) {
        for (double a : alphas) {
            const double v = sc.weight * secrecy_rate(sc.h2, sc.b2, p, a, sc.sigma2) + sc.omega * p;
            if (v > best.value) best = {p, a, v};
        }
    }
    return best;
}

struct OracleResult {
    bool feasible = false;
    double objective = 0.0;
    Allocation allocation;
};

namespace detail {

/// Pareto entry of the budget DP: accumulated rate, capped harvest per ER
/// and the chosen power level per subcarrier.
struct DpEntry {
    double rate;
    std::vector<double> harvest;
    std::vector<int> levels;
};

inline bool dominates(const DpEntry& a, const DpEntry& b) {
    if (a.rate < b.rate) return false;
    for (std::size_t j = 0; j < a.harvest.size(); ++j)
        if (a.harvest[j] < b.harvest[j]) return false;
    return true;
}

inline void pareto_prune(std::vector<DpEntry>& v) {
    std::sort(v.begin(), v.end(), [](const DpEntry& a, const DpEntry& b) { return a.rate > b.rate; });
    std::vector<DpEntry> kept;
    for (auto& e : v) {
        bool dominated = false;
        for (const auto& k : kept)
            if (dominates(k, e)) {
                dominated = true;
                break;
            }
        if (!dominated) kept.push_back(std::move(e));
    }
    v = std::move(kept);
}

}  // namespace detail

/// Best feasible allocation over all subcarrier assignments, with per-SC
/// power on the lattice j * P_max / grid.p_points (j <= P_peak level) and
/// alpha on the linear lattice. Total power and harvest targets are
/// enforced exactly; the result is a lower bound on the true optimum.
inline OracleResult exhaustive_small(const Instance& inst, const GridSpec& grid,
                                     std::size_t assignment_enumeration_limit = 4096) {
    grid.validate();
    inst.validate();
    const auto& cfg = inst.config;
    const auto& ch = inst.channels;
    const std::size_t N = cfg.num_subcarriers, K1 = cfg.num_irs, K2 = cfg.num_ers;

    double combos = 1.0;
    for (std::size_t n = 0; n < N; ++n) combos *= static_cast<double>(K1);
    if (combos > static_cast<double>(assignment_enumeration_limit))
        throw OracleLimitExceeded("assignment enumeration limit exceeded");

    const int L = static_cast<int>(grid.p_points);
    const double unit = cfg.total_power / L;
    const int max_level = std::min(L, static_cast<int>(std::floor(cfg.peak_power / unit * (1.0 + 1e-12))));
    const auto alphas = alpha_lattice(grid.alpha_points);

    // best_rate(k, n, j) and the alpha achieving it.
    std::vector<double> rate(K1 * N * (max_level + 1)), best_alpha(rate.size());
    auto idx = [&](std::size_t k, std::size_t n, int j) { return (k * N + n) * (max_level + 1) + j; };
    for (std::size_t k = 0; k < K1; ++k)
        for (std::size_t n = 0; n < N; ++n)
            for (int j = 0; j <= max_level; ++j) {
                double best = 0.0, arg = 0.0;
                for (double a : alphas) {
                    const double r = cfg.weights[k] *
                                     secrecy_rate(ch.ir_gain(k, n), ch.eve_gains(k, n), j * unit, a, cfg.noise_power);
                    if (r > best) best = r, arg = a;
                }
                rate[idx(k, n, j)] = best;
                best_alpha[idx(k, n, j)] = arg;
            }

    OracleResult result;
    result.allocation = Allocation::zeros(K1, N);
    std::vector<std::size_t> owner(N, 0);
    for (std::size_t combo = 0; combo < static_cast<std::size_t>(combos); ++combo) {
        std::size_t c = combo;
        for (std::size_t n = 0; n < N; ++n) owner[n] = c % K1, c /= K1;

        std::vector<std::vector<detail::DpEntry>> dp(L + 1);
        dp[0].push_back({0.0, std::vector<double>(K2, 0.0), {}});
        for (std::size_t n = 0; n < N; ++n) {
            std::vector<std::vector<detail::DpEntry>> next(L + 1);
            for (int used = 0; used <= L; ++used) {
                for (const auto& e : dp[used]) {
                    for (int j = 0; j <= max_level && used + j <= L; ++j) {
                        detail::DpEntry ne{e.rate + rate[idx(owner[n], n, j)], e.harvest, e.levels};
                        for (std::size_t er = 0; er < K2; ++er)
                            ne.harvest[er] = std::min(
                                cfg.harvest_targets[er],
                                ne.harvest[er] + cfg.harvest_efficiency[er] * ch.er_gain(er, n) * j * unit);
                        ne.levels.push_back(j);
                        next[used + j].push_back(std::move(ne));
                    }
                }
            }
            for (auto& v : next) detail::pareto_prune(v);
            dp = std::move(next);
        }

        for (int used = 0; used <= L; ++used) {
            for (const auto& e : dp[used]) {
                bool ok = true;
                for (std::size_t er = 0; er < K2; ++er)
                    if (e.harvest[er] < cfg.harvest_targets[er] * (1.0 - 1e-12)) ok = false;
                if (!ok || (result.feasible && e.rate <= result.objective)) continue;
                result.feasible = true;
                result.objective = e.rate;
                result.allocation = Allocation::zeros(K1, N);
                for (std::size_t n = 0; n < N; ++n) {
                    const std::size_t k = owner[n];
                    result.allocation.assign(k, n) = 1;
                    result.allocation.power(k, n) = e.levels[n] * unit;
                    result.allocation.split(k, n) = best_alpha[idx(k, n, e.levels[n])];
                }
            }
        }
    }
    return result;
}

}  // namespace swipt
