#pragma once

// Primal recovery: turns a per-subcarrier Lagrangian solution, which may
// violate the coupling constraints at finite N, into a feasible allocation.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "per_sc.hpp"
#include "roots.hpp"
#include "secrecy.hpp"

namespace swipt {

/// One IR and one power level per subcarrier, with the splitting ratio
/// implied by the scheme's SplitRule.
class PrimalState {
public:
    PrimalState(const Instance& inst, SplitRule rule, std::vector<std::size_t> owner, std::vector<double> power)
        : inst_(&inst), rule_(rule), owner_(std::move(owner)), power_(std::move(power)) {
        refresh();
    }

    static PrimalState from_allocation(const Instance& inst, SplitRule rule, const Allocation& alloc) {
        const std::size_t N = alloc.num_subcarriers();
        std::vector<std::size_t> owner(N, 0);
        std::vector<double> power(N, 0.0);
        for (std::size_t n = 0; n < N; ++n) {
            const std::size_t k = alloc.owner(n);
            owner[n] = k < alloc.num_irs() ? k : 0;
            power[n] = alloc.subcarrier_power(n);
        }
        return PrimalState(inst, rule, std::move(owner), std::move(power));
    }

    std::size_t size() const noexcept { return power_.size(); }
    double power(std::size_t n) const { return power_[n]; }
    std::size_t owner(std::size_t n) const { return owner_[n]; }
    double total() const noexcept { return total_; }
    const std::vector<double>& harvest() const noexcept { return harvest_; }

    /// w_k R^s on subcarrier n if IR k transmits power p there.
    double value(std::size_t n, std::size_t k, double p) const {
        const auto& ch = inst_->channels;
        SubcarrierParams sc{ch.ir_gain(k, n), ch.eve_gains(k, n), inst_->config.weights[k], 0.0,
                            inst_->config.noise_power, inst_->config.peak_power};
        if (!(p > 0.0)) return 0.0;
        return sc.weight * secrecy_rate(sc.h2, sc.b2, p, split_for(sc, rule_, p), sc.sigma2);
    }
    double value(std::size_t n, double p) const { return value(n, owner_[n], p); }

    double objective() const {
        double sum = 0.0;
        for (std::size_t n = 0; n < size(); ++n) sum += value(n, power_[n]);
        return sum;
    }

    /// Harvest gain per watt on subcarrier n for ER j.
    double harvest_slope(std::size_t j, std::size_t n) const {
        return inst_->config.harvest_efficiency[j] * inst_->channels.er_gain(j, n);
    }

    void set_power(std::size_t n, double p) {
        const double d = p - power_[n];
        power_[n] = p;
        total_ += d;
        for (std::size_t j = 0; j < harvest_.size(); ++j) harvest_[j] += d * harvest_slope(j, n);
    }
    void set_owner(std::size_t n, std::size_t k) { owner_[n] = k; }

    void scale_powers(double factor) {
        for (double& p : power_) p *= factor;
        refresh();
    }

    bool power_ok() const noexcept { return total_ <= inst_->config.total_power * (1.0 + 1e-12); }
    bool harvest_ok(std::size_t j) const {
        return harvest_[j] >= inst_->config.harvest_targets[j] * (1.0 - 1e-9);
    }
    bool feasible() const {
        if (!power_ok()) return false;
        for (std::size_t j = 0; j < harvest_.size(); ++j)
            if (!harvest_ok(j)) return false;
        return true;
    }

    Allocation to_allocation() const {
        const auto& ch = inst_->channels;
        Allocation a = Allocation::zeros(inst_->num_irs(), size());
        for (std::size_t n = 0; n < size(); ++n) {
            const std::size_t k = owner_[n];
            a.assign(k, n) = 1;
            a.power(k, n) = power_[n];
            SubcarrierParams sc{ch.ir_gain(k, n), ch.eve_gains(k, n), 1.0, 0.0, inst_->config.noise_power,
                                inst_->config.peak_power};
            a.split(k, n) = power_[n] > 0.0 ? split_for(sc, rule_, power_[n]) : (rule_.optimized ? 0.0 : rule_.fixed_alpha);
        }
        return a;
    }

    const Instance& instance() const noexcept { return *inst_; }
    SplitRule rule() const noexcept { return rule_; }

private:
    void refresh() {
        total_ = 0.0;
        harvest_.assign(inst_->num_ers(), 0.0);
        for (std::size_t n = 0; n < size(); ++n) {
            total_ += power_[n];
            for (std::size_t j = 0; j < harvest_.size(); ++j) harvest_[j] += power_[n] * harvest_slope(j, n);
        }
    }

    const Instance* inst_;
    SplitRule rule_;
    std::vector<std::size_t> owner_;
    std::vector<double> power_;
    std::vector<double> harvest_;
    double total_ = 0.0;
};

/// Scales all powers down uniformly when the total budget is exceeded.
inline void enforce_power_budget(PrimalState& st) {
    const double pmax = st.instance().config.total_power;
    if (st.total() > pmax) st.scale_powers(pmax / st.total() * (1.0 - 1e-15));
}

/// Shifts power toward subcarriers the deficient ERs hear well, taking it
/// first from the unused budget and then from the subcarriers whose rate
/// loss per unit of harvest gain is smallest. Returns true on success.
inline bool restore_harvest(PrimalState& st, std::size_t max_steps) {
    const auto& cfg = st.instance().config;
    const std::size_t N = st.size(), K2 = cfg.num_ers;
    const double peak = cfg.peak_power, pmax = cfg.total_power;
    std::vector<double> energy(N);
    std::vector<double> deficit(K2);

    for (std::size_t step = 0; step < max_steps; ++step) {
        bool any = false;
        for (std::size_t j = 0; j < K2; ++j) {
            deficit[j] = st.harvest_ok(j) ? 0.0 : cfg.harvest_targets[j] - st.harvest()[j];
            any = any || deficit[j] > 0.0;
        }
        if (!any) return true;

        for (std::size_t n = 0; n < N; ++n) {
            energy[n] = 0.0;
            for (std::size_t j = 0; j < K2; ++j)
                if (deficit[j] > 0.0) energy[n] += st.harvest_slope(j, n) / cfg.harvest_targets[j];
        }
        std::size_t r = N;
        for (std::size_t n = 0; n < N; ++n)
            if (st.power(n) < peak * (1.0 - 1e-12) && (r == N || energy[n] > energy[r])) r = n;
        if (r == N) return false;
        const double room = peak - st.power(r);

        const double free = pmax - st.total();
        if (free > pmax * 1e-12) {
            double need = 0.0;
            for (std::size_t j = 0; j < K2; ++j)
                if (deficit[j] > 0.0 && st.harvest_slope(j, r) > 0.0)
                    need = std::max(need, deficit[j] / st.harvest_slope(j, r));
            if (need == 0.0) need = room;
            st.set_power(r, st.power(r) + std::min({room, free, need * (1.0 + 1e-9)}));
            continue;
        }

        std::size_t donor = N;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t n = 0; n < N; ++n) {
            if (n == r || !(st.power(n) > 0.0) || !(energy[n] < energy[r])) continue;
            const double delta = std::min(st.power(n), room);
            const double loss = st.value(n, st.power(n)) - st.value(n, st.power(n) - delta);
            const double cost = loss / (delta * (energy[r] - energy[n]));
            if (cost < best_cost) best_cost = cost, donor = n;
        }
        if (donor == N) return false;

        double need = 0.0;
        for (std::size_t j = 0; j < K2; ++j) {
            const double gain = st.harvest_slope(j, r) - st.harvest_slope(j, donor);
            if (deficit[j] > 0.0 && gain > 0.0) need = std::max(need, deficit[j] / gain);
        }
        if (need == 0.0) need = room;
        const double delta = std::min({room, st.power(donor), need * (1.0 + 1e-9)});
        st.set_power(donor, st.power(donor) - delta);
        st.set_power(r, std::min(peak, st.power(r) + delta));
    }
    return st.feasible();
}

/// Approximate max-min harvest allocation: maximizes min_j Q_j / Q̄_j over
/// {sum p <= P_max, 0 <= p <= P_peak} by multiplicative weights on the ERs
/// against a greedy best response, averaged over the rounds.
inline std::vector<double> max_min_harvest_powers(const Instance& inst, int rounds = 4000) {
    const auto& cfg = inst.config;
    const std::size_t N = cfg.num_subcarriers, K2 = cfg.num_ers;
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < K2; ++j)
        if (cfg.harvest_targets[j] > 0.0) active.push_back(j);
    std::vector<double> avg(N, 0.0);
    if (active.empty()) return avg;

    auto slope = [&](std::size_t j, std::size_t n) {
        return cfg.harvest_efficiency[j] * inst.channels.er_gain(j, n) / cfg.harvest_targets[j];
    };
    auto best_response = [&](const std::vector<double>& mu, std::vector<double>& p) {
        std::vector<std::pair<double, std::size_t>> score(N);
        for (std::size_t n = 0; n < N; ++n) {
            double s = 0.0;
            for (std::size_t a = 0; a < active.size(); ++a) s += mu[a] * slope(active[a], n);
            score[n] = {-s, n};
        }
        std::sort(score.begin(), score.end());
        std::fill(p.begin(), p.end(), 0.0);
        double left = cfg.total_power;
        for (const auto& [neg, n] : score) {
            if (left <= 0.0) break;
            p[n] = std::min(left, cfg.peak_power);
            left -= p[n];
        }
    };

    // Payoff bound for the learning rate: best single-ER harvest ratio.
    double bound = 0.0;
    std::vector<double> p(N);
    for (std::size_t a = 0; a < active.size(); ++a) {
        std::vector<double> e(active.size(), 0.0);
        e[a] = 1.0;
        best_response(e, p);
        double u = 0.0;
        for (std::size_t n = 0; n < N; ++n) u += slope(active[a], n) * p[n];
        bound = std::max(bound, u);
    }
    const double eta = std::sqrt(8.0 * std::log(static_cast<double>(active.size()) + 1.0) / rounds) / bound;

    std::vector<double> mu(active.size(), 1.0 / active.size());
    for (int r = 0; r < rounds; ++r) {
        best_response(mu, p);
        double norm = 0.0;
        for (std::size_t a = 0; a < active.size(); ++a) {
            double u = 0.0;
            for (std::size_t n = 0; n < N; ++n) u += slope(active[a], n) * p[n];
            mu[a] *= std::exp(-eta * u);
            norm += mu[a];
        }
        for (double& m : mu) m /= norm;
        for (std::size_t n = 0; n < N; ++n) avg[n] += p[n];
    }
    for (double& x : avg) x /= rounds;
    return avg;
}

/// Blends the state toward `energy_powers` just far enough to meet every
/// harvest target. Returns false when even the target allocation falls short.
inline bool blend_toward(PrimalState& st, const std::vector<double>& energy_powers) {
    const auto& cfg = st.instance().config;
    const std::size_t N = st.size(), K2 = cfg.num_ers;
    double theta = 0.0;
    for (std::size_t j = 0; j < K2; ++j) {
        if (st.harvest_ok(j)) continue;
        double qe = 0.0;
        for (std::size_t n = 0; n < N; ++n) qe += st.harvest_slope(j, n) * energy_powers[n];
        const double qj = st.harvest()[j], target = cfg.harvest_targets[j];
        if (!(qe > qj)) return false;
        theta = std::max(theta, (target - qj) / (qe - qj));
    }
    theta = std::min(1.0, theta * (1.0 + 1e-9));
    for (std::size_t n = 0; n < N; ++n) st.set_power(n, (1.0 - theta) * st.power(n) + theta * energy_powers[n]);
    return theta < 1.0 || st.feasible();
}

/// Local search on a feasible allocation: moves power in shrinking quanta
/// between subcarriers (or from the unused budget) whenever the weighted
/// secrecy rate improves and every constraint stays satisfied, and, when
/// allowed, hands a subcarrier to the IR that uses its power best.
inline void polish(PrimalState& st, bool allow_reassign, int scales = 8, std::size_t moves_per_scale = 0) {
    const auto& cfg = st.instance().config;
    const std::size_t N = st.size(), K2 = cfg.num_ers, K1 = cfg.num_irs;
    const double peak = cfg.peak_power, pmax = cfg.total_power;
    if (moves_per_scale == 0) moves_per_scale = 8 * N;

    auto reassign = [&] {
        if (!allow_reassign) return;
        for (std::size_t n = 0; n < N; ++n) {
            const double p = st.power(n);
            if (!(p > 0.0)) continue;
            std::size_t best_k = st.owner(n);
            double best_v = st.value(n, p);
            for (std::size_t k = 0; k < K1; ++k) {
                const double v = st.value(n, k, p);
                if (v > best_v) best_v = v, best_k = k;
            }
            st.set_owner(n, best_k);
        }
    };
    reassign();

    std::vector<double> up(N), down(N);
    const double threshold = 1e-13 * std::max(1.0, std::abs(st.objective()));
    double delta = pmax / static_cast<double>(N);
    for (int s = 0; s < scales; ++s, delta /= 4.0) {
        auto refresh = [&](std::size_t n) {
            const double p = st.power(n), v = st.value(n, p);
            up[n] = p + delta <= peak ? st.value(n, p + delta) - v : -std::numeric_limits<double>::infinity();
            down[n] = p >= delta ? v - st.value(n, p - delta) : std::numeric_limits<double>::infinity();
        };
        for (std::size_t n = 0; n < N; ++n) refresh(n);

        for (std::size_t move = 0; move < moves_per_scale; ++move) {
            double best_gain = threshold;
            std::size_t from = N, to = N;  // from == N means the unused budget
            const bool slack = pmax - st.total() >= delta;
            for (std::size_t j = 0; j < N; ++j) {
                if (!(up[j] > best_gain)) continue;
                if (slack && up[j] > best_gain) best_gain = up[j], from = N, to = j;
                for (std::size_t i = 0; i < N; ++i) {
                    if (i == j) continue;
                    const double gain = up[j] - down[i];
                    if (!(gain > best_gain)) continue;
                    bool ok = true;
                    for (std::size_t e = 0; e < K2 && ok; ++e) {
                        const double q = st.harvest()[e] + delta * (st.harvest_slope(e, j) - st.harvest_slope(e, i));
                        ok = q >= cfg.harvest_targets[e] * (1.0 - 1e-9);
                    }
                    if (ok) best_gain = gain, from = i, to = j;
                }
            }
            if (to == N) break;
            if (from != N) {
                st.set_power(from, std::max(0.0, st.power(from) - delta));
                refresh(from);
            }
            st.set_power(to, std::min(peak, st.power(to) + delta));
            refresh(to);
        }
    }
    reassign();
}

/// Multipliers for refine_fixed_assignment(): gamma first, then one lambda
/// per ER.
using MultiplierVector = std::vector<double>;

namespace detail {

/// Solves the small dense system A x = b in place (partial pivoting).
inline bool solve_dense(std::vector<double>& A, std::vector<double>& b, std::size_t m) {
    for (std::size_t c = 0; c < m; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < m; ++r)
            if (std::abs(A[r * m + c]) > std::abs(A[piv * m + c])) piv = r;
        if (!(std::abs(A[piv * m + c]) > 0.0)) return false;
        if (piv != c) {
            for (std::size_t k = 0; k < m; ++k) std::swap(A[c * m + k], A[piv * m + k]);
            std::swap(b[c], b[piv]);
        }
        for (std::size_t r = c + 1; r < m; ++r) {
            const double f = A[r * m + c] / A[c * m + c];
            for (std::size_t k = c; k < m; ++k) A[r * m + k] -= f * A[c * m + k];
            b[r] -= f * b[c];
        }
    }
    for (std::size_t c = m; c-- > 0;) {
        double v = b[c];
        for (std::size_t k = c + 1; k < m; ++k) v -= A[c * m + k] * b[k];
        b[c] = v / A[c * m + c];
    }
    return true;
}

}  // namespace detail

/// Re-solves the power allocation for the current subcarrier owners by
/// minimizing the (K2 + 1)-dimensional dual of the fixed-assignment problem
/// with projected Newton steps. Each dual evaluation uses the closed-form
/// per-subcarrier maximizer; the Hessian comes from the sensitivity of each
/// subcarrier's optimal power to its price. Replaces the state's powers by
/// the primal of the final multipliers, repaired to feasibility, and
/// returns true when that allocation is feasible.
inline bool refine_fixed_assignment(PrimalState& st, MultiplierVector mu, const std::vector<double>& mu_scale,
                                    int max_newton = 60) {
    const auto& inst = st.instance();
    const auto& cfg = inst.config;
    const auto& ch = inst.channels;
    const std::size_t N = st.size(), K2 = cfg.num_ers, m = K2 + 1;
    const SplitRule rule = st.rule();

    std::vector<double> slope(K2 * N);  // zeta_j g_{j,n}
    for (std::size_t j = 0; j < K2; ++j)
        for (std::size_t n = 0; n < N; ++n) slope[j * N + n] = st.harvest_slope(j, n);
    auto price = [&](const MultiplierVector& u, std::size_t n) {
        double pi = u[0];
        for (std::size_t j = 0; j < K2; ++j) pi -= u[j + 1] * slope[j * N + n];
        return pi;
    };
    auto params = [&](std::size_t n, double pi) {
        const std::size_t k = st.owner(n);
        return SubcarrierParams{ch.ir_gain(k, n), ch.eve_gains(k, n), cfg.weights[k], -pi, cfg.noise_power,
                                cfg.peak_power};
    };

    struct Eval {
        double g = 0.0;
        std::vector<double> power;
        std::vector<double> grad;
    };
    auto evaluate = [&](const MultiplierVector& u) {
        Eval e;
        e.power.resize(N);
        e.grad.assign(m, 0.0);
        e.g = u[0] * cfg.total_power;
        e.grad[0] = cfg.total_power;
        for (std::size_t j = 0; j < K2; ++j) {
            e.g -= u[j + 1] * cfg.harvest_targets[j];
            e.grad[j + 1] = -cfg.harvest_targets[j];
        }
        for (std::size_t n = 0; n < N; ++n) {
            const auto c = optimize_subcarrier(params(n, price(u, n)), rule);
            e.power[n] = c.power;
            e.g += c.value;
            e.grad[0] -= c.power;
            for (std::size_t j = 0; j < K2; ++j) e.grad[j + 1] += slope[j * N + n] * c.power;
        }
        return e;
    };

    Eval cur = evaluate(mu);
    std::vector<double> H(m * m), rhs(m);
    std::vector<char> free_var(m);
    for (int it = 0; it < max_newton; ++it) {
        // Projected-gradient optimality test in scaled units.
        double pg = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            free_var[i] = mu[i] > 0.0 || cur.grad[i] < 0.0;
            const double unit = i == 0 ? cfg.total_power : std::max(cfg.harvest_targets[i - 1], 1e-300);
            if (free_var[i]) pg = std::max(pg, std::abs(cur.grad[i]) / unit);
        }
        if (pg < 1e-12) break;

        std::fill(H.begin(), H.end(), 0.0);
        for (std::size_t n = 0; n < N; ++n) {
            const double pi = price(mu, n);
            const double eps = 1e-7 * std::max(std::abs(pi), 1e-300);
            const double lo = optimize_subcarrier(params(n, pi + eps), rule).power;
            const double hi = optimize_subcarrier(params(n, pi - eps), rule).power;
            if (std::abs(hi - lo) > 1e-3 * std::max(cur.power[n], cfg.total_power * 1e-9)) continue;  // jump
            const double sens = (hi - lo) / (2.0 * eps);  // -dp/dpi >= 0
            if (!(sens > 0.0)) continue;
            std::vector<double> a(m);
            a[0] = 1.0;
            for (std::size_t j = 0; j < K2; ++j) a[j + 1] = -slope[j * N + n];
            for (std::size_t r = 0; r < m; ++r)
                for (std::size_t c = 0; c < m; ++c) H[r * m + c] += sens * a[r] * a[c];
        }
        // Work in units of mu_scale for conditioning.
        std::vector<double> Hs(m * m, 0.0);
        std::size_t nf = 0;
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < m; ++i)
            if (free_var[i]) idx.push_back(i), ++nf;
        if (nf == 0) break;
        Hs.assign(nf * nf, 0.0);
        rhs.assign(nf, 0.0);
        double trace = 0.0;
        for (std::size_t r = 0; r < nf; ++r) {
            for (std::size_t c = 0; c < nf; ++c)
                Hs[r * nf + c] = H[idx[r] * m + idx[c]] * mu_scale[idx[r]] * mu_scale[idx[c]];
            trace += Hs[r * nf + r];
            rhs[r] = -cur.grad[idx[r]] * mu_scale[idx[r]];
        }
        for (std::size_t r = 0; r < nf; ++r) Hs[r * nf + r] += 1e-10 * trace + 1e-300;
        if (!detail::solve_dense(Hs, rhs, nf)) break;

        bool improved = false;
        for (double t = 1.0; t > 1e-6; t *= 0.5) {
            MultiplierVector trial = mu;
            for (std::size_t r = 0; r < nf; ++r)
                trial[idx[r]] = std::max(0.0, mu[idx[r]] + t * rhs[r] * mu_scale[idx[r]]);
            Eval e = evaluate(trial);
            if (e.g < cur.g - 1e-15 * std::abs(cur.g)) {
                mu = std::move(trial);
                cur = std::move(e);
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }

    for (std::size_t n = 0; n < N; ++n) st.set_power(n, cur.power[n]);
    enforce_power_budget(st);
    restore_harvest(st, 40 * N + 100);
    return st.feasible();
}

}  // namespace swipt
