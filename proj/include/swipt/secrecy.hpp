#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>

#include "matrix.hpp"
#include "model.hpp"

namespace swipt {

/// Power level [X]^+ below which the secrecy rate of a subcarrier is zero.
/// `unbounded` marks the case where no finite power makes it positive; the
/// sentinel never enters arithmetic as a floating-point infinity.
struct Threshold {
    double watts = 0.0;
    bool unbounded = false;

    static constexpr Threshold infinite() noexcept { return {0.0, true}; }
    static Threshold finite(double x) noexcept { return {std::max(x, 0.0), false}; }

    /// True when p lies in the zero-secrecy region 0 <= p <= [X]^+.
    bool covers(double p) const noexcept { return unbounded || p <= watts; }

    /// min([X]^+, cap)
    double capped(double cap) const noexcept { return unbounded ? cap : std::min(watts, cap); }

    bool operator==(const Threshold&) const = default;
};

namespace detail {
inline void require_noise(double sigma2) {
    if (!(sigma2 > 0.0)) throw std::domain_error("noise power must be > 0");
}
}  // namespace detail

/// log2(1 + (1-a) h p / s)
inline double info_rate(double h2, double p, double alpha, double sigma2) {
    detail::require_noise(sigma2);
    return std::log1p((1.0 - alpha) * h2 * p / sigma2) / std::numbers::ln2;
}

/// log2(1 + (1-a) b p / (s + a b p))
inline double eve_rate(double b2, double p, double alpha, double sigma2) {
    detail::require_noise(sigma2);
    return std::log1p((1.0 - alpha) * b2 * p / (sigma2 + alpha * b2 * p)) / std::numbers::ln2;
}

/// [r - r^e]^+ in bits/s/Hz.
///
/// Evaluated through the identity
///   (s + (1-a)hp)(s + abp) - s(s + bp) = p(1-a)[s(h-b) + a h b p],
/// so the sign of the rate difference is exact and matches threshold_x().
inline double secrecy_rate(double h2, double b2, double p, double alpha, double sigma2) {
    detail::require_noise(sigma2);
    const double excess = p * (1.0 - alpha) * (sigma2 * (h2 - b2) + alpha * h2 * b2 * p);
    if (!(excess > 0.0)) return 0.0;
    return std::log1p(excess / (sigma2 * (sigma2 + b2 * p))) / std::numbers::ln2;
}

/// [X]^+ with X = (s/a)(1/h - 1/b) for a fixed splitting ratio.
inline Threshold threshold_x(double h2, double b2, double alpha, double sigma2) {
    detail::require_noise(sigma2);
    if (h2 <= 0.0 && b2 <= 0.0) throw std::domain_error("threshold undefined when both gains are zero");
    if (alpha >= 1.0 || h2 <= 0.0) return Threshold::infinite();  // no information power or no channel
    if (b2 <= 0.0) return Threshold::finite(0.0);                  // nobody to eavesdrop
    if (alpha <= 0.0) return h2 > b2 ? Threshold::finite(0.0) : Threshold::infinite();
    return Threshold::finite(sigma2 / alpha * (1.0 / h2 - 1.0 / b2));
}

/// Zero-secrecy boundary when the splitting ratio is free: the alpha -> 1
/// limit of threshold_x, s (1/h - 1/b)^+.
inline Threshold joint_threshold(double h2, double b2, double sigma2) {
    detail::require_noise(sigma2);
    if (h2 <= 0.0) return Threshold::infinite();
    if (b2 <= 0.0) return Threshold::finite(0.0);
    return Threshold::finite(sigma2 * (1.0 / h2 - 1.0 / b2));
}

/// Per-IR, per-subcarrier decision variables.
struct Allocation {
    Matrix<double> power;       // K1 x N, watts
    Matrix<double> split;       // K1 x N, AN fraction in [0,1]
    Matrix<unsigned char> assign;  // K1 x N, 0/1

    static Allocation zeros(std::size_t irs, std::size_t subcarriers) {
        return {Matrix<double>(irs, subcarriers, 0.0), Matrix<double>(irs, subcarriers, 0.0),
                Matrix<unsigned char>(irs, subcarriers, 0)};
    }

    std::size_t num_irs() const noexcept { return power.rows(); }
    std::size_t num_subcarriers() const noexcept { return power.cols(); }

    /// Index of the IR holding subcarrier n, or num_irs() when unassigned.
    std::size_t owner(std::size_t n) const {
        for (std::size_t k = 0; k < num_irs(); ++k)
            if (assign(k, n)) return k;
        return num_irs();
    }

    /// Power transmitted on subcarrier n (by whichever IR holds it).
    double subcarrier_power(std::size_t n) const {
        double sum = 0.0;
        for (std::size_t k = 0; k < num_irs(); ++k)
            if (assign(k, n)) sum += power(k, n);
        return sum;
    }

    /// Checks exclusivity, power/assignment consistency and bounds.
    bool valid(double peak_power, double tol = 1e-12) const {
        for (std::size_t n = 0; n < num_subcarriers(); ++n) {
            int owners = 0;
            for (std::size_t k = 0; k < num_irs(); ++k) {
                owners += assign(k, n) ? 1 : 0;
                const double p = power(k, n);
                const double a = split(k, n);
                if (!(p >= 0.0) || p > peak_power * (1.0 + tol)) return false;
                if (p > 0.0 && !assign(k, n)) return false;
                if (!(a >= 0.0 && a <= 1.0)) return false;
            }
            if (owners > 1) return false;
        }
        return true;
    }
};

inline double total_power(const Allocation& alloc) {
    double sum = 0.0;
    for (std::size_t n = 0; n < alloc.num_subcarriers(); ++n) sum += alloc.subcarrier_power(n);
    return sum;
}

/// zeta * sum_n (sum_k x p) |h_{er,n}|^2
inline double harvested_power(std::span<const double> er_gains, double zeta, const Allocation& alloc) {
    if (er_gains.size() != alloc.num_subcarriers()) throw std::invalid_argument("gain row length mismatch");
    double sum = 0.0;
    for (std::size_t n = 0; n < er_gains.size(); ++n) sum += alloc.subcarrier_power(n) * er_gains[n];
    return zeta * sum;
}

inline std::vector<double> harvested_powers(const Instance& inst, const Allocation& alloc) {
    std::vector<double> q(inst.num_ers());
    for (std::size_t j = 0; j < q.size(); ++j)
        q[j] = harvested_power(inst.channels.er_row(j), inst.config.harvest_efficiency[j], alloc);
    return q;
}

/// sum_k w_k sum_n x_{k,n} R^s_{k,n}
inline double weighted_sum_rate(const Instance& inst, const Allocation& alloc) {
    const auto& ch = inst.channels;
    const double s2 = inst.config.noise_power;
    double sum = 0.0;
    for (std::size_t k = 0; k < alloc.num_irs(); ++k) {
        double rk = 0.0;
        for (std::size_t n = 0; n < alloc.num_subcarriers(); ++n) {
            if (!alloc.assign(k, n)) continue;
            rk += secrecy_rate(ch.ir_gain(k, n), ch.eve_gains(k, n), alloc.power(k, n), alloc.split(k, n), s2);
        }
        sum += inst.config.weights[k] * rk;
    }
    return sum;
}

}  // namespace swipt
