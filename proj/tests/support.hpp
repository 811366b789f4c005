#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "swipt/model.hpp"
#include "swipt/per_sc.hpp"

namespace swipt::testing {

/// Per-subcarrier parameters at the magnitudes of the default cell: IR gains
/// from 1 m to 200 m, eavesdropper gains from either an ER at 1-2 m or
/// another IR, multipliers comparable to the marginal rate per watt.
inline SubcarrierParams random_subcarrier(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::exponential_distribution<double> fade(1.0);
    SystemConfig cfg;
    auto gain_at = [&](double lo, double hi) { return pathloss_gain(cfg, lo + (hi - lo) * u(rng)) * fade(rng); };

    SubcarrierParams sc;
    sc.sigma2 = cfg.noise_power * std::pow(10.0, 2.0 * u(rng) - 1.0);
    sc.peak_power = cfg.total_power * std::pow(10.0, -2.0 * u(rng));
    sc.h2 = gain_at(1.0, 200.0);
    sc.b2 = u(rng) < 0.5 ? gain_at(1.0, 2.0) : gain_at(1.0, 200.0);
    sc.weight = 0.5 + 1.5 * u(rng);
    const double marginal = sc.weight / (std::numbers::ln2 * sc.peak_power);
    const double sign = u(rng) < 0.7 ? -1.0 : 1.0;
    sc.omega = sign * marginal * std::pow(10.0, 4.0 * u(rng) - 2.0);
    return sc;
}

/// Unclamped w (r - r^e) + Omega p, the smooth function the stationarity
/// polynomials differentiate.
inline double smooth_lagrangian(const SubcarrierParams& sc, double p, double a) {
    const double r = std::log1p((1.0 - a) * sc.h2 * p / sc.sigma2);
    const double re = std::log1p((1.0 - a) * sc.b2 * p / (sc.sigma2 + a * sc.b2 * p));
    return sc.weight * (r - re) / std::numbers::ln2 + sc.omega * p;
}

/// Magnitude of the individual terms of dL/dp, for relative tolerances.
inline double dp_scale(const SubcarrierParams& sc, double p, double a) {
    const double s = sc.sigma2, h = sc.h2, b = sc.b2;
    const double dr = (1.0 - a) * h / (s + (1.0 - a) * h * p);
    const double dre = s * (1.0 - a) * b / ((s + a * b * p) * (s + b * p));
    return sc.weight * (std::abs(dr) + std::abs(dre)) / std::numbers::ln2 + std::abs(sc.omega);
}

inline double da_scale(const SubcarrierParams& sc, double p, double a) {
    const double s = sc.sigma2, h = sc.h2, b = sc.b2;
    const double dr = h * p / (s + (1.0 - a) * h * p);
    const double dre = b * p * (s + b * p) / ((s + a * b * p) * (s + b * p));
    return sc.weight * (std::abs(dr) + std::abs(dre)) / std::numbers::ln2;
}

inline double central_dp(const SubcarrierParams& sc, double p, double a) {
    const double d = 1e-6 * p;
    return (smooth_lagrangian(sc, p + d, a) - smooth_lagrangian(sc, p - d, a)) / (2.0 * d);
}

inline double central_da(const SubcarrierParams& sc, double p, double a) {
    const double d = 1e-6 * std::min(a, 1.0 - a);
    return (smooth_lagrangian(sc, p, a + d) - smooth_lagrangian(sc, p, a - d)) / (2.0 * d);
}

}  // namespace swipt::testing
