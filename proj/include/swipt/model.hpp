#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "matrix.hpp"
#include "units.hpp"

namespace swipt {

/// Raised when a configuration violates its invariants.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Physical and geometric parameters of one downlink cell.
///
/// Receivers are indexed IRs first (0..num_irs-1), then ERs.
struct SystemConfig {
    std::size_t num_subcarriers = 64;
    std::size_t num_irs = 4;
    std::size_t num_ers = 4;

    double noise_power = dbm_to_watts(-83.0);  // per subcarrier
    double total_power = dbm_to_watts(37.0);
    double peak_power = dbm_to_watts(37.0);

    std::vector<double> weights = std::vector<double>(4, 1.0);
    std::vector<double> harvest_targets = std::vector<double>(4, 100e-6);
    std::vector<double> harvest_efficiency = std::vector<double>(4, 0.5);

    double cell_radius_m = 200.0;
    double er_radius_m = 2.0;
    double min_distance_m = 1.0;
    double pathloss_exponent = 3.0;
    double pathloss_ref_db = 30.0;

    std::uint64_t rng_seed = 1;

    std::size_t num_receivers() const noexcept { return num_irs + num_ers; }

    /// Resizes the per-receiver lists, filling new entries with the first
    /// existing value (or the defaults when empty).
    void resize_receivers(std::size_t irs, std::size_t ers) {
        auto refill = [](std::vector<double>& v, std::size_t n, double dflt) {
            const double fill = v.empty() ? dflt : v.front();
            v.resize(n, fill);
        };
        num_irs = irs;
        num_ers = ers;
        refill(weights, irs, 1.0);
        refill(harvest_targets, ers, 100e-6);
        refill(harvest_efficiency, ers, 0.5);
    }

    void set_harvest_target(double watts) { std::fill(harvest_targets.begin(), harvest_targets.end(), watts); }

    void validate() const {
        auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
        if (num_subcarriers < 1) throw ConfigError("num_subcarriers must be >= 1");
        if (num_irs < 1) throw ConfigError("num_irs must be >= 1");
        if (!positive(noise_power)) throw ConfigError("noise_power must be > 0");
        if (!positive(total_power)) throw ConfigError("total_power must be > 0");
        if (!positive(peak_power)) throw ConfigError("peak_power must be > 0");
        if (peak_power > total_power) throw ConfigError("peak_power must not exceed total_power");
        if (weights.size() != num_irs) throw ConfigError("weights must have num_irs entries");
        if (harvest_targets.size() != num_ers) throw ConfigError("harvest_targets must have num_ers entries");
        if (harvest_efficiency.size() != num_ers) throw ConfigError("harvest_efficiency must have num_ers entries");
        for (double w : weights)
            if (!positive(w)) throw ConfigError("weights must be > 0");
        for (double q : harvest_targets)
            if (!std::isfinite(q) || q < 0.0) throw ConfigError("harvest_targets must be >= 0");
        for (double z : harvest_efficiency)
            if (!(z > 0.0 && z < 1.0)) throw ConfigError("harvest_efficiency must lie in (0, 1)");
        if (!positive(min_distance_m)) throw ConfigError("min_distance_m must be > 0");
        if (!(cell_radius_m > min_distance_m)) throw ConfigError("cell_radius_m must exceed min_distance_m");
        if (num_ers > 0 && !(er_radius_m > min_distance_m)) throw ConfigError("er_radius_m must exceed min_distance_m");
        if (!positive(pathloss_exponent)) throw ConfigError("pathloss_exponent must be > 0");
        if (!std::isfinite(pathloss_ref_db)) throw ConfigError("pathloss_ref_db must be finite");
    }
};

/// Per-receiver, per-subcarrier linear power gains |h|^2 and the derived
/// "best eavesdropper" gains |beta|^2 for every IR.
struct ChannelRealization {
    Matrix<double> gains;      // K x N, IRs then ERs
    Matrix<double> eve_gains;  // K1 x N

    std::size_t num_subcarriers() const noexcept { return gains.cols(); }
    std::size_t num_irs() const noexcept { return eve_gains.rows(); }
    std::size_t num_ers() const noexcept { return gains.rows() - eve_gains.rows(); }

    double ir_gain(std::size_t k, std::size_t n) const { return gains(k, n); }
    double er_gain(std::size_t j, std::size_t n) const { return gains(num_irs() + j, n); }
    std::span<const double> er_row(std::size_t j) const { return gains.row(num_irs() + j); }
};

/// Entry (k, n) is the largest gain on subcarrier n among all receivers
/// other than k. The maximum over an empty set is 0.
inline Matrix<double> eavesdropper_gains(const Matrix<double>& gains, std::size_t num_irs) {
    const std::size_t K = gains.rows();
    const std::size_t N = gains.cols();
    if (num_irs > K) throw std::invalid_argument("num_irs exceeds receiver count");
    Matrix<double> eve(num_irs, N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        // Track the two largest gains so each exclusion is O(1).
        double best = 0.0, second = 0.0;
        std::size_t best_k = K;
        for (std::size_t k = 0; k < K; ++k) {
            const double g = gains(k, n);
            if (best_k == K || g > best) {
                second = best_k == K ? 0.0 : best;
                best = g;
                best_k = k;
            } else if (g > second) {
                second = g;
            }
        }
        for (std::size_t k = 0; k < num_irs; ++k) eve(k, n) = (k == best_k) ? second : best;
    }
    return eve;
}

inline double pathloss_gain(const SystemConfig& cfg, double distance_m) {
    const double loss_db = cfg.pathloss_ref_db + 10.0 * cfg.pathloss_exponent * std::log10(distance_m);
    return std::pow(10.0, -loss_db / 10.0);
}

/// Draws receiver distances and Rayleigh (exponential power) fades.
/// Deterministic for a given rng_seed on a given standard library.
inline ChannelRealization generate_channels(const SystemConfig& cfg) {
    cfg.validate();
    const std::size_t K = cfg.num_receivers();
    const std::size_t N = cfg.num_subcarriers;

    std::mt19937_64 rng(cfg.rng_seed);
    std::vector<double> mean_gain(K);
    std::uniform_real_distribution<double> ir_dist(cfg.min_distance_m, cfg.cell_radius_m);
    for (std::size_t k = 0; k < cfg.num_irs; ++k) mean_gain[k] = pathloss_gain(cfg, ir_dist(rng));
    if (cfg.num_ers > 0) {
        std::uniform_real_distribution<double> er_dist(cfg.min_distance_m, cfg.er_radius_m);
        for (std::size_t k = cfg.num_irs; k < K; ++k) mean_gain[k] = pathloss_gain(cfg, er_dist(rng));
    }

    ChannelRealization ch;
    ch.gains = Matrix<double>(K, N);
    std::exponential_distribution<double> fade(1.0);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t n = 0; n < N; ++n) ch.gains(k, n) = mean_gain[k] * fade(rng);
    ch.eve_gains = eavesdropper_gains(ch.gains, cfg.num_irs);
    return ch;
}

/// A configuration together with one channel realization.
struct Instance {
    SystemConfig config;
    ChannelRealization channels;

    std::size_t num_subcarriers() const noexcept { return config.num_subcarriers; }
    std::size_t num_irs() const noexcept { return config.num_irs; }
    std::size_t num_ers() const noexcept { return config.num_ers; }

    /// Checks that the channel matrices match the configuration.
    void validate() const {
        config.validate();
        const auto& g = channels.gains;
        if (g.rows() != config.num_receivers() || g.cols() != config.num_subcarriers)
            throw ConfigError("gains shape does not match config");
        if (channels.eve_gains.rows() != config.num_irs || channels.eve_gains.cols() != config.num_subcarriers)
            throw ConfigError("eve_gains shape does not match config");
        for (double x : g.values())
            if (!std::isfinite(x) || x < 0.0) throw ConfigError("gains must be finite and >= 0");
        for (double x : channels.eve_gains.values())
            if (!std::isfinite(x) || x < 0.0) throw ConfigError("eve_gains must be finite and >= 0");
    }
};

inline Instance make_instance(const SystemConfig& cfg) { return Instance{cfg, generate_channels(cfg)}; }

}  // namespace swipt
