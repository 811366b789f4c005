#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "baselines.hpp"
#include "model.hpp"

namespace swipt {

enum class SweepVariable { HarvestTargetW, TotalPowerDbm };

inline const char* to_string(SweepVariable v) {
    return v == SweepVariable::HarvestTargetW ? "harvest_target_w" : "total_power_dbm";
}

inline SweepVariable parse_sweep_variable(const std::string& s) {
    if (s == "harvest_target_w") return SweepVariable::HarvestTargetW;
    if (s == "total_power_dbm") return SweepVariable::TotalPowerDbm;
    throw ConfigError("unknown sweep variable: " + s);
}

struct SweepConfig {
    SystemConfig base;
    SolverSettings solver;
    SweepVariable sweep_variable = SweepVariable::HarvestTargetW;
    std::vector<double> sweep_values{10e-6, 50e-6, 100e-6, 200e-6, 500e-6};
    std::vector<std::string> schemes{"proposed", "alpha:0.5", "alpha:0.2", "fsa", "noan"};
    std::size_t trials = 100;
    std::uint64_t seed_base = 1;

    void validate() const {
        base.validate();
        if (sweep_values.empty()) throw ConfigError("sweep_values must be non-empty");
        if (!std::is_sorted(sweep_values.begin(), sweep_values.end())) throw ConfigError("sweep_values must be sorted");
        if (trials < 1) throw ConfigError("trials must be >= 1");
        if (schemes.empty()) throw ConfigError("schemes must be non-empty");
        for (const auto& s : schemes) {
            try {
                Scheme::parse(s);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
        for (double v : sweep_values) point_config(v).validate();
    }

    /// The base configuration with the swept field set to `value`. P_peak
    /// tracks P_max unless it was below it in the base.
    SystemConfig point_config(double value) const {
        SystemConfig c = base;
        if (sweep_variable == SweepVariable::HarvestTargetW) {
            c.set_harvest_target(value);
        } else {
            const bool tied = base.peak_power >= base.total_power;
            c.total_power = dbm_to_watts(value);
            c.peak_power = tied ? c.total_power : std::min(base.peak_power, c.total_power);
        }
        return c;
    }
};

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Channel seed of one trial. Independent of the sweep point, so every
/// point and scheme sees the same draws (common random numbers).
inline std::uint64_t trial_seed(std::uint64_t seed_base, std::size_t trial) {
    return seed_base ^ mix64(static_cast<std::uint64_t>(trial));
}

struct SweepRow {
    double sweep_value = 0.0;
    std::string scheme;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double objective = 0.0;       // 0 unless a feasible allocation was found
    double min_harvest_w = 0.0;
    double total_power_w = 0.0;
    int iterations = 0;
    double duality_gap_rel = 0.0;
    bool feasible = false;
    bool converged = false;
    std::string status;           // converged | max_iters | infeasible | error:<msg>
};

struct SweepAggregate {
    double sweep_value = 0.0;
    std::string scheme;
    std::size_t trials = 0;
    double objective_mean = 0.0;
    double objective_stderr = 0.0;
    double min_harvest_mean = 0.0;
    double total_power_mean = 0.0;
    double iterations_mean = 0.0;
    double duality_gap_mean = 0.0;  // over feasible trials; NaN when none
    double feasible_fraction = 0.0;
    std::size_t failures = 0;       // infeasible or errored trials
};

struct SweepResult {
    SweepVariable variable = SweepVariable::HarvestTargetW;
    std::vector<SweepRow> rows;  // (value, scheme, trial) order
    std::vector<SweepAggregate> aggregates;  // (value, scheme) order
};

inline std::size_t default_workers() {
    if (const char* env = std::getenv("SWIPT_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
        throw ConfigError("SWIPT_WORKERS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline SweepRow run_trial(const SweepConfig& cfg, double value, const std::string& scheme, std::size_t trial) {
    SweepRow row;
    row.sweep_value = value;
    row.scheme = scheme;
    row.trial = trial;
    row.seed = trial_seed(cfg.seed_base, trial);
    try {
        SystemConfig c = cfg.point_config(value);
        c.rng_seed = row.seed;
        const Instance inst = make_instance(c);
        const SolveReport rep = run_scheme(inst, Scheme::parse(scheme), cfg.solver);
        row.iterations = rep.iterations;
        row.converged = rep.converged;
        row.feasible = rep.feasible;
        row.total_power_w = rep.total_power;
        row.min_harvest_w = rep.harvested.empty() ? 0.0 : *std::min_element(rep.harvested.begin(), rep.harvested.end());
        if (rep.feasible) {
            row.objective = rep.objective;
            row.duality_gap_rel = rep.duality_gap_rel;
            row.status = rep.converged ? "converged" : "max_iters";
        } else {
            row.status = "infeasible";
        }
    } catch (const InfeasibleError&) {
        row.status = "infeasible";
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace_if(msg.begin(), msg.end(), [](char ch) { return ch == ',' || ch == '\n' || ch == '"'; }, ' ');
        row.status = "error:" + msg;
    }
    return row;
}

inline SweepAggregate aggregate(std::span<const SweepRow> rows) {
    SweepAggregate a;
    a.sweep_value = rows.front().sweep_value;
    a.scheme = rows.front().scheme;
    a.trials = rows.size();
    const double n = static_cast<double>(rows.size());
    std::size_t feasible = 0;
    double gap = 0.0;
    for (const auto& r : rows) {
        a.objective_mean += r.objective;
        a.min_harvest_mean += r.min_harvest_w;
        a.total_power_mean += r.total_power_w;
        a.iterations_mean += r.iterations;
        if (r.feasible) {
            ++feasible;
            gap += r.duality_gap_rel;
        } else {
            ++a.failures;
        }
    }
    a.objective_mean /= n;
    a.min_harvest_mean /= n;
    a.total_power_mean /= n;
    a.iterations_mean /= n;
    a.feasible_fraction = static_cast<double>(feasible) / n;
    a.duality_gap_mean = feasible ? gap / static_cast<double>(feasible) : std::nan("");
    if (rows.size() > 1) {
        double ss = 0.0;
        for (const auto& r : rows) ss += (r.objective - a.objective_mean) * (r.objective - a.objective_mean);
        a.objective_stderr = std::sqrt(ss / (n - 1.0) / n);
    }
    return a;
}

/// Runs every (value, scheme, trial) task on a worker pool. Results are
/// stored by task index, so output order never depends on scheduling.
inline SweepResult run_sweep(const SweepConfig& cfg, std::size_t workers = default_workers()) {
    cfg.validate();
    const std::size_t S = cfg.schemes.size(), T = cfg.trials;
    const std::size_t total = cfg.sweep_values.size() * S * T;

    SweepResult out;
    out.variable = cfg.sweep_variable;
    out.rows.resize(total);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < total;) {
            const std::size_t v = i / (S * T), s = (i / T) % S, t = i % T;
            out.rows[i] = run_trial(cfg, cfg.sweep_values[v], cfg.schemes[s], t);
        }
    };
    workers = std::clamp<std::size_t>(workers, 1, total);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    for (std::size_t g = 0; g < total / T; ++g)
        out.aggregates.push_back(aggregate(std::span<const SweepRow>(out.rows).subspan(g * T, T)));
    return out;
}

inline constexpr const char* kCsvHeader =
    "sweep_variable,sweep_value,scheme,trial,seed,objective_bps_hz,min_harvest_w,total_power_w,iterations,"
    "duality_gap_rel,feasible,status,objective_stderr";

namespace detail {

inline std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace detail

/// Detail rows for each (value, scheme) group followed by its aggregate
/// row (trial = "aggregate", means in the numeric columns, the feasible
/// fraction in "feasible", the failure count in "status").
inline void write_csv(std::ostream& os, const SweepResult& res) {
    using detail::fmt;
    const char* var = to_string(res.variable);
    os << kCsvHeader << '\n';
    const std::size_t T = res.aggregates.empty() ? 0 : res.rows.size() / res.aggregates.size();
    for (std::size_t g = 0; g < res.aggregates.size(); ++g) {
        for (std::size_t t = 0; t < T; ++t) {
            const SweepRow& r = res.rows[g * T + t];
            os << var << ',' << fmt(r.sweep_value) << ',' << r.scheme << ',' << r.trial << ',' << r.seed << ','
               << fmt(r.objective) << ',' << fmt(r.min_harvest_w) << ',' << fmt(r.total_power_w) << ','
               << r.iterations << ',' << fmt(r.duality_gap_rel) << ',' << (r.feasible ? 1 : 0) << ',' << r.status
               << ",\n";
        }
        const SweepAggregate& a = res.aggregates[g];
        os << var << ',' << fmt(a.sweep_value) << ',' << a.scheme << ",aggregate,," << fmt(a.objective_mean) << ','
           << fmt(a.min_harvest_mean) << ',' << fmt(a.total_power_mean) << ',' << fmt(a.iterations_mean) << ','
           << fmt(a.duality_gap_mean) << ',' << fmt(a.feasible_fraction) << ",failures=" << a.failures << ','
           << fmt(a.objective_stderr) << '\n';
    }
}

/// Gnuplot script drawing the aggregate curves with stderr bars.
inline std::string plot_script(const SweepResult& res, const std::vector<std::string>& schemes,
                               const std::string& csv_path, const std::string& image_path = "sweep.png") {
    const bool harvest = res.variable == SweepVariable::HarvestTargetW;
    std::string s;
    s += "set datafile separator ','\n";
    s += "set terminal pngcairo size 900,600\n";
    s += "set output '" + image_path + "'\n";
    s += harvest ? "set xlabel 'harvest target (uW)'\n" : "set xlabel 'total power (dBm)'\n";
    s += "set ylabel 'weighted sum secrecy rate (bps/Hz)'\n";
    s += "set key outside right\nset grid\n";
    const std::string x = harvest ? "($2*1e6)" : "2";
    s += "plot ";
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        if (i) s += ", \\\n     ";
        s += "\"< awk -F, '$4==\\\"aggregate\\\" && $3==\\\"" + schemes[i] + "\\\"' " + csv_path + "\" using " + x +
             ":6:13 with yerrorlines title '" + schemes[i] + "'";
    }
    s += "\n";
    return s;
}

}  // namespace swipt
