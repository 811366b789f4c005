// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "swipt/baselines.hpp"
#include "swipt/json_io.hpp"
#include "swipt/oracle.hpp"
#include "swipt/sweep.hpp"

using namespace swipt;
using namespace swipt::testing;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string format(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// 1. Closed-form per-SC maximizer against a 2000 x 1001 lattice.
Outcome per_sc_optimality() {
    std::mt19937_64 rng(1001);
    const GridSpec grid{2000, 1001};
    int bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const SubcarrierParams sc = random_subcarrier(rng);
        const double closed = optimize_subcarrier(sc, SplitRule::joint()).value;
        const double brute = grid_per_sc(sc, grid).value;
        const double scale = std::max({std::abs(closed), std::abs(brute), 1e-300});
        const double rel = std::abs(closed - brute) / scale;
        worst = std::max(worst, rel);
        if (rel > 1e-3 && std::abs(closed - brute) > 1e-12) ++bad;
    }
    return {bad == 0, format("1000 draws, worst relative gap %.3g, %d outside 1e-3", worst, bad)};
}

// 2. Finite-difference stationarity of every interior closed-form point.
Outcome stationarity() {
    std::mt19937_64 rng(1002);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    long checked = 0, bad = 0;
    auto check = [&](double fd, double scale) {
        ++checked;
        if (!(std::abs(fd) <= 1e-5 * scale)) ++bad;
    };
    for (int i = 0; i < 10000; ++i) {
        const SubcarrierParams sc = random_subcarrier(rng);
        // Fixed-ratio power stationarity.
        const double a = 0.999 * u(rng);
        const Threshold x = threshold_x(sc.h2, sc.b2, a, sc.sigma2);
        for (double r : real_roots_cubic(cubic_coeffs(sc.h2, sc.b2, a, sc.weight, sc.omega, sc.sigma2).rescaled(sc.peak_power))) {
            const double p = r * sc.peak_power;
            if (p > 0.0 && p < sc.peak_power && !x.covers(p)) check(central_dp(sc, p, a), dp_scale(sc, p, a));
        }
        // Joint stationarity of the alpha-eliminated roots.
        for (double r : real_roots_quadratic(quadratic_coeffs(sc.h2, sc.b2, sc.weight, sc.omega, sc.sigma2).rescaled(sc.peak_power))) {
            const double p = r * sc.peak_power;
            if (!(p > 0.0 && p < sc.peak_power)) continue;
            const double as = alpha_star_unclamped(sc.h2, sc.b2, p, sc.sigma2);
            if (!(as > 1e-6 && as < 1.0 - 1e-6)) continue;
            check(central_dp(sc, p, as), dp_scale(sc, p, as));
            check(central_da(sc, p, as), da_scale(sc, p, as));
        }
        // Ratio stationarity of alpha*(p) at an arbitrary power.
        const double p = sc.peak_power * std::pow(10.0, -3.0 * u(rng));
        const double as = alpha_star_unclamped(sc.h2, sc.b2, p, sc.sigma2);
        if (as > 1e-6 && as < 1.0 - 1e-6) check(central_da(sc, p, as), da_scale(sc, p, as));
    }
    return {bad == 0 && checked > 1000, format("%ld interior points checked, %ld above 1e-5", checked, bad)};
}

// 3. The secrecy rate is positive exactly above the threshold.
Outcome sign_classification() {
    std::mt19937_64 rng(1003);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
        const double h = std::pow(10.0, 8.0 * u(rng) - 4.0), b = std::pow(10.0, 8.0 * u(rng) - 4.0);
        const double a = i % 10 == 0 ? 0.0 : (i % 10 == 1 ? 1.0 : u(rng));
        const double s = std::pow(10.0, 4.0 * u(rng) - 2.0), p = std::pow(10.0, 8.0 * u(rng) - 4.0);
        const Threshold x = threshold_x(h, b, a, s);
        const bool positive = !x.unbounded && p > x.watts;
        const double r = secrecy_rate(h, b, p, a, s);
        // Rate difference in extended precision decides near-boundary ties.
        const long double lh = h, lb = b, la = a, ls = s, lp = p;
        const long double direct = std::log2(1.0L + (1.0L - la) * lh * lp / ls) -
                                   std::log2(1.0L + (1.0L - la) * lb * lp / (ls + la * lb * lp));
        if (positive && r <= 0.0 && direct > 1e-12L) ++bad;
        if (!positive && r > 1e-12) ++bad;
    }
    return {bad == 0, format("10000 samples, %d misclassified", bad)};
}

Instance small_instance(std::uint64_t seed) {
    SystemConfig cfg;
    cfg.num_subcarriers = 4;
    cfg.resize_receivers(2, 1);
    cfg.rng_seed = seed;
    return make_instance(cfg);
}

// 4. Duality sandwich on tiny instances.
Outcome duality_sandwich() {
    int bound_ok = 0, close = 0, feasible = 0;
    double worst = 1.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Instance inst = small_instance(4000 + seed);
        const OracleResult o = exhaustive_small(inst, GridSpec{200, 101});
        SolveReport r;
        try {
            r = solve(inst);
        } catch (const InfeasibleError&) {
            if (!o.feasible) ++bound_ok, ++close;
            continue;
        }
        if (!o.feasible) {
            ++bound_ok, ++close;
            continue;
        }
        ++feasible;
        if (o.objective <= r.dual_value * (1.0 + 1e-9)) ++bound_ok;
        const double ratio = o.objective > 0.0 ? r.objective / o.objective : 1.0;
        worst = std::min(worst, ratio);
        if (ratio >= 0.9) ++close;
    }
    return {bound_ok == 20 && close >= 18,
            format("oracle <= dual on %d/20, solve >= 0.9 oracle on %d/20 (worst ratio %.4f, %d feasible)", bound_ok,
                   close, worst, feasible)};
}

using Curve = std::map<std::string, std::vector<SweepAggregate>>;

Curve curves(const SweepResult& res) {
    Curve c;
    for (const auto& a : res.aggregates) c[a.scheme].push_back(a);
    return c;
}

// 5. Harvest-target sweep.
Outcome harvest_sweep(std::size_t workers) {
    SweepConfig cfg;
    cfg.trials = 100;
    cfg.seed_base = 5005;
    const Curve c = curves(run_sweep(cfg, workers));
    const auto &prop = c.at("proposed"), &a5 = c.at("alpha:0.5"), &a2 = c.at("alpha:0.2"), &fsa = c.at("fsa"),
               &noan = c.at("noan");
    bool mono = true, noan_small = true, order = true;
    std::string curve;
    for (std::size_t i = 0; i < prop.size(); ++i) {
        if (i > 0 && prop[i].objective_mean > prop[i - 1].objective_mean +
                                                   std::max(prop[i].objective_stderr, prop[i - 1].objective_stderr))
            mono = false;
        if (!(noan[i].objective_mean < 0.01 * prop[i].objective_mean)) noan_small = false;
        auto geq = [](const SweepAggregate& x, const SweepAggregate& y) {
            return x.objective_mean >= y.objective_mean - std::max(x.objective_stderr, y.objective_stderr);
        };
        if (!geq(prop[i], a5[i]) || !geq(a5[i], a2[i]) || !geq(prop[i], fsa[i])) order = false;
        curve += format(" %.0fuW:%.2f/%.2f/%.2f/%.2f/%.4f", prop[i].sweep_value * 1e6, prop[i].objective_mean,
                        a5[i].objective_mean, a2[i].objective_mean, fsa[i].objective_mean, noan[i].objective_mean);
    }
    return {mono && noan_small && order,
            format("nonincreasing=%d noan<1%%=%d ordering=%d; proposed/a0.5/a0.2/fsa/noan:", mono, noan_small, order) +
                curve};
}

// 6. Total-power sweep.
Outcome power_sweep(std::size_t workers) {
    SweepConfig cfg;
    cfg.trials = 100;
    cfg.seed_base = 6006;
    cfg.sweep_variable = SweepVariable::TotalPowerDbm;
    cfg.sweep_values = {30.0, 33.0, 37.0, 40.0};
    cfg.base.set_harvest_target(100e-6);
    const Curve c = curves(run_sweep(cfg, workers));
    const auto& prop = c.at("proposed");
    bool mono = true, best = true;
    std::string curve;
    for (std::size_t i = 0; i < prop.size(); ++i) {
        if (i > 0 && prop[i].objective_mean < prop[i - 1].objective_mean -
                                                   std::max(prop[i].objective_stderr, prop[i - 1].objective_stderr))
            mono = false;
        for (const auto& [name, other] : c)
            if (name != "proposed" && other[i].objective_mean > prop[i].objective_mean + 1e-6) best = false;
        curve += format(" %.0fdBm:%.2f", prop[i].sweep_value, prop[i].objective_mean);
    }
    return {mono && best, format("nondecreasing=%d maximal=%d; proposed:", mono, best) + curve};
}

// 7. Proposed never loses to a benchmark on the same instance.
Outcome dominance() {
    int violations = 0, compared = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        SystemConfig cfg;
        cfg.rng_seed = 7000 + seed;
        const Instance inst = make_instance(cfg);
        SolveReport p;
        try {
            p = solve(inst);
        } catch (const InfeasibleError&) {
            continue;
        }
        if (!p.feasible) continue;
        for (const char* s : {"alpha:0.5", "alpha:0.2", "fsa", "noan"}) {
            const SolveReport b = run_scheme(inst, Scheme::parse(s));
            if (!b.feasible) continue;
            ++compared;
            worst = std::max(worst, b.objective - p.objective);
            if (p.objective < b.objective - 1e-6) ++violations;
        }
    }
    return {violations == 0, format("%d comparisons, %d violations, worst shortfall %.3g", compared, violations, worst)};
}

// 8. Byte-identical outputs across repeated runs and worker counts.
Outcome determinism() {
    SweepConfig cfg;
    cfg.base.num_subcarriers = 16;
    cfg.base.resize_receivers(3, 2);
    cfg.trials = 4;
    cfg.sweep_values = {50e-6, 200e-6};
    auto csv = [&](std::size_t workers) {
        std::ostringstream os;
        write_csv(os, run_sweep(cfg, workers));
        return os.str();
    };
    auto report = [] {
        SystemConfig c;
        c.rng_seed = 8008;
        const Instance inst = make_instance(c);
        return to_json(inst).dump(2) + to_json(solve(inst)).dump(2);
    };
    const std::string a = csv(1), b = csv(1), c = csv(3);
    const std::string r1 = report(), r2 = report();
    const bool ok = a == b && a == c && r1 == r2;
    return {ok, format("sweep CSV repeat=%d workers=%d, JSON report repeat=%d", a == b, a == c, r1 == r2)};
}

}  // namespace

int main() {
    std::size_t workers = 1;
    try {
        workers = default_workers();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"per-subcarrier optimality", per_sc_optimality},
        {"closed-form stationarity", stationarity},
        {"secrecy sign classification", sign_classification},
        {"small-instance duality sandwich", duality_sandwich},
        {"harvest-target sweep shape", [&] { return harvest_sweep(workers); }},
        {"total-power sweep shape", [&] { return power_sweep(workers); }},
        {"dominance over benchmarks", dominance},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}
