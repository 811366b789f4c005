// swipt: run single solves, Monte-Carlo sweeps, oracle verification and
// instance generation from a JSON config.
//
// Exit codes: 0 success, 1 verification failed or internal error,
// 2 config error, 3 infeasible, 4 a trial did not converge (with --strict).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "swipt/baselines.hpp"
#include "swipt/json_io.hpp"
#include "swipt/oracle.hpp"
#include "swipt/sweep.hpp"

using namespace swipt;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kConfig = 2, kInfeasible = 3, kNoConvergence = 4 };

struct Overrides {
    std::optional<std::size_t> subcarriers, irs, ers, max_iters, trials;
    std::optional<double> harvest_target_w, total_power_dbm;
    std::optional<std::uint64_t> seed;

    void add_to(CLI::App* app) {
        app->add_option("--subcarriers", subcarriers, "number of subcarriers N");
        app->add_option("--irs", irs, "number of information receivers");
        app->add_option("--ers", ers, "number of energy receivers");
        app->add_option("--harvest-target-w", harvest_target_w, "harvest target for every ER (W)");
        app->add_option("--total-power-dbm", total_power_dbm, "total transmit power (dBm)");
        app->add_option("--max-iters", max_iters, "subgradient iteration cap");
        app->add_option("--seed", seed, "channel seed (sweep: seed base)");
    }
};

struct Loaded {
    SystemConfig system;
    SolverSettings solver;
    json sweep = json::object();
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// Config file layout: {"system": {...}, "solver": {...}, "sweep": {...}},
/// every section optional.
Loaded load_config(const std::string& path, const Overrides& ov) {
    Loaded out;
    if (!path.empty()) {
        const json j = read_json_file(path);
        if (!j.is_object()) throw ConfigError("config root must be an object");
        for (const auto& [key, _] : j.items())
            if (key != "system" && key != "solver" && key != "sweep") throw ConfigError("unknown config section: " + key);
        if (j.contains("system")) out.system = config_from_json(j.at("system"));
        if (j.contains("solver")) out.solver = settings_from_json(j.at("solver"));
        if (j.contains("sweep")) out.sweep = j.at("sweep");
    }
    SystemConfig& c = out.system;
    if (ov.subcarriers) c.num_subcarriers = *ov.subcarriers;
    if (ov.irs || ov.ers) c.resize_receivers(ov.irs.value_or(c.num_irs), ov.ers.value_or(c.num_ers));
    if (ov.harvest_target_w) c.set_harvest_target(*ov.harvest_target_w);
    if (ov.total_power_dbm) {
        const bool tied = c.peak_power >= c.total_power;
        c.total_power = dbm_to_watts(*ov.total_power_dbm);
        c.peak_power = tied ? c.total_power : std::min(c.peak_power, c.total_power);
    }
    if (ov.seed) c.rng_seed = *ov.seed;
    if (ov.max_iters) out.solver.max_iters = static_cast<int>(*ov.max_iters);
    c.validate();
    try {
        out.solver.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

Scheme parse_scheme(const std::string& s) {
    try {
        return Scheme::parse(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

OracleGap oracle_gap(const Instance& inst, const SolveReport& rep, const GridSpec& grid) {
    OracleResult o;
    try {
        o = exhaustive_small(inst, grid);
    } catch (const OracleLimitExceeded& e) {
        throw ConfigError(std::string("--verify needs a tiny instance: ") + e.what());
    }
    OracleGap g{o.feasible, o.objective, 0.0};
    g.gap_rel = o.objective > 0.0 ? (o.objective - rep.objective) / o.objective : 0.0;
    return g;
}

SweepConfig sweep_config(const Loaded& l, const Overrides& ov) {
    SweepConfig sc;
    sc.base = l.system;
    sc.solver = l.solver;
    const json& j = l.sweep;
    try {
        if (j.contains("variable")) sc.sweep_variable = parse_sweep_variable(j.at("variable").get<std::string>());
        if (j.contains("values")) sc.sweep_values = j.at("values").get<std::vector<double>>();
        else if (sc.sweep_variable == SweepVariable::TotalPowerDbm) sc.sweep_values = {30.0, 33.0, 37.0, 40.0};
        if (j.contains("schemes")) sc.schemes = j.at("schemes").get<std::vector<std::string>>();
        if (j.contains("trials")) sc.trials = j.at("trials").get<std::size_t>();
        if (j.contains("seed_base")) sc.seed_base = j.at("seed_base").get<std::uint64_t>();
        for (const auto& [key, _] : j.items())
            if (key != "variable" && key != "values" && key != "schemes" && key != "trials" && key != "seed_base")
                throw ConfigError("unknown sweep key: " + key);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad sweep section: ") + e.what());
    }
    if (ov.seed) sc.seed_base = *ov.seed;
    if (ov.trials) sc.trials = *ov.trials;
    sc.validate();
    return sc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OFDMA SWIPT secrecy-rate solver"};
    app.require_subcommand(1);

    std::string config_path, scheme_name = "proposed", instance_in, instance_out, out_path, plot_path;
    bool verify = false, strict = false;
    std::size_t grid_p = 200, grid_alpha = 101;
    Overrides ov;

    auto* single = app.add_subcommand("single", "solve one instance and print the report as JSON");
    single->add_option("--config", config_path, "JSON config file");
    single->add_option("--scheme", scheme_name, "proposed | alpha:<v> | fsa | noan");
    single->add_option("--instance-in", instance_in, "read the instance from JSON instead of drawing it");
    single->add_option("--instance-out", instance_out, "write the solved instance as JSON");
    single->add_flag("--verify", verify, "compare against the exhaustive oracle (tiny instances)");
    single->add_flag("--strict", strict, "exit 4 if the dual loop did not converge");
    single->add_option("--out", out_path, "report path (default stdout)");
    single->add_option("--grid-p", grid_p, "oracle power levels")->check(CLI::Range(2, 1 << 20));
    single->add_option("--grid-alpha", grid_alpha, "oracle alpha levels")->check(CLI::Range(2, 1 << 20));
    ov.add_to(single);

    auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over Q or P_max, written as CSV");
    sweep->add_option("--config", config_path, "JSON config file");
    sweep->add_option("--out", out_path, "CSV path (default stdout)");
    sweep->add_option("--plot-script", plot_path, "also write a gnuplot script for the CSV");
    sweep->add_option("--trials", ov.trials, "channel draws per point");
    sweep->add_flag("--strict", strict, "exit 4 if any trial did not converge");
    ov.add_to(sweep);

    auto* verify_cmd = app.add_subcommand("verify", "check one instance against the brute-force oracles");
    verify_cmd->add_option("--config", config_path, "JSON config file");
    verify_cmd->add_option("--instance-in", instance_in, "read the instance from JSON");
    verify_cmd->add_option("--out", out_path, "report path (default stdout)");
    verify_cmd->add_option("--grid-p", grid_p, "oracle power levels")->check(CLI::Range(2, 1 << 20));
    verify_cmd->add_option("--grid-alpha", grid_alpha, "oracle alpha levels")->check(CLI::Range(2, 1 << 20));
    ov.add_to(verify_cmd);

    auto* gen = app.add_subcommand("gen-instance", "draw a channel realization and write it as JSON");
    gen->add_option("--config", config_path, "JSON config file");
    gen->add_option("--instance-out,--out", instance_out, "instance path (default stdout)");
    ov.add_to(gen);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        const Loaded cfg = load_config(config_path, ov);
        const GridSpec grid{grid_p, grid_alpha};

        if (*gen) {
            write_text(instance_out, to_json(make_instance(cfg.system)).dump(2) + "\n");
            return kOk;
        }

        const Instance inst = instance_in.empty() ? make_instance(cfg.system) : instance_from_json(read_json_file(instance_in));

        if (*single) {
            const Scheme scheme = parse_scheme(scheme_name);
            if (!instance_out.empty()) write_text(instance_out, to_json(inst).dump(2) + "\n");
            SolveReport rep;
            try {
                rep = run_scheme(inst, scheme, cfg.solver);
            } catch (const InfeasibleError& e) {
                std::cerr << "infeasible: " << e.what() << '\n';
                return kInfeasible;
            }
            std::optional<OracleGap> gap;
            if (verify) gap = oracle_gap(inst, rep, grid);
            write_text(out_path, to_json(rep, gap).dump(2) + "\n");
            if (!rep.feasible) return kInfeasible;
            if (strict && !rep.converged) return kNoConvergence;
            return kOk;
        }

        if (*verify_cmd) {
            SolveReport rep;
            try {
                rep = solve(inst, cfg.solver);
            } catch (const InfeasibleError& e) {
                std::cerr << "infeasible: " << e.what() << '\n';
                return kInfeasible;
            }
            const OracleGap gap = oracle_gap(inst, rep, grid);

            // Per-subcarrier closed form vs grid at the final multipliers.
            const auto om = omegas(inst, rep.duals);
            double worst = 0.0;
            for (std::size_t k = 0; k < inst.num_irs(); ++k)
                for (std::size_t n = 0; n < inst.num_subcarriers(); ++n) {
                    const auto sc = subcarrier_params(inst, k, n, om[n]);
                    const double closed = optimize_subcarrier(sc, SplitRule::joint()).value;
                    const double brute = grid_per_sc(sc, GridSpec{2000, 1001}).value;
                    worst = std::max(worst, (brute - closed) / std::max(std::abs(brute), 1e-300));
                }
            const double slack = 1e-6 * std::max(1.0, std::abs(rep.dual_value));
            const bool sandwich = !gap.feasible || gap.objective <= rep.dual_value + slack;
            const bool per_sc_ok = worst <= 1e-3;
            json out = {{"solver", to_json(rep, gap)},
                        {"checks",
                         {{"oracle_below_dual_value", sandwich},
                          {"per_sc_max_rel_shortfall", worst},
                          {"per_sc_within_1e-3", per_sc_ok}}}};
            out["solver"].erase("trace");
            write_text(out_path, out.dump(2) + "\n");
            return sandwich && per_sc_ok ? kOk : kVerifyFailed;
        }

        if (*sweep) {
            const SweepConfig sc = sweep_config(cfg, ov);
            const SweepResult res = run_sweep(sc);
            std::ostringstream csv;
            write_csv(csv, res);
            write_text(out_path, csv.str());
            if (!plot_path.empty()) {
                const std::string csv_name = out_path.empty() || out_path == "-" ? "sweep.csv" : out_path;
                write_text(plot_path, plot_script(res, sc.schemes, csv_name, csv_name + ".png"));
            }
            if (strict)
                for (const auto& r : res.rows)
                    if (!r.converged) return kNoConvergence;
            return kOk;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kVerifyFailed;
    }
    return kOk;
}
