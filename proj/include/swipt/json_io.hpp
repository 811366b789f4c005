#pragma once

// JSON forms of configs, instances and solve reports. Powers are stored in
// watts so instances round-trip exactly; "*_dbm" keys are accepted on input.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dual_solver.hpp"
#include "model.hpp"

namespace swipt {

using json = nlohmann::json;

namespace detail {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

/// Power in watts from either "<base>_w" or "<base>_dbm".
inline void read_power(const json& j, const std::string& base, double& out) {
    const std::string w = base + "_w", dbm = base + "_dbm";
    if (j.contains(w) && j.contains(dbm)) throw ConfigError("both " + w + " and " + dbm + " given");
    if (j.contains(w)) out = j.at(w).get<double>();
    if (j.contains(dbm)) out = dbm_to_watts(j.at(dbm).get<double>());
}

/// A per-receiver list given either as a list or as one scalar for all.
inline void read_list(const json& j, const char* key, std::vector<double>& out, std::size_t n) {
    if (!j.contains(key)) return;
    const json& v = j.at(key);
    if (v.is_number()) {
        out.assign(n, v.get<double>());
    } else {
        out = v.get<std::vector<double>>();
    }
}

inline json matrix_to_json(const Matrix<double>& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return rows;
}

inline Matrix<double> matrix_from_json(const json& j, const char* what) {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    const std::size_t R = rows.size(), C = R ? rows.front().size() : 0;
    Matrix<double> m(R, C);
    for (std::size_t r = 0; r < R; ++r) {
        if (rows[r].size() != C) throw ConfigError(std::string(what) + " rows have unequal lengths");
        for (std::size_t c = 0; c < C; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

/// NaN and infinities become null.
inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace detail

inline json to_json(const SystemConfig& c) {
    return {
        {"num_subcarriers", c.num_subcarriers},
        {"num_irs", c.num_irs},
        {"num_ers", c.num_ers},
        {"noise_power_w", c.noise_power},
        {"total_power_w", c.total_power},
        {"peak_power_w", c.peak_power},
        {"weights", c.weights},
        {"harvest_targets_w", c.harvest_targets},
        {"harvest_efficiency", c.harvest_efficiency},
        {"cell_radius_m", c.cell_radius_m},
        {"er_radius_m", c.er_radius_m},
        {"min_distance_m", c.min_distance_m},
        {"pathloss_exponent", c.pathloss_exponent},
        {"pathloss_ref_db", c.pathloss_ref_db},
        {"seed", c.rng_seed},
    };
}

/// Overlays the keys present in `j` onto `base`. Changing num_irs / num_ers
/// resizes the per-receiver lists before explicit lists are applied.
inline SystemConfig config_from_json(const json& j, SystemConfig base = {}) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        std::size_t irs = base.num_irs, ers = base.num_ers;
        detail::read_if(j, "num_subcarriers", base.num_subcarriers);
        detail::read_if(j, "num_irs", irs);
        detail::read_if(j, "num_ers", ers);
        base.resize_receivers(irs, ers);
        detail::read_power(j, "noise_power", base.noise_power);
        detail::read_power(j, "total_power", base.total_power);
        const bool peak_given = j.contains("peak_power_w") || j.contains("peak_power_dbm");
        detail::read_power(j, "peak_power", base.peak_power);
        // The per-SC cap follows P_max unless set explicitly.
        if (!peak_given && (j.contains("total_power_w") || j.contains("total_power_dbm")))
            base.peak_power = base.total_power;
        detail::read_list(j, "weights", base.weights, irs);
        detail::read_list(j, "harvest_targets_w", base.harvest_targets, ers);
        detail::read_list(j, "harvest_efficiency", base.harvest_efficiency, ers);
        detail::read_if(j, "cell_radius_m", base.cell_radius_m);
        detail::read_if(j, "er_radius_m", base.er_radius_m);
        detail::read_if(j, "min_distance_m", base.min_distance_m);
        detail::read_if(j, "pathloss_exponent", base.pathloss_exponent);
        detail::read_if(j, "pathloss_ref_db", base.pathloss_ref_db);
        detail::read_if(j, "seed", base.rng_seed);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
    base.validate();
    return base;
}

inline json to_json(const SolverSettings& s) {
    return {{"max_iters", s.max_iters},         {"lambda_step0", s.lambda_step0},
            {"gamma_step0", s.gamma_step0},     {"step_decay", s.step_decay},
            {"init_fraction", s.init_fraction}, {"tol_dual", s.tol_dual},
            {"tol_feas", s.tol_feas},           {"candidate_dedup_tol", s.candidate_dedup_tol},
            {"polish", s.polish}};
}

inline SolverSettings settings_from_json(const json& j, SolverSettings s = {}) {
    if (!j.is_object()) throw ConfigError("solver settings must be a JSON object");
    try {
        detail::read_if(j, "max_iters", s.max_iters);
        detail::read_if(j, "lambda_step0", s.lambda_step0);
        detail::read_if(j, "gamma_step0", s.gamma_step0);
        detail::read_if(j, "step_decay", s.step_decay);
        detail::read_if(j, "init_fraction", s.init_fraction);
        detail::read_if(j, "tol_dual", s.tol_dual);
        detail::read_if(j, "tol_feas", s.tol_feas);
        detail::read_if(j, "candidate_dedup_tol", s.candidate_dedup_tol);
        detail::read_if(j, "polish", s.polish);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad solver setting: ") + e.what());
    }
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

inline json to_json(const Instance& inst) {
    return {{"config", to_json(inst.config)},
            {"gains", detail::matrix_to_json(inst.channels.gains)},
            {"eve_gains", detail::matrix_to_json(inst.channels.eve_gains)}};
}

/// Reads an instance; eve_gains is recomputed when absent and checked
/// against the max rule when present.
inline Instance instance_from_json(const json& j) {
    if (!j.is_object() || !j.contains("gains")) throw ConfigError("instance JSON needs a \"gains\" matrix");
    Instance inst;
    inst.config = config_from_json(j.value("config", json::object()));
    try {
        inst.channels.gains = detail::matrix_from_json(j.at("gains"), "gains");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad gains: ") + e.what());
    }
    if (inst.channels.gains.rows() != inst.config.num_receivers() ||
        inst.channels.gains.cols() != inst.config.num_subcarriers)
        throw ConfigError("gains shape does not match num_irs + num_ers by num_subcarriers");
    inst.channels.eve_gains = eavesdropper_gains(inst.channels.gains, inst.config.num_irs);
    if (j.contains("eve_gains")) {
        Matrix<double> given;
        try {
            given = detail::matrix_from_json(j.at("eve_gains"), "eve_gains");
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad eve_gains: ") + e.what());
        }
        if (!(given == inst.channels.eve_gains)) throw ConfigError("eve_gains inconsistent with gains");
    }
    try {
        inst.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return inst;
}

inline json to_json(const Allocation& a) {
    json assign = json::array();
    for (std::size_t k = 0; k < a.assign.rows(); ++k) {
        std::vector<int> row;
        for (std::size_t n = 0; n < a.assign.cols(); ++n) row.push_back(a.assign(k, n));
        assign.push_back(row);
    }
    return {{"power_w", detail::matrix_to_json(a.power)},
            {"split", detail::matrix_to_json(a.split)},
            {"assign", assign}};
}

inline json to_json(const TraceEntry& t) {
    return {{"iteration", t.iteration},
            {"dual_value", detail::number(t.dual_value)},
            {"power_violation_w", t.power_violation_w},
            {"harvest_violation_w", t.harvest_violation_w},
            {"recovered_objective", detail::number(t.recovered_objective)}};
}

/// Oracle comparison attached by verification runs.
struct OracleGap {
    bool feasible = false;
    double objective = 0.0;
    double gap_rel = 0.0;  // (oracle - solver) / oracle
};

inline json to_json(const SolveReport& r, const std::optional<OracleGap>& oracle = std::nullopt) {
    json trace = json::array();
    for (const auto& t : r.trace) trace.push_back(to_json(t));
    json out = {{"scheme", r.scheme},
                {"objective_bps_hz", r.objective},
                {"feasible", r.feasible},
                {"converged", r.converged},
                {"iterations", r.iterations},
                {"dual_value", detail::number(r.dual_value)},
                {"duality_gap_rel", detail::number(r.duality_gap_rel)},
                {"total_power_w", r.total_power},
                {"harvested_w", r.harvested},
                {"duals", {{"lambdas", r.duals.lambdas}, {"gamma", r.duals.gamma}}},
                {"allocation", to_json(r.allocation)},
                {"trace", trace}};
    if (oracle)
        out["oracle"] = {{"feasible", oracle->feasible},
                         {"objective_bps_hz", oracle->objective},
                         {"gap_rel", detail::number(oracle->gap_rel)}};
    return out;
}

}  // namespace swipt
