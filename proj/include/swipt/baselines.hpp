#pragma once

#include <charconv>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

#include "dual_solver.hpp"

namespace swipt {

/// Same dual loop with the AN fraction pinned to `alpha_fixed` everywhere.
inline SolveReport solve_fixed_alpha(const Instance& inst, double alpha_fixed, const SolverSettings& settings = {}) {
    if (!(alpha_fixed >= 0.0 && alpha_fixed <= 1.0)) throw std::invalid_argument("alpha_fixed must lie in [0,1]");
    char name[48];
    std::snprintf(name, sizeof name, "alpha:%g", alpha_fixed);
    return solve_with_policy(inst, settings, SchemePolicy{name, SplitRule::fixed(alpha_fixed), false});
}

/// FSA: subcarrier n always serves IR n mod K1; power and AN fraction are
/// still optimized.
inline SolveReport solve_fixed_assignment(const Instance& inst, const SolverSettings& settings = {}) {
    return solve_with_policy(inst, settings, SchemePolicy{"fsa", SplitRule::joint(), true});
}

/// NoAN: no artificial noise (alpha = 0), so a subcarrier carries secrecy
/// only when the IR out-hears every other receiver.
inline SolveReport solve_no_an(const Instance& inst, const SolverSettings& settings = {}) {
    return solve_with_policy(inst, settings, SchemePolicy{"noan", SplitRule::fixed(0.0), false});
}

/// Parsed scheme selector: "proposed" | "alpha:<value>" | "fsa" | "noan".
struct Scheme {
    enum class Kind { Proposed, FixedAlpha, FixedAssignment, NoAN };
    Kind kind = Kind::Proposed;
    double alpha = 0.0;
    std::string label = "proposed";

    static Scheme parse(std::string_view s) {
        if (s == "proposed") return {Kind::Proposed, 0.0, "proposed"};
        if (s == "fsa") return {Kind::FixedAssignment, 0.0, "fsa"};
        if (s == "noan") return {Kind::NoAN, 0.0, "noan"};
        if (s.starts_with("alpha:")) {
            const std::string_view v = s.substr(6);
            double a = 0.0;
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), a);
            if (ec != std::errc{} || ptr != v.data() + v.size() || !(a >= 0.0 && a <= 1.0))
                throw std::invalid_argument("bad alpha in scheme selector: " + std::string(s));
            return {Kind::FixedAlpha, a, std::string(s)};
        }
        throw std::invalid_argument("unknown scheme: " + std::string(s));
    }
};

inline SolveReport run_scheme(const Instance& inst, const Scheme& scheme, const SolverSettings& settings = {}) {
    SolveReport rep;
    switch (scheme.kind) {
        case Scheme::Kind::Proposed: rep = solve(inst, settings); break;
        case Scheme::Kind::FixedAlpha: rep = solve_fixed_alpha(inst, scheme.alpha, settings); break;
        case Scheme::Kind::FixedAssignment: rep = solve_fixed_assignment(inst, settings); break;
        case Scheme::Kind::NoAN: rep = solve_no_an(inst, settings); break;
    }
    rep.scheme = scheme.label;
    return rep;
}

}  // namespace swipt
