#pragma once

#include "lsc/bounds.hpp"
#include "lsc/sim.hpp"

#include <json.hpp>

#include <string>

namespace lsc {

using json = nlohmann::json;

/// Matrices serialize as arrays of decimal strings so consumers never face
/// integer-precision surprises.
inline json matrix_json(const FieldMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(std::to_string(m.at(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json params_json(const ProblemParams& p) {
    return json{{"K", p.K},   {"N", p.N}, {"Nr", p.Nr},
                {"Kc", p.Kc}, {"m", p.m}, {"q", p.q},
                {"L", p.L},   {"K_real", p.real_datasets()}};
}

inline json assignment_json(const Assignment& a) {
    return json{{"Z", a.Z}, {"H", a.H}};
}

inline json rational_json(const Rational& r) {
    return json{{"fraction", rational_str(r)}, {"decimal", rational_double(r)}};
}

inline json scheme_json(const Scheme& s) {
    json cores = json::array();
    for (const auto& core : s.cores)
        cores.push_back(json{{"Kc_prime", core.params.Kc},
                             {"Fprime", matrix_json(core.effective.Fprime)},
                             {"S", matrix_json(core.trans.S)}});
    json out{{"params", params_json(s.params)},
             {"F", matrix_json(s.F)},
             {"regime", regime_name(s.regime)},
             {"seed", s.seed},
             {"padding_rows", s.padding_rows},
             {"cores", std::move(cores)}};
    if (s.regime == Regime::LargeKc) {
        out["B"] = s.B;
        out["subsets"] = s.subsets;
    }
    return out;
}

inline json sim_report_json(const SimReport& r) {
    json out{{"params", params_json(r.params)},
             {"regime", regime_name(r.regime)},
             {"seed", r.seed},
             {"success", r.success},
             {"R_measured", rational_json(r.R_measured)},
             {"subsets_checked", r.subsets_checked},
             {"symbols_per_worker", r.symbols_per_worker},
             {"decodability_sampled", r.decodability_sampled}};
    if (r.responder_set) out["responder_set"] = *r.responder_set;
    if (r.failing_subset) out["failing_subset"] = *r.failing_subset;
    if (!r.failure.empty()) out["failure"] = r.failure;
    return out;
}

inline json cost_report_json(const CostReport& r) {
    return json{{"R_ach", rational_json(r.R_ach)},
                {"feasible", r.feasible},
                {"R_converse_cyc", rational_json(r.R_converse_cyc)},
                {"R_cutset", rational_json(r.R_cutset)},
                {"R_base", rational_json(r.R_base)},
                {"ratio", rational_json(r.ratio)},
                {"verdict", verdict_name(r.verdict)}};
}

inline json audit_json(const AuditRecord& a) {
    json ineqs = json::array();
    for (const auto& i : a.inequalities)
        ineqs.push_back(json{{"anchor", i.anchor},
                             {"stragglers", i.stragglers},
                             {"datasets", i.datasets},
                             {"responding_holders", i.responding_holders},
                             {"rhs_Kc", i.rhs_Kc},
                             {"rank_ok", i.rank_ok}});
    return json{{"inequalities", std::move(ineqs)},
                {"total_T_bound", rational_json(a.total_T_bound)},
                {"implied_converse", rational_json(a.implied_converse)},
                {"matches_formula", a.matches_formula}};
}

} // namespace lsc
