#pragma once

#include <json.hpp>

#include "polaron/certificates.hpp"
#include "polaron/functional.hpp"
#include "polaron/geometry.hpp"
#include "polaron/mc.hpp"
#include "polaron/solver.hpp"

namespace polaron {

using nlohmann::json;

inline void to_json(json& j, const Vec3& v) { j = json::array({v[0], v[1], v[2]}); }
inline void from_json(const json& j, Vec3& v) {
  v = Vec3{j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

inline void to_json(json& j, const McEstimate& e) {
  j = {{"mean", e.mean},
       {"std_error", e.std_error},
       {"samples", e.samples},
       {"seed", e.seed}};
}

inline void to_json(json& j, const EnergyReport& r) {
  j = {{"kinetic", r.kinetic},
       {"external", r.external},
       {"repulsion", r.repulsion},
       {"self_interaction", r.self_interaction},
       {"total", r.total},
       {"per_orbital_kinetic", r.per_orbital_kinetic},
       {"per_orbital_external", r.per_orbital_external}};
}

inline void to_json(json& j, const BindingSplit& s) {
  j = {{"k", s.k},
       {"energy_k", s.energy_k},
       {"energy_rest", s.energy_rest},
       {"converged", s.converged}};
}

inline void to_json(json& j, const BindingReport& r) {
  j = {{"margin", r.margin},
       {"reliable", r.reliable},
       {"energy_N", r.energy_N},
       {"splits", r.splits}};
}

inline void to_json(json& j, const SubadditivityGap::Pair& p) {
  j = {{"n", p.n}, {"m", p.m}, {"gap", p.gap}};
}

inline void to_json(json& j, const SubadditivityGap& g) {
  j = {{"min_gap", g.min_gap}, {"pairs", g.pairs}};
}

inline void to_json(json& j, const ClusterGroup& g) {
  j = {{"center", g.center},
       {"radius", g.radius},
       {"members", g.members},
       {"separation", g.separation}};
}

inline void to_json(json& j, const ClusterLayout& l) {
  j = {{"groups", l.groups}, {"small_radius", l.small_radius}};
}

inline void to_json(json& j, const BallLayout& l) {
  j = {{"centers", l.centers}, {"small_radius", l.small_radius}};
}

inline void from_json(const json& j, BallLayout& l) {
  l.centers = j.at("centers").get<std::vector<Vec3>>();
  l.small_radius = j.at("small_radius").get<double>();
}

inline void to_json(json& j, const ErrorTermCheck& c) {
  j = {{"estimate", c.estimate}, {"bound", c.bound}, {"pass", c.pass}};
}

inline void to_json(json& j, const CutoffCertificates& c) {
  j = {{"af_term", c.af_term},
       {"ag_number_term", c.ag_number_term},
       {"ag_const_term", c.ag_const_term},
       {"beta", c.beta},
       {"constant", c.constant},
       {"valid", c.valid}};
}

inline void to_json(json& j, const ErrorBudget& b) {
  j = {{"alpha", b.alpha},
       {"N", b.N},
       {"R", b.R},
       {"Lambda", b.Lambda},
       {"P", b.P},
       {"beta", b.beta},
       {"c_AV", b.c_AV},
       {"C_interball", b.C_interball},
       {"localization", b.localization},
       {"interball", b.interball},
       {"cutoff_half", b.cutoff_half},
       {"blockmode_count_term", b.blockmode_count_term},
       {"corollary_r2_term", b.corollary_r2_term},
       {"corollary_c_term", b.corollary_c_term},
       {"block_intermediate", b.block_intermediate},
       {"total", b.total}};
}

/// Solve result without the state payload (stored separately as binary).
inline json solve_summary(const SolveResult& r) {
  return {{"energy", r.energy},
          {"iterations", r.iterations},
          {"residual", r.residual},
          {"converged", r.converged},
          {"no_binding_without_coupling", r.no_binding_without_coupling}};
}

}  // namespace polaron
