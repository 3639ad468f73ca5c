#pragma once

// JSON serialization for the report types.  Every numeric field is
// dual-printed: exact string when the quantity is exact, float alongside.
// Uses insertion-ordered objects so identical inputs give identical bytes.

#include <json.hpp>

#include "bridgeland.hpp"
#include "lg.hpp"
#include "minangle.hpp"

namespace dhym {

using Json = nlohmann::ordered_json;

inline Json json_rat(const Rat& x) {
  return Json{{"exact", rat_str(x)}, {"value", to_double(x)}};
}

inline Json json_quad(const Quad& x) {
  return Json{{"exact", quad_str(x)}, {"value", x.to_double()}};
}

inline Json json_gquad(const GQuad& z) {
  std::complex<double> zd = z.to_complex();
  return Json{{"re", json_quad(z.re)}, {"im", json_quad(z.im)},
              {"value", Json{{"re", zd.real()}, {"im", zd.imag()}}}};
}

inline Json json_divisor(const DivisorClass& d) {
  Json out = Json::array();
  for (const Rat& c : d) out.push_back(rat_str(c));
  return out;
}

inline Json json_cone(const Cone& c) {
  Json out = Json::array();
  for (int i : c) out.push_back(i);
  return out;
}

inline Json json_report(const StabilityReport& r) {
  Json out;
  out["check"] = "dhym_nakai_moishezon";
  out["overall"] = r.overall;
  out["generic"] = r.generic;
  out["cot_varphi"] = json_quad(r.angle.cot_varphi);
  out["varphi"] = r.angle.varphi;
  out["supercritical"] = r.angle.supercritical;
  Json strata = Json::array();
  for (const StratumRecord& s : r.strata)
    strata.push_back(Json{{"cone", json_cone(s.cone)},
                          {"codim", s.codim},
                          {"lhs", json_quad(s.lhs)},
                          {"verdict", verdict_name(s.verdict)}});
  out["strata"] = strata;
  Json wit = Json::array();
  for (const Cone& c : r.witnesses) wit.push_back(json_cone(c));
  out["witnesses"] = wit;
  out["assumption"] = r.assumption;
  return out;
}

inline Json json_report(const PhaseFormReport& r) {
  Json out;
  out["check"] = "phase_inequality_form";
  out["overall"] = r.overall;
  out["generic"] = r.generic;
  out["arg_x"] = r.arg_x;
  Json strata = Json::array();
  for (const PhaseStratumRecord& s : r.strata)
    strata.push_back(Json{{"cone", json_cone(s.cone)},
                          {"codim", s.codim},
                          {"arg", s.arg_v},
                          {"verdict", verdict_name(s.verdict)}});
  out["strata"] = strata;
  Json wit = Json::array();
  for (const Cone& c : r.witnesses) wit.push_back(json_cone(c));
  out["witnesses"] = wit;
  out["assumption"] = r.assumption;
  return out;
}

inline Json json_report(const JacobSheuReport& r) {
  Json out;
  out["check"] = "jacob_sheu";
  out["overall"] = r.overall;
  out["generic"] = r.generic;
  out["trivial_bundle"] = r.trivial_bundle;
  out["theta_hat"] = r.theta_hat;
  Json divs = Json::array();
  for (const JacobSheuRecord& d : r.divisors)
    divs.push_back(Json{{"ray", d.ray}, {"arg", d.arg_v}, {"verdict", verdict_name(d.verdict)}});
  out["divisors"] = divs;
  out["witnesses"] = r.witnesses;
  return out;
}

inline Json json_report(const HigherRankReport& r) {
  Json out;
  out["check"] = "higher_rank_inequalities";
  out["overall"] = r.overall;
  out["generic"] = r.generic;
  out["Z_E"] = json_gquad(r.Z_E);
  out["arg_E"] = r.arg_E;
  Json recs = Json::array();
  for (const HigherRankRecord& rec : r.records)
    recs.push_back(Json{{"test", rec.test},
                        {"cone", json_cone(rec.cone)},
                        {"im_cross", json_quad(rec.im_cross)},
                        {"arg", rec.arg},
                        {"verdict", verdict_name(rec.verdict)}});
  out["records"] = recs;
  out["witnesses"] = r.witnesses;
  return out;
}

inline Json json_report(const Verdict& v) {
  Json out;
  out["check"] = "arcara_miles";
  out["status"] = status_name(v.status);
  out["witness"] = v.witness;
  out["k"] = v.k;
  out["shift"] = v.shift;
  out["conditional"] = v.conditional_am;
  out["wall"] = v.wall;
  Json ineqs = Json::array();
  for (const AMInequality& i : v.inequalities)
    ineqs.push_back(Json{{"curve_ray", i.curve_ray},
                         {"lhs", json_quad(i.lhs)},
                         {"rhs", json_quad(i.rhs)},
                         {"cmp", i.cmp},
                         {"destabilizer", i.destabilizer},
                         {"note", i.note}});
  out["inequalities"] = ineqs;
  out["assumption"] = v.assumption;
  return out;
}

inline Json json_report(const KScanResult& r) {
  Json out;
  out["check"] = "k_scan";
  Json vs = Json::array();
  for (const auto& [k, v] : r.verdicts) {
    Json jv = json_report(v);
    jv.erase("check");
    vs.push_back(Json{{"k", k}, {"verdict", jv}});
  }
  out["verdicts"] = vs;
  out["flips"] = r.flips;
  return out;
}

inline Json json_report(const MinAngleResult& r) {
  Json out;
  out["check"] = "minimal_angle";
  out["cot_theta_min"] = r.cot_theta_min;
  if (r.exact) out["cot_theta_min_exact"] = quad_str(*r.exact);
  out["cot_phi"] = json_rat(r.cot_phi_value);
  Json d = Json::array();
  for (const Quad& t : r.D_star) d.push_back(json_quad(t));
  out["D_star"] = d;
  out["support"] = r.support;
  out["attained"] = r.attained;
  out["gap"] = r.gap;
  if (r.exact_gap) out["gap_exact"] = quad_str(*r.exact_gap);
  out["certified"] = r.certified;
  out["tie"] = r.tie_flag;
  return out;
}

inline Json json_report(const SemipositivityResult& r) {
  return Json{{"check", "semipositivity"},
              {"passes", r.passes},
              {"cot_phi", json_rat(r.cot_phi_value)},
              {"failures", r.failures},
              {"equalities", r.equalities}};
}

inline Json json_report(const LGModel& m) {
  Json out;
  out["check"] = "lg_model";
  Json rows = Json::array();
  for (const Ray& v : m.exponents) {
    Json row = Json::array();
    for (auto c : v) row.push_back(c);
    rows.push_back(row);
  }
  out["exponents"] = rows;
  Json coeffs = Json::array();
  for (size_t i = 0; i < m.coefficients.size(); ++i)
    coeffs.push_back(Json{{"log_minus_U", quad_str(m.logU[i])},
                          {"log_B", rat_str(m.logB[i])},
                          {"re", m.coefficients[i].real()},
                          {"im", m.coefficients[i].imag()}});
  out["coefficients"] = coeffs;
  out["gauge"] = m.gauge;
  out["weak_fano_warning"] = m.weak_fano_warning;
  return out;
}

inline Json json_report(const PeriodResult& p) {
  return Json{{"check", "period"},
              {"value", Json{{"re", p.value.real()}, {"im", p.value.imag()}}},
              {"method", p.method},
              {"error_estimate", p.error_estimate},
              {"truncation", p.truncation},
              {"normalization", p.normalization}};
}

inline Json json_report(const DictionaryRecord& r) {
  Json out;
  out["check"] = "dhym_bridgeland_dictionary";
  out["consistent"] = r.consistent;
  out["wall"] = r.wall;
  out["note"] = r.note;
  out["dhym"] = json_report(r.dhym);
  out["bridgeland"] = json_report(r.am);
  return out;
}

}  // namespace dhym
