// Workbench driver: load a fan and divisor classes, run the requested check,
// and emit a structured JSON report on stdout (and optionally to a file).
//
// Exit codes: 0 = report computed (whatever the verdict), 1 = input error,
// 2 = internal numerical failure.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dhym/report.hpp"

using namespace dhym;

namespace {

struct Globals {
  std::string preset;
  std::string fan_file;
  double tol = 1e-6;
  std::string json_out;
  unsigned seed = 0;  // recorded for reproducibility; all solvers self-seed
};

Fan load_fan(const Globals& g) {
  if (!g.preset.empty() && !g.fan_file.empty())
    throw input_error("give either --preset or --fan-file, not both");
  if (!g.preset.empty()) return preset_fan(g.preset);
  if (g.fan_file.empty()) throw input_error("a fan is required: --preset or --fan-file");
  std::ifstream in(g.fan_file);
  if (!in) throw input_error("cannot open fan file '" + g.fan_file + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw input_error("bad fan file: " + std::string(e.what()));
  }
  Fan f;
  f.n = j.at("n").get<int>();
  f.name = j.value("name", g.fan_file);
  for (const auto& row : j.at("rays")) f.rays.push_back(row.get<Ray>());
  for (const auto& c : j.at("max_cones")) f.max_cones.push_back(c.get<Cone>());
  // Normalize to the canonical ordering the library expects: sorted indices
  // within each cone, and the cone list itself sorted lexicographically.
  for (auto& c : f.max_cones) std::sort(c.begin(), c.end());
  std::sort(f.max_cones.begin(), f.max_cones.end());
  if (j.contains("basis"))
    for (const auto& b : j.at("basis")) {
      std::vector<Rat> v;
      for (const auto& x : b.at(1)) v.push_back(parse_rat(x.get<std::string>()));
      f.basis.emplace_back(b.at(0).get<std::string>(), v);
    }
  validate_fan(f);
  return f;
}

// "2,-1", "2,-1@basis(h,e)", "1,0,0,1@rays".  Without an annotation the
// length decides: number of rays -> ray coefficients, size of the named
// basis -> basis coefficients.
DivisorClass parse_class(const Fan& f, const std::string& s) {
  std::string coeffs = s, where;
  if (auto at = s.find('@'); at != std::string::npos) {
    coeffs = s.substr(0, at);
    where = s.substr(at + 1);
  }
  std::vector<Rat> v;
  size_t pos = 0;
  while (pos <= coeffs.size()) {
    size_t comma = coeffs.find(',', pos);
    std::string tok = coeffs.substr(pos, comma == std::string::npos ? comma : comma - pos);
    v.push_back(parse_rat(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  std::vector<std::string> names;
  bool by_rays = false;
  if (where == "rays") {
    by_rays = true;
  } else if (where.rfind("basis(", 0) == 0 && where.back() == ')') {
    std::string inner = where.substr(6, where.size() - 7);
    size_t p = 0;
    while (p <= inner.size()) {
      size_t c = inner.find(',', p);
      names.push_back(inner.substr(p, c == std::string::npos ? c : c - p));
      if (c == std::string::npos) break;
      p = c + 1;
    }
  } else if (!where.empty()) {
    throw input_error("bad class annotation '@" + where + "'");
  } else if (v.size() == static_cast<size_t>(f.num_rays())) {
    by_rays = true;
  } else if (v.size() == f.basis.size() && !f.basis.empty()) {
    for (const auto& [n, _] : f.basis) names.push_back(n);
  } else {
    throw input_error("class '" + s + "' matches neither the ray count nor the basis size");
  }
  if (by_rays) {
    if (v.size() != static_cast<size_t>(f.num_rays()))
      throw input_error("expected " + std::to_string(f.num_rays()) + " ray coefficients");
    return DivisorClass(v.begin(), v.end());
  }
  if (v.size() != names.size()) throw input_error("coefficient/name count mismatch in '" + s + "'");
  DivisorClass out(f.num_rays(), Rat(0));
  for (size_t i = 0; i < names.size(); ++i) {
    bool found = false;
    for (const auto& [n, cls] : f.basis)
      if (n == names[i]) {
        for (int r = 0; r < f.num_rays(); ++r) out[r] += v[i] * cls[r];
        found = true;
      }
    if (!found) throw input_error("no basis class named '" + names[i] + "'");
  }
  return out;
}

void emit(const Globals& g, Json j) {
  j["seed"] = g.seed;
  std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!g.json_out.empty()) {
    std::ofstream out(g.json_out);
    if (!out) throw input_error("cannot write '" + g.json_out + "'");
    out << text;
  }
}

// "1..10" or a single integer.
std::pair<int, int> parse_range(const std::string& s) {
  if (auto dots = s.find(".."); dots != std::string::npos) {
    try {
      return {std::stoi(s.substr(0, dots)), std::stoi(s.substr(dots + 2))};
    } catch (const std::exception&) {
      throw input_error("bad k range '" + s + "'");
    }
  }
  try {
    int k = std::stoi(s);
    return {k, k};
  } catch (const std::exception&) {
    throw input_error("bad k value '" + s + "'");
  }
}

Json collins_shi_report() {
  Fan bl = fan_blp_p2();
  ComplexifiedClass c;
  c.omega = parse_class(bl, "2,-1@basis(h,e)");
  c.scale_r = Rat(1, 3);
  DivisorClass L = parse_class(bl, "2,0@basis(h,e)");
  KScanResult scan = k_scan(bl, c, L, 3);
  Json out = json_report(scan);
  out["instance"] = Json{{"fan", "blp_p2"},
                         {"omega", "(1/sqrt(3)) * (2h - e)"},
                         {"L", "2h"}};
  // Slopes normalized by sqrt(3): exact fractions comparable by eye.
  Quad unit(Rat(0), Rat(1), Rat(3));
  Json table = Json::array();
  for (const auto& [k, v] : scan.verdicts)
    for (const AMInequality& i : v.inequalities) {
      Quad nl = i.lhs / unit, nr = i.rhs / unit;
      table.push_back(Json{{"k", k},
                           {"destabilizer", i.destabilizer},
                           {"nu_destabilizer", rat_str(nl.a)},
                           {"nu_object", rat_str(nr.a)},
                           {"stable_contribution", i.cmp < 0}});
    }
  out["normalized_table"] = table;
  StabilityReport dhym = dhym_nakai_moishezon(bl, c, parse_class(bl, "2,0@basis(h,e)"));
  out["dhym_overall"] = dhym.overall;
  for (const StratumRecord& s : dhym.strata)
    if (s.verdict == StratumVerdict::violated) out["dhym_witness_lhs"] = quad_str(s.lhs);
  return out;
}

Json min_angle_report() {
  Fan bl = fan_blp_p2();
  DivisorClass omega = parse_class(bl, "2,-1@basis(h,e)");
  DivisorClass alpha = parse_class(bl, "5,-1@basis(h,e)");
  MinAngleResult r = minimal_angle(bl, omega, alpha);
  Json out = json_report(r);
  out["instance"] = Json{{"fan", "blp_p2"}, {"omega", "2h - e"}, {"alpha", "5h - e"}};
  out["semipositivity"] = json_report(semipositivity_check(bl, omega, alpha));
  return out;
}

Json keller_scarpa_report() {
  Fan bl = fan_blp_p2();
  ComplexifiedClass c;
  c.omega = parse_class(bl, "2,-1@basis(h,e)");
  DivisorClass L1 = parse_class(bl, "1,-2@basis(h,e)");
  DivisorClass L2 = zero_divisor(bl);
  Json out;
  out["check"] = "higher_rank_extension_scan";
  out["instance"] = Json{{"fan", "blp_p2"},
                         {"omega", "2h - e"},
                         {"L1", "h - 2e"},
                         {"L2", "O"},
                         {"k", 1}};
  out["beta_zero"] = json_report(higher_rank_instability(bl, c, L1, L2, 1));
  c.beta = DivisorClass(bl.num_rays(), Rat(0));
  for (int i = 0; i < bl.num_rays(); ++i) c.beta[i] = c.omega[i] / 4;
  out["beta_quarter_omega"] = json_report(higher_rank_instability(bl, c, L1, L2, 1));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stability workbench for toric surfaces and their mirrors"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--preset", g.preset, "fan preset, e.g. p2, blp_p2, hirzebruch(2)");
  app.add_option("--fan-file", g.fan_file, "JSON fan description");
  app.add_option("--tol", g.tol, "tolerance for float comparisons");
  app.add_option("--json-out", g.json_out, "also write the report to this path");
  app.add_option("--seed", g.seed, "recorded in the report; solvers are deterministic");
  for (auto* sc : {&app}) (void)sc;

  std::string omega_s, alpha_s, L_s, L1_s, L2_s, beta_s, kscan_s = "1", fcl_s = "1", gcl_s = "1",
                                                         outdir_s = "examples_out";
  std::string scale_r_s = "1", kfac_s = "1";
  double q = 0.01, z = 1.0;
  long long qmax = 1000;

  auto add_omega = [&](CLI::App* sc, bool required = true) {
    auto* o = sc->add_option("--omega", omega_s, "Kahler class coefficients");
    if (required) o->required();
    sc->add_option("--scale-r", scale_r_s, "radicand: omega is scaled by k*sqrt(r)");
    sc->add_option("--k-factor", kfac_s, "rational scale factor k");
    sc->add_option("--beta", beta_s, "B-field class coefficients");
  };
  auto cls = [&](const Fan& f) {
    ComplexifiedClass c;
    c.omega = parse_class(f, omega_s);
    c.scale_r = parse_rat(scale_r_s);
    c.k = parse_rat(kfac_s);
    if (!beta_s.empty()) c.beta = parse_class(f, beta_s);
    return c;
  };

  CLI::App* cd = app.add_subcommand("check-dhym", "Nakai-Moishezon positivity over strata");
  add_omega(cd);
  cd->add_option("--alpha", alpha_s)->required();

  CLI::App* pf = app.add_subcommand("phase-form", "phase-inequality form of the criterion");
  add_omega(pf);
  pf->add_option("--L", L_s)->required();

  CLI::App* br = app.add_subcommand("bridgeland", "line-bundle stability scan");
  add_omega(br);
  br->add_option("--L", L_s)->required();
  br->add_option("--k-scan", kscan_s, "single k or range like 1..10");

  CLI::App* ma = app.add_subcommand("min-angle", "minimal angle over effective twists");
  add_omega(ma);
  ma->add_option("--alpha", alpha_s)->required();
  ma->add_option("--qmax", qmax, "denominator bound for rational rounding");

  CLI::App* hr = app.add_subcommand("higher-rank", "rank-2 extension instability");
  add_omega(hr);
  hr->add_option("--L1", L1_s)->required();
  hr->add_option("--L2", L2_s)->required();
  hr->add_option("--k", kscan_s, "twist power");

  CLI::App* js = app.add_subcommand("jacob-sheu", "blowup-of-projective-space criterion");
  add_omega(js);
  js->add_option("--L", L_s)->required();

  CLI::App* lb = app.add_subcommand("lg-build", "superpotential coefficients");
  add_omega(lb);

  CLI::App* gc = app.add_subcommand("gamma-check", "period identity: series side vs quadrature");
  gc->add_option("--q", q, "Novikov parameter")->required();
  gc->add_option("--z", z, "scaling parameter");

  CLI::App* pd = app.add_subcommand("period", "positive-cycle period by quadrature");
  pd->add_option("--q", q, "Novikov parameter")->required();
  pd->add_option("--z", z, "scaling parameter");

  CLI::App* rs = app.add_subcommand("residue", "critical-point residue pairing");
  add_omega(rs);
  rs->add_option("--f", fcl_s, "Laurent polynomial, e.g. '1 - 2*x*y^-1'");
  rs->add_option("--g", gcl_s, "Laurent polynomial");

  CLI::App* ex = app.add_subcommand("examples", "regenerate the worked-example reports");
  ex->add_option("--out-dir", outdir_s, "output directory");

  for (CLI::App* sc : app.get_subcommands([](const CLI::App*) { return true; }))
    sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (cd->parsed()) {
      Fan f = load_fan(g);
      emit(g, json_report(dhym_nakai_moishezon(f, cls(f), parse_class(f, alpha_s))));
    } else if (pf->parsed()) {
      Fan f = load_fan(g);
      emit(g, json_report(phase_inequality_form(f, cls(f), parse_class(f, L_s))));
    } else if (br->parsed()) {
      Fan f = load_fan(g);
      auto [k0, k1] = parse_range(kscan_s);
      if (k0 == k1)
        emit(g, json_report(arcara_miles_scan(f, cls(f), parse_class(f, L_s), k0)));
      else if (k0 == 1)
        emit(g, json_report(k_scan(f, cls(f), parse_class(f, L_s), k1)));
      else
        throw input_error("k ranges must start at 1");
    } else if (ma->parsed()) {
      Fan f = load_fan(g);
      DivisorClass omega = parse_class(f, omega_s), alpha = parse_class(f, alpha_s);
      MinAngleResult r = minimal_angle(f, omega, alpha);
      Json j = json_report(r);
      j["semipositivity"] = json_report(semipositivity_check(f, omega, alpha));
      auto round = rationality_round(f, omega, alpha, r, qmax);
      j["rational_round"] = round ? Json(json_divisor(*round)) : Json(nullptr);
      emit(g, j);
    } else if (hr->parsed()) {
      Fan f = load_fan(g);
      auto [k0, k1] = parse_range(kscan_s);
      if (k0 != k1) throw input_error("--k takes a single value");
      emit(g, json_report(higher_rank_instability(f, cls(f), parse_class(f, L1_s),
                                                  parse_class(f, L2_s), k0)));
    } else if (js->parsed()) {
      Fan f = load_fan(g);
      emit(g, json_report(jacob_sheu_check(f, cls(f), parse_class(f, L_s))));
    } else if (lb->parsed()) {
      Fan f = load_fan(g);
      emit(g, json_report(build_lg(f, cls(f))));
    } else if (gc->parsed() || pd->parsed()) {
      Fan f = load_fan(g);
      LGModel m = direct_q_model(f, q);
      PeriodResult quad = positive_cycle_period(m, z);
      if (pd->parsed()) {
        emit(g, json_report(quad));
      } else {
        CohClass<Rat> chO = chern_character(f, zero_divisor(f));
        PeriodResult coh = gamma_lhs(f, {Cx(q, 0)}, Cx(z, 0), chO);
        double rel = std::abs(coh.value - quad.value) / std::abs(quad.value);
        Json j;
        j["check"] = "gamma_identity";
        j["series_side"] = json_report(coh);
        j["quadrature_side"] = json_report(quad);
        j["relative_discrepancy"] = rel;
        j["within_tol"] = rel <= g.tol;
        if (f.n == 1) {
          double bessel = 2 * std::cyl_bessel_k(0.0, 2 * std::sqrt(q) / z);
          j["bessel_oracle"] = bessel;
          j["bessel_discrepancy"] = std::abs(quad.value.real() - bessel);
        }
        emit(g, j);
      }
    } else if (rs->parsed()) {
      Fan f = load_fan(g);
      LGModel m = build_lg(f, cls(f));
      Cx v = residue_pairing(m, parse_laurent(fcl_s, f.n), parse_laurent(gcl_s, f.n));
      Json j;
      j["check"] = "residue_pairing";
      j["f"] = fcl_s;
      j["g"] = gcl_s;
      j["value"] = Json{{"re", v.real()}, {"im", v.imag()}};
      j["critical_points"] = static_cast<int>(critical_points(m).size());
      emit(g, j);
    } else if (ex->parsed()) {
      std::filesystem::create_directories(outdir_s);
      auto write = [&](const std::string& name, const Json& j) {
        std::ofstream out(outdir_s + "/" + name);
        if (!out) throw input_error("cannot write to '" + outdir_s + "'");
        out << j.dump(2) << "\n";
      };
      write("collins_shi.json", collins_shi_report());
      write("min_angle.json", min_angle_report());
      write("keller_scarpa.json", keller_scarpa_report());
      Json j;
      j["check"] = "examples";
      j["written"] = Json::array({"collins_shi.json", "min_angle.json", "keller_scarpa.json"});
      j["out_dir"] = outdir_s;
      emit(g, j);
    }
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
