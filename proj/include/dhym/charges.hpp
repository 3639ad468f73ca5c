#pragma once

// Central charges and the stability criteria driven by them: topological
// angles, the dHYM Nakai-Moishezon decision, the phase-inequality form, the
// Bl_p P^n window criterion, and the rank-2 inequalities.  All verdicts are
// decided in exact arithmetic over Q(sqrt(r))[i].

#include "cones.hpp"

namespace dhym {

// Complexified Kahler data.  The effective Kahler form is
//   k * sqrt(scale_r) * omega,  with B-field  k * beta.
// scale_r lets classes like (1/sqrt(3))(2h - e) stay exact (scale_r = 1/3).
struct ComplexifiedClass {
  DivisorClass omega;
  Rat scale_r = 1;
  DivisorClass beta;  // empty means zero
  Rat k = 1;
};

inline DivisorClass zero_divisor(const Fan& f) { return DivisorClass(f.num_rays(), Rat(0)); }

inline DivisorClass beta_of(const Fan& f, const ComplexifiedClass& c) {
  if (c.beta.empty()) return zero_divisor(f);
  if (static_cast<int>(c.beta.size()) != f.num_rays())
    throw input_error("beta coefficient vector has wrong length");
  return c.beta;
}

inline void check_complexified(const Fan& f, const ComplexifiedClass& c) {
  if (static_cast<int>(c.omega.size()) != f.num_rays())
    throw input_error("omega coefficient vector has wrong length");
  if (c.k <= 0) throw input_error("scale k must be positive");
  if (c.scale_r <= 0) throw input_error("omega scale must be positive");
  if (!is_kahler(f, c.omega)) throw input_error("omega is not a Kahler class");
}

// k * sqrt(scale_r) * omega as a Quad-coefficient class.
inline CohClass<GQuad> omega_class(const Fan& f, const ComplexifiedClass& c) {
  CohClass<GQuad> out(f.n);
  for (int i = 0; i < f.num_rays(); ++i)
    out.add_term({i}, GQuad(Quad(Rat(0), c.k * c.omega[i], c.scale_r)));
  return out;
}

// Exact pairing (k sqrt(r) omega) . D for a rational divisor class.
inline Quad omega_dot(const Fan& f, const ComplexifiedClass& c, const DivisorClass& d) {
  std::vector<DivisorClass> pair = {c.omega, d};
  if (f.n != 2) throw input_error("omega_dot is a surface pairing");
  return Quad(Rat(0), c.k * intersect_divisors(f, pair), c.scale_r);
}

// Z(E) = -integral of exp(-i k sqrt(r) omega) * exp(-k beta) * E.
inline GQuad central_charge(const Fan& f, const ComplexifiedClass& c, const CohClass<Rat>& E) {
  check_complexified(f, c);
  DivisorClass beta = beta_of(f, c);
  CohClass<GQuad> expo(f.n);
  for (int i = 0; i < f.num_rays(); ++i)
    expo.add_term({i}, GQuad(Quad(-c.k * beta[i]), Quad(Rat(0), -c.k * c.omega[i], c.scale_r)));
  GQuad z = evaluate_top(f, coh_exp(expo) * to_gquad(E));
  return -z;
}

// ---------------------------------------------------------------------------
// Topological angle.

struct AngleData {
  double phi = 0;         // arg of integral (omega + i alpha)^n, principal
  double varphi = 0;      // n pi/2 - phi
  bool supercritical = false;
  bool cot_defined = false;
  Quad cot_varphi;        // exact when defined
};

namespace detail {

// integral over V (or X when sigma empty) of (alpha + i omega)^dim(V).
inline GQuad mixed_power_integral(const Fan& f, const ComplexifiedClass& c,
                                  const DivisorClass& alpha, const Cone& sigma) {
  int d = f.n - static_cast<int>(sigma.size());
  CohClass<GQuad> base(f.n);
  for (int i = 0; i < f.num_rays(); ++i)
    base.add_term({i}, GQuad(Quad(alpha[i]), Quad(Rat(0), c.k * c.omega[i], c.scale_r)));
  CohClass<GQuad> p = CohClass<GQuad>::one(f.n);
  for (int j = 0; j < d; ++j) p = p * base;
  for (int i : sigma) {
    CohClass<GQuad> div(f.n);
    div.add_term({i}, GQuad(Quad(Rat(1))));
    p = p * div;
  }
  return evaluate_top(f, p);
}

inline GQuad i_power_times_conj(const GQuad& z, int n) {
  GQuad w = conj(z);
  for (int j = 0; j < (n % 4 + 4) % 4; ++j) w = mul_i(w);
  return w;
}

}  // namespace detail

// The angle is fixed by integral (omega + i alpha)^n in e^{i phi} R_{>0};
// note integral (alpha + i omega)^n = i^n * conj of that integral, so with
// z_n := integral (alpha + i omega)^n we get e^{i varphi} = z_n / |z_n| after
// varphi = n pi/2 - phi.  Supercriticality (sin varphi > 0) and cot varphi
// are decided exactly from z_n.
inline AngleData topological_angles(const Fan& f, const ComplexifiedClass& c,
                                    const DivisorClass& alpha) {
  check_complexified(f, c);
  if (static_cast<int>(alpha.size()) != f.num_rays())
    throw input_error("alpha coefficient vector has wrong length");
  GQuad zn = detail::mixed_power_integral(f, c, alpha, {});
  if (zn.is_zero()) throw input_error("angle undefined: class on a wall");
  // z (= integral (omega+i alpha)^n) satisfies zn = i^n conj(z), so
  // z = i^n conj(zn).
  GQuad z = detail::i_power_times_conj(zn, f.n);
  AngleData out;
  std::complex<double> zd = z.to_complex();
  out.phi = std::arg(zd);
  out.varphi = f.n * M_PI / 2 - out.phi;
  out.supercritical = sgn(zn.im) > 0;  // sin(varphi) > 0, exact
  out.cot_defined = sgn(zn.im) != 0;
  if (out.cot_defined) out.cot_varphi = zn.re / zn.im;
  return out;
}

// ---------------------------------------------------------------------------
// Stability reports.

enum class StratumVerdict { positive, semistable, violated };

inline const char* verdict_name(StratumVerdict v) {
  switch (v) {
    case StratumVerdict::positive: return "positive";
    case StratumVerdict::semistable: return "semistable";
    default: return "violated";
  }
}

struct StratumRecord {
  Cone cone;
  int codim = 0;
  Quad lhs;            // exact left-hand side (dHYM form)
  double lhs_value = 0;
  StratumVerdict verdict = StratumVerdict::positive;
};

struct StabilityReport {
  std::string overall;  // positive | semistable | violated
  bool generic = true;
  std::vector<StratumRecord> strata;
  std::vector<Cone> witnesses;
  AngleData angle;
  std::string assumption =
      "toric strata only; non-toric strict semistabilizers assumed absent";
};

namespace detail {

inline void finalize_report(StabilityReport& r) {
  bool any_violated = false, any_semi = false;
  for (const StratumRecord& s : r.strata) {
    if (s.verdict == StratumVerdict::violated) {
      any_violated = true;
      r.witnesses.push_back(s.cone);
    } else if (s.verdict == StratumVerdict::semistable) {
      any_semi = true;
      r.generic = false;
    }
  }
  r.overall = any_violated ? "violated" : (any_semi ? "semistable" : "positive");
}

}  // namespace detail

// dHYM Nakai-Moishezon criterion: for every toric stratum V,
//   lhs(V) = Re integral_V (i omega + alpha)^{dim V}
//            - cot(varphi) * Im integral_V (i omega + alpha)^{dim V}  > 0.
inline StabilityReport dhym_nakai_moishezon(const Fan& f, const ComplexifiedClass& c,
                                            const DivisorClass& alpha) {
  AngleData angle = topological_angles(f, c, alpha);
  if (f.n > 2 && !angle.supercritical)
    throw input_error("dHYM criterion requires the supercritical phase for n > 2");
  if (!angle.cot_defined)
    throw input_error("angle on a wall: cot(varphi) undefined");
  StabilityReport rep;
  rep.angle = angle;
  for (const Stratum& s : enumerate_strata(f)) {
    GQuad jv = detail::mixed_power_integral(f, c, alpha, s.cone);
    Quad lhs = jv.re - angle.cot_varphi * jv.im;
    StratumRecord rec;
    rec.cone = s.cone;
    rec.codim = s.codim;
    rec.lhs = lhs;
    rec.lhs_value = lhs.to_double();
    int sg = sgn(lhs);
    rec.verdict = sg > 0 ? StratumVerdict::positive
                         : (sg == 0 ? StratumVerdict::semistable : StratumVerdict::violated);
    rep.strata.push_back(std::move(rec));
  }
  detail::finalize_report(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// Phase-inequality form: per proper toric stratum V,
//   arg((-1)^{codim V} integral_V e^{-i k omega} ch(L)) < arg(integral_X ...),
// principal branch, compared exactly.  Equivalent stratum-by-stratum to
// dhym_nakai_moishezon with alpha = -c1(L) whenever that side is supercritical.
struct PhaseStratumRecord {
  Cone cone;
  int codim = 0;
  double arg_v = 0;
  StratumVerdict verdict = StratumVerdict::positive;
};

struct PhaseFormReport {
  std::string overall;
  bool generic = true;
  double arg_x = 0;
  std::vector<PhaseStratumRecord> strata;
  std::vector<Cone> witnesses;
  std::string assumption =
      "toric strata only; non-toric strict semistabilizers assumed absent";
};

namespace detail {

// (-1)^{codim} integral_V exp(-i k sqrt(r) omega) ch(L), exact.
inline GQuad phase_integral(const Fan& f, const ComplexifiedClass& c, const DivisorClass& L,
                            const Cone& sigma) {
  CohClass<GQuad> expo(f.n);
  for (int i = 0; i < f.num_rays(); ++i)
    expo.add_term({i}, GQuad(Quad(L[i]), Quad(Rat(0), -c.k * c.omega[i], c.scale_r)));
  CohClass<GQuad> p = coh_exp(expo);
  for (int i : sigma) {
    CohClass<GQuad> div(f.n);
    div.add_term({i}, GQuad(Quad(Rat(1))));
    p = p * div;
  }
  GQuad z = evaluate_top(f, p);
  if (sigma.size() % 2 == 1) z = -z;
  return z;
}

}  // namespace detail

inline PhaseFormReport phase_inequality_form(const Fan& f, const ComplexifiedClass& c,
                                             const DivisorClass& L) {
  check_complexified(f, c);
  if (static_cast<int>(L.size()) != f.num_rays())
    throw input_error("L coefficient vector has wrong length");
  GQuad zx = detail::phase_integral(f, c, L, {});
  if (zx.is_zero()) throw input_error("vanishing charge on X: class on a wall");
  PhaseFormReport rep;
  rep.arg_x = std::arg(zx.to_complex());
  for (const Stratum& s : enumerate_strata(f)) {
    GQuad zv = detail::phase_integral(f, c, L, s.cone);
    PhaseStratumRecord rec;
    rec.cone = s.cone;
    rec.codim = s.codim;
    if (zv.is_zero()) {
      rec.verdict = StratumVerdict::semistable;
      rec.arg_v = 0;
    } else {
      rec.arg_v = std::arg(zv.to_complex());
      int cmp = arg_cmp(zv, zx);
      rec.verdict = cmp < 0 ? StratumVerdict::positive
                            : (cmp == 0 ? StratumVerdict::semistable : StratumVerdict::violated);
    }
    rep.strata.push_back(std::move(rec));
  }
  bool any_violated = false, any_semi = false;
  for (const PhaseStratumRecord& s : rep.strata) {
    if (s.verdict == StratumVerdict::violated) {
      any_violated = true;
      rep.witnesses.push_back(s.cone);
    } else if (s.verdict == StratumVerdict::semistable) {
      any_semi = true;
      rep.generic = false;
    }
  }
  rep.overall = any_violated ? "violated" : (any_semi ? "semistable" : "positive");
  return rep;
}

// ---------------------------------------------------------------------------
// Jacob-Sheu window criterion on Bl_p P^n: with hat-theta = arg Z_X(L^dual),
// solvability iff every toric divisor charge lies in the open window
// (hat-theta - pi/2, hat-theta + pi/2).  The window test is the exact sign of
// Re(conj(Z_X) Z_V).

struct JacobSheuRecord {
  int ray = 0;
  double arg_v = 0;
  StratumVerdict verdict = StratumVerdict::positive;
};

struct JacobSheuReport {
  double theta_hat = 0;
  std::string overall;
  bool generic = true;
  bool trivial_bundle = false;
  std::vector<JacobSheuRecord> divisors;
  std::vector<int> witnesses;
};

inline JacobSheuReport jacob_sheu_check(const Fan& f, const ComplexifiedClass& c,
                                        const DivisorClass& L) {
  check_complexified(f, c);
  if (!is_blp_pn(f)) throw input_error("jacob_sheu_check requires the blp_pn preset fan");
  if (static_cast<int>(L.size()) != f.num_rays())
    throw input_error("L coefficient vector has wrong length");
  DivisorClass Ldual(L.size());
  bool zero = true;
  for (size_t i = 0; i < L.size(); ++i) {
    Ldual[i] = -L[i];
    if (L[i] != 0) zero = false;
  }
  JacobSheuReport rep;
  if (zero) {
    // L = O: the constant-phase equation is solved by alpha = 0.
    rep.trivial_bundle = true;
    rep.overall = "positive";
    GQuad zx = -detail::phase_integral(f, c, Ldual, {});
    rep.theta_hat = std::arg(zx.to_complex());
    return rep;
  }
  if (!is_kahler(f, Ldual)) throw input_error("jacob_sheu_check requires L^dual ample");
  GQuad zx = -detail::phase_integral(f, c, Ldual, {});
  if (zx.is_zero()) throw numeric_error("vanishing charge on X");
  rep.theta_hat = std::arg(zx.to_complex());
  for (const Stratum& s : enumerate_strata(f)) {
    if (s.codim != 1) continue;
    // phase_integral already carries the (-1)^codim factor, so for a divisor
    // it equals -integral_V e^{-i omega} ch(L^dual) as the window test needs.
    GQuad zv = detail::phase_integral(f, c, Ldual, s.cone);
    JacobSheuRecord rec;
    rec.ray = s.cone[0];
    rec.arg_v = zv.is_zero() ? 0 : std::arg(zv.to_complex());
    Quad window = zx.re * zv.re + zx.im * zv.im;  // Re(conj(zx) zv)
    int sg = sgn(window);
    rec.verdict = sg > 0 ? StratumVerdict::positive
                         : (sg == 0 ? StratumVerdict::semistable : StratumVerdict::violated);
    if (rec.verdict == StratumVerdict::violated) rep.witnesses.push_back(rec.ray);
    if (rec.verdict == StratumVerdict::semistable) rep.generic = false;
    rep.divisors.push_back(rec);
  }
  bool any_violated = !rep.witnesses.empty();
  bool any_semi = !rep.generic;
  rep.overall = any_violated ? "violated" : (any_semi ? "semistable" : "positive");
  return rep;
}

// ---------------------------------------------------------------------------
// Rank-2 inequalities for E_k = L1^k + L2^k:
//   curves V:      arg Z_X(E) < arg Z_V(E) < arg Z_X(E) + pi
//   sub-bundle L1: arg Z_X(E) - pi < arg Z_X(L1^k) < arg Z_X(E)
// on the continuous branch anchored at arg Z_X(E); both reduce to exact signs
// of Im(conj(Z_X(E)) * Z).

struct HigherRankRecord {
  std::string test;  // "curve" or "subbundle"
  Cone cone;         // empty for the sub-bundle test
  Quad im_cross;     // Im(conj(Z_X(E)) Z)
  double arg = 0;
  StratumVerdict verdict = StratumVerdict::positive;
};

struct HigherRankReport {
  GQuad Z_E;
  double arg_E = 0;
  std::string overall;
  bool generic = true;
  std::vector<HigherRankRecord> records;
  std::vector<std::string> witnesses;
};

namespace detail {

// Z^dHYM-style charge: -i * integral_sigma e^{-ik omega} e^{-k beta} * E.
inline GQuad dhym_charge(const Fan& f, const ComplexifiedClass& c, const CohClass<Rat>& E,
                         const Cone& sigma) {
  DivisorClass beta = beta_of(f, c);
  CohClass<GQuad> expo(f.n);
  for (int i = 0; i < f.num_rays(); ++i)
    expo.add_term({i}, GQuad(Quad(-c.k * beta[i]), Quad(Rat(0), -c.k * c.omega[i], c.scale_r)));
  CohClass<GQuad> p = coh_exp(expo) * to_gquad(E);
  for (int i : sigma) {
    CohClass<GQuad> div(f.n);
    div.add_term({i}, GQuad(Quad(Rat(1))));
    p = p * div;
  }
  return -mul_i(evaluate_top(f, p));
}

}  // namespace detail

inline CohClass<Rat> line_bundle_ch(const Fan& f, const DivisorClass& L, const Rat& k) {
  DivisorClass kd(L.size());
  for (size_t i = 0; i < L.size(); ++i) kd[i] = k * L[i];
  return chern_character(f, kd);
}

inline HigherRankReport higher_rank_inequalities(const Fan& f, const ComplexifiedClass& c,
                                                 const DivisorClass& L1, const DivisorClass& L2,
                                                 int k) {
  check_complexified(f, c);
  if (f.n != 2) throw input_error("higher_rank_inequalities requires a surface");
  if (k <= 0) throw input_error("k must be positive");
  CohClass<Rat> chE = line_bundle_ch(f, L1, k) + line_bundle_ch(f, L2, k);
  HigherRankReport rep;
  rep.Z_E = detail::dhym_charge(f, c, chE, {});
  if (rep.Z_E.is_zero()) throw input_error("vanishing Z_X(E)");
  rep.arg_E = std::arg(rep.Z_E.to_complex());
  auto classify = [&](const GQuad& z, int want_sign, const std::string& test, Cone cone) {
    HigherRankRecord rec;
    rec.test = test;
    rec.cone = std::move(cone);
    // Im(conj(a) b) = a_re b_im - a_im b_re
    rec.im_cross = rep.Z_E.re * z.im - rep.Z_E.im * z.re;
    rec.arg = z.is_zero() ? 0 : std::arg(z.to_complex());
    int sg = sgn(rec.im_cross) * want_sign;
    rec.verdict = sg > 0 ? StratumVerdict::positive
                         : (sgn(rec.im_cross) == 0 ? StratumVerdict::semistable
                                                   : StratumVerdict::violated);
    rep.records.push_back(rec);
  };
  for (const Stratum& s : enumerate_strata(f)) {
    if (s.codim != f.n - 1) continue;
    GQuad zv = detail::dhym_charge(f, c, chE, s.cone);
    classify(zv, +1, "curve", s.cone);
  }
  GQuad z1 = detail::dhym_charge(f, c, line_bundle_ch(f, L1, k), {});
  classify(z1, -1, "subbundle", {});
  bool any_violated = false, any_semi = false;
  for (const HigherRankRecord& r : rep.records) {
    if (r.verdict == StratumVerdict::violated) {
      any_violated = true;
      std::string w = r.test;
      for (int i : r.cone) w += " ray " + std::to_string(i);
      rep.witnesses.push_back(w);
    } else if (r.verdict == StratumVerdict::semistable) {
      any_semi = true;
      rep.generic = false;
    }
  }
  rep.overall = any_violated ? "violated" : (any_semi ? "semistable" : "positive");
  return rep;
}

// ch of the torsion object S(kL, k_V V):  ch(L^k(k_V V)) - ch(L^k), exact.
inline CohClass<Rat> s_object_chern(const Fan& f, const DivisorClass& L, const Stratum& V,
                                    int k, int k_V) {
  if (V.codim != 1) throw input_error("s_object_chern requires a divisor stratum");
  if (k <= 0 || k_V <= 0) throw input_error("k and k_V must be positive");
  DivisorClass twisted(L.size());
  for (size_t i = 0; i < L.size(); ++i) twisted[i] = Rat(k) * L[i];
  twisted[V.cone[0]] += k_V;
  DivisorClass base(L.size());
  for (size_t i = 0; i < L.size(); ++i) base[i] = Rat(k) * L[i];
  return chern_character(f, twisted) - chern_character(f, base);
}

}  // namespace dhym
