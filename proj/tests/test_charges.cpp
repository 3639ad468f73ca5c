#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dhym/charges.hpp"

using namespace dhym;

static DivisorClass named(const Fan& f, const std::string& n) {
  for (const auto& [name, v] : f.basis)
    if (name == n) return v;
  throw input_error("no basis class " + n);
}

static DivisorClass lin(const DivisorClass& a, const Rat& ca, const DivisorClass& b,
                        const Rat& cb) {
  DivisorClass out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = ca * a[i] + cb * b[i];
  return out;
}

static DivisorClass neg(const DivisorClass& a) {
  DivisorClass out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  return out;
}

// omega = (1/sqrt(3)) (2h - e) on the blow-up of the plane.
static ComplexifiedClass cs_class(const Fan& bl) {
  ComplexifiedClass c;
  c.omega = lin(named(bl, "h"), 2, named(bl, "e"), -1);
  c.scale_r = Rat(1, 3);
  return c;
}

TEST_CASE("central charges") {
  Fan bl = fan_blp_p2();
  ComplexifiedClass c = cs_class(bl);
  DivisorClass twoh = lin(named(bl, "h"), 2, named(bl, "e"), 0);
  GQuad z = central_charge(bl, c, chern_character(bl, twoh));
  CHECK(z.re == Quad(Rat(-3, 2)));
  CHECK(z.im == Quad(Rat(0), Rat(4, 3), Rat(3)));  // 4/sqrt(3)

  CHECK(central_charge(bl, c, CohClass<Rat>(2)).is_zero());

  Fan p2 = fan_p2();
  ComplexifiedClass ch{DivisorClass{1, 0, 0}, 1, {}, 1};
  ch.omega = named(p2, "h");
  GQuad z2 = central_charge(p2, ch, chern_character(p2, DivisorClass(3, Rat(0))));
  CHECK(z2.re == Quad(Rat(1, 2)));
  CHECK(sgn(z2.im) == 0);
}

TEST_CASE("topological angles") {
  Fan p2 = fan_p2();
  ComplexifiedClass c;
  c.omega = named(p2, "h");
  AngleData a = topological_angles(p2, c, named(p2, "h"));
  CHECK(a.phi == doctest::Approx(M_PI / 2));
  CHECK(a.varphi == doctest::Approx(M_PI / 2));
  CHECK(a.supercritical);
  CHECK(a.cot_varphi == Quad(Rat(0)));

  Fan bl = fan_blp_p2();
  AngleData cs = topological_angles(bl, cs_class(bl),
                                    lin(named(bl, "h"), 2, named(bl, "e"), 0));
  CHECK(cs.supercritical);
  CHECK(cs.cot_varphi == Quad(Rat(0), Rat(3, 8), Rat(3)));  // 3 sqrt(3) / 8

  CHECK_THROWS_AS(topological_angles(p2, c, DivisorClass(2, Rat(0))), input_error);
}

TEST_CASE("surface cotangent formula on random instances") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> coef(-4, 4);
  int done = 0;
  while (done < 100) {
    Fan f = preset_fan(done % 2 ? "blp_p2" : "p1xp1");
    DivisorClass w(f.num_rays()), al(f.num_rays());
    for (auto& x : w) x = coef(rng);
    for (auto& x : al) x = coef(rng);
    if (!is_kahler(f, w)) continue;
    ComplexifiedClass c;
    c.omega = w;
    c.scale_r = done % 3 ? Rat(1) : Rat(1, 3);
    c.k = done % 5 ? Rat(1) : Rat(2);
    std::vector<DivisorClass> aa = {al, al}, ww = {w, w}, aw = {al, w};
    Quad wq = Quad(Rat(0), c.k, c.scale_r);  // scalar k sqrt(r)
    Quad adotw = Quad(intersect_divisors(f, aw)) * wq;
    if (sgn(adotw) == 0) continue;
    AngleData a = topological_angles(f, c, al);
    Quad expect = (Quad(intersect_divisors(f, aa)) - wq * wq * Quad(intersect_divisors(f, ww))) /
                  (Quad(Rat(2)) * adotw);
    REQUIRE(a.cot_defined);
    CHECK(a.cot_varphi == expect);
    ++done;
  }
}

TEST_CASE("dhym criterion flags the exceptional curve") {
  Fan bl = fan_blp_p2();
  StabilityReport rep =
      dhym_nakai_moishezon(bl, cs_class(bl), lin(named(bl, "h"), 2, named(bl, "e"), 0));
  CHECK(rep.overall == "violated");
  REQUIRE(rep.witnesses.size() == 1);
  CHECK(rep.witnesses[0] == Cone{3});  // the exceptional ray
  for (const StratumRecord& s : rep.strata) {
    if (s.cone == Cone{3}) {
      CHECK(s.lhs == Quad(Rat(-3, 8)));
      CHECK(s.verdict == StratumVerdict::violated);
    } else {
      CHECK(s.verdict == StratumVerdict::positive);
    }
  }
}

TEST_CASE("dhym criterion positive on the plane") {
  Fan p2 = fan_p2();
  ComplexifiedClass c;
  c.omega = named(p2, "h");
  StabilityReport rep = dhym_nakai_moishezon(p2, c, named(p2, "h"));
  CHECK(rep.overall == "positive");
  CHECK(rep.generic);
  for (const StratumRecord& s : rep.strata)
    if (s.codim == 1) CHECK(s.lhs == Quad(Rat(1)));
}

TEST_CASE("dhym verdicts are scale invariant") {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> coef(-4, 4);
  int done = 0;
  while (done < 40) {
    Fan f = preset_fan(done % 2 ? "blp_p2" : "blpq_p2");
    DivisorClass w(f.num_rays()), al(f.num_rays());
    for (auto& x : w) x = coef(rng);
    for (auto& x : al) x = coef(rng);
    if (!is_kahler(f, w)) continue;
    ComplexifiedClass c;
    c.omega = w;
    StabilityReport base;
    try {
      base = dhym_nakai_moishezon(f, c, al);
    } catch (const input_error&) {
      continue;  // wall instances are rejected identically at every scale
    }
    for (int k : {2, 7}) {
      ComplexifiedClass ck = c;
      ck.k = k;
      DivisorClass alk(al.size());
      for (size_t i = 0; i < al.size(); ++i) alk[i] = k * al[i];
      StabilityReport scaled = dhym_nakai_moishezon(f, ck, alk);
      CHECK(scaled.overall == base.overall);
      CHECK(scaled.generic == base.generic);
      REQUIRE(scaled.strata.size() == base.strata.size());
      for (size_t i = 0; i < base.strata.size(); ++i)
        CHECK(scaled.strata[i].verdict == base.strata[i].verdict);
    }
    ++done;
  }
}

TEST_CASE("conjugation flips curve-stratum signs") {
  std::mt19937 rng(37);
  std::uniform_int_distribution<int> coef(-4, 4);
  int done = 0;
  while (done < 40) {
    Fan f = fan_blp_p2();
    DivisorClass w(f.num_rays()), al(f.num_rays());
    for (auto& x : w) x = coef(rng);
    for (auto& x : al) x = coef(rng);
    if (!is_kahler(f, w)) continue;
    ComplexifiedClass c;
    c.omega = w;
    StabilityReport pos, negr;
    try {
      pos = dhym_nakai_moishezon(f, c, al);
      negr = dhym_nakai_moishezon(f, c, neg(al));
    } catch (const input_error&) {
      continue;
    }
    REQUIRE(pos.strata.size() == negr.strata.size());
    for (size_t i = 0; i < pos.strata.size(); ++i) {
      if (pos.strata[i].codim != 1) continue;
      CHECK(pos.strata[i].lhs == -negr.strata[i].lhs);
    }
    ++done;
  }
}

TEST_CASE("phase form matches the exact criterion") {
  Fan p2 = fan_p2();
  ComplexifiedClass c;
  c.omega = named(p2, "h");
  PhaseFormReport pf = phase_inequality_form(p2, c, neg(named(p2, "h")));
  CHECK(pf.overall == "positive");

  Fan bl = fan_blp_p2();
  PhaseFormReport cs = phase_inequality_form(
      bl, cs_class(bl), neg(lin(named(bl, "h"), 2, named(bl, "e"), 0)));
  CHECK(cs.overall == "violated");
  REQUIRE(cs.witnesses.size() == 1);
  CHECK(cs.witnesses[0] == Cone{3});
}

TEST_CASE("phase form cross-validates on random supercritical instances") {
  std::mt19937 rng(41);
  std::uniform_int_distribution<int> coef(-4, 4);
  int done = 0;
  while (done < 100) {
    Fan f = preset_fan(done % 3 == 0 ? "p1xp1" : (done % 3 == 1 ? "blp_p2" : "blpq_p2"));
    DivisorClass w(f.num_rays()), al(f.num_rays());
    for (auto& x : w) x = coef(rng);
    for (auto& x : al) x = coef(rng);
    if (!is_kahler(f, w)) continue;
    ComplexifiedClass c;
    c.omega = w;
    AngleData a;
    try {
      a = topological_angles(f, c, al);
    } catch (const input_error&) {
      continue;
    }
    if (!a.supercritical) continue;
    StabilityReport d = dhym_nakai_moishezon(f, c, al);
    PhaseFormReport p = phase_inequality_form(f, c, neg(al));
    REQUIRE(d.strata.size() == p.strata.size());
    for (size_t i = 0; i < d.strata.size(); ++i) {
      REQUIRE(d.strata[i].cone == p.strata[i].cone);
      CHECK(d.strata[i].verdict == p.strata[i].verdict);
    }
    CHECK(d.overall == p.overall);
    ++done;
  }
}

TEST_CASE("jacob-sheu on the blown-up projective space") {
  Fan b = fan_blp_pn(3);
  ComplexifiedClass c;
  c.omega = lin(named(b, "h"), 3, named(b, "e"), -1);
  REQUIRE(is_kahler(b, c.omega));

  SUBCASE("trivial bundle") {
    JacobSheuReport rep = jacob_sheu_check(b, c, DivisorClass(b.num_rays(), Rat(0)));
    CHECK(rep.trivial_bundle);
    CHECK(rep.overall == "positive");
  }

  SUBCASE("dual of the hyperplane, against a direct integral oracle") {
    DivisorClass L = neg(named(b, "h"));  // L^dual = H, ample? H is only nef here
    DivisorClass Lamp = neg(lin(named(b, "h"), 3, named(b, "e"), -1));
    JacobSheuReport rep = jacob_sheu_check(b, c, Lamp);
    REQUIRE(rep.divisors.size() == size_t(b.num_rays()));
    // Oracle: arg(-integral_V e^{-i omega} ch(L^dual)) per toric divisor vs
    // the theta window.
    CohClass<std::complex<double>> expo(b.n);
    for (int i = 0; i < b.num_rays(); ++i) {
      double wi = to_double(c.omega[i]) * std::sqrt(to_double(c.scale_r)) * to_double(c.k);
      expo.add_term({i}, std::complex<double>(-to_double(Lamp[i]), -wi));
    }
    CohClass<std::complex<double>> full = coh_exp(expo);
    for (const JacobSheuRecord& r : rep.divisors) {
      CohClass<std::complex<double>> cut = full;
      CohClass<std::complex<double>> dv(b.n);
      dv.add_term({r.ray}, std::complex<double>(1));
      std::complex<double> zv = -evaluate_top(b, cut * dv);
      double diff = std::remainder(std::arg(zv) - rep.theta_hat, 2 * M_PI);
      bool inside = std::abs(diff) < M_PI / 2 - 1e-12;
      CHECK((r.verdict == StratumVerdict::positive) == inside);
      CHECK(std::abs(std::remainder(r.arg_v - std::arg(zv), 2 * M_PI)) < 1e-9);
    }
  }

  SUBCASE("rejects a non-ample dual") {
    CHECK_THROWS_AS(jacob_sheu_check(b, c, named(b, "h")), input_error);
  }

  SUBCASE("rejects other fans") {
    Fan p2 = fan_p2();
    ComplexifiedClass cp;
    cp.omega = named(p2, "h");
    CHECK_THROWS_AS(jacob_sheu_check(p2, cp, neg(named(p2, "h"))), input_error);
  }
}

TEST_CASE("higher rank inequalities") {
  Fan bl = fan_blp_p2();
  ComplexifiedClass c;
  c.omega = lin(named(bl, "h"), 2, named(bl, "e"), -1);
  DivisorClass L1 = lin(named(bl, "h"), 1, named(bl, "e"), -2);
  DivisorClass O(bl.num_rays(), Rat(0));

  HigherRankReport rep = higher_rank_inequalities(bl, c, L1, O, 1);
  CHECK(sgn(rep.Z_E.re) == 0);
  CHECK(rep.Z_E.im == Quad(Rat(9, 2)));

  HigherRankReport trivial = higher_rank_inequalities(bl, c, O, O, 1);
  bool semi_sub = false;
  for (const auto& r : trivial.records)
    if (r.test == "subbundle" && r.verdict == StratumVerdict::semistable) semi_sub = true;
  CHECK(semi_sub);
  CHECK(!trivial.generic);

  // Keller-Scarpa data at increasing scale: reports emitted with finite args.
  for (int k : {1, 4, 16}) {
    HigherRankReport ks = higher_rank_inequalities(bl, c, L1, O, k);
    CHECK(std::isfinite(ks.arg_E));
    CHECK(!ks.records.empty());
  }
}

TEST_CASE("s-object chern classes") {
  Fan bl = fan_blp_p2();
  DivisorClass L = lin(named(bl, "h"), 2, named(bl, "e"), 0);
  Stratum V{Cone{3}, 1};
  CohClass<Rat> s = s_object_chern(bl, L, V, 1, 1);
  DivisorClass twisted = L;
  twisted[3] += 1;
  CohClass<Rat> expect = chern_character(bl, twisted) - chern_character(bl, L);
  CHECK((s - expect).terms.empty());
  CHECK(s.terms.find(std::vector<int>{}) == s.terms.end());  // rank 0
  CHECK_THROWS_AS(s_object_chern(bl, L, Stratum{Cone{0, 1}, 2}, 1, 1), input_error);
}
