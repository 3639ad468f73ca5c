#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dhym/bridgeland.hpp"

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

static ComplexifiedClass cs_class(const Fan& bl) {
  ComplexifiedClass c;
  c.omega = lin(named(bl, "h"), 2, named(bl, "e"), -1);
  c.scale_r = Rat(1, 3);
  return c;
}

TEST_CASE("twisted slopes") {
  Fan bl = fan_blp_p2();
  ComplexifiedClass c = cs_class(bl);
  DivisorClass twoh = lin(named(bl, "h"), 2, named(bl, "e"), 0);
  auto mu = twisted_slope(bl, c, chern_character(bl, twoh));
  REQUIRE(mu);
  CHECK(*mu == Quad(Rat(0), Rat(4, 3), Rat(3)));  // 4/sqrt(3)

  auto mu0 = twisted_slope(bl, c, chern_character(bl, DivisorClass(4, Rat(0))));
  REQUIRE(mu0);
  CHECK(sgn(*mu0) == 0);

  Stratum V{Cone{3}, 1};
  CHECK(!twisted_slope(bl, c, s_object_chern(bl, twoh, V, 1, 1)));  // torsion

  CHECK_THROWS_AS(twisted_slope(bl, c, CohClass<Rat>(2)), input_error);
}

TEST_CASE("heart membership") {
  Fan bl = fan_blp_p2();
  ComplexifiedClass c = cs_class(bl);
  DivisorClass ample = lin(named(bl, "h"), 2, named(bl, "e"), -1);
  DivisorClass negample = lin(named(bl, "h"), -2, named(bl, "e"), 1);
  CHECK(heart_membership(bl, c, chern_character(bl, ample), 0).member);
  HeartCheck bad = heart_membership(bl, c, chern_character(bl, ample), 1);
  CHECK(!bad.member);
  CHECK(bad.reason == "slope > 0");
  CHECK(heart_membership(bl, c, chern_character(bl, negample), 1).member);
  Stratum V{Cone{3}, 1};
  CHECK(heart_membership(bl, c, s_object_chern(bl, ample, V, 1, 1), 0).member);
  CHECK(!heart_membership(bl, c, s_object_chern(bl, ample, V, 1, 1), 1).member);
}

TEST_CASE("negative curves") {
  CHECK(negative_curves(fan_p2()).empty());
  auto bl = negative_curves(fan_blp_p2());
  REQUIRE(bl.size() == 1);
  CHECK(bl[0].ray == 3);
  CHECK(bl[0].self_int == -1);
  auto h2 = negative_curves(preset_fan("hirzebruch(2)"));
  REQUIRE(h2.size() == 1);
  CHECK(h2[0].self_int == -2);
  auto b2 = negative_curves(fan_blpq_p2());
  CHECK(b2.size() == 3);  // e1, e2 and the strict transform of the line
}

TEST_CASE("arcara-miles scan on the worked blow-up example") {
  Fan bl = fan_blp_p2();
  ComplexifiedClass c = cs_class(bl);
  DivisorClass L = lin(named(bl, "h"), 2, named(bl, "e"), 0);

  Verdict v1 = arcara_miles_scan(bl, c, L, 1);
  CHECK(v1.status == VerdictStatus::stable);
  CHECK(!v1.conditional_am);  // known unconditionally on this surface
  REQUIRE(v1.inequalities.size() == 1);
  // On the 1/sqrt(3)-normalized slopes the inequality reads 1/3 < 3/8.
  Quad unit = Quad(Rat(0), Rat(1), Rat(3));  // sqrt(3); nu / sqrt(3) is rational
  CHECK(v1.inequalities[0].lhs / unit == Quad(Rat(1, 3)) * Quad(Rat(1)));
  CHECK(v1.inequalities[0].rhs / unit == Quad(Rat(3, 8)));

  Verdict v2 = arcara_miles_scan(bl, c, L, 2);
  CHECK(v2.status == VerdictStatus::unstable);
  CHECK(!v2.witness.empty());
  REQUIRE(v2.inequalities.size() == 1);
  CHECK(v2.inequalities[0].lhs / unit == Quad(Rat(11, 28)));
  CHECK(v2.inequalities[0].rhs / unit == Quad(Rat(3, 8)));
}

TEST_CASE("scan is vacuous without negative curves") {
  Fan p2 = fan_p2();
  ComplexifiedClass c;
  c.omega = named(p2, "h");
  Verdict v = arcara_miles_scan(p2, c, lin(named(p2, "h"), -1, named(p2, "h"), 0), 3);
  CHECK(v.status == VerdictStatus::stable);
  CHECK(v.inequalities.empty());
  CHECK(v.conditional_am);
}

TEST_CASE("k-scan records flips") {
  Fan bl = fan_blp_p2();
  ComplexifiedClass c = cs_class(bl);
  DivisorClass L = lin(named(bl, "h"), 2, named(bl, "e"), 0);
  KScanResult ks = k_scan(bl, c, L, 50);
  REQUIRE(ks.verdicts.size() == 50);
  CHECK(ks.flips == std::vector<int>{2});
  CHECK(ks.verdicts[0].second.status == VerdictStatus::stable);
  for (int k = 2; k <= 50; ++k)
    CHECK(ks.verdicts[k - 1].second.status == VerdictStatus::unstable);

  // A positive instance stays stable for every k.
  Fan p2 = fan_p2();
  ComplexifiedClass cp;
  cp.omega = named(p2, "h");
  KScanResult pos = k_scan(p2, cp, lin(named(p2, "h"), -1, named(p2, "h"), 0), 10);
  CHECK(pos.flips.empty());

  // A constructed equality: omega = 2h - e, L = 3h sits on a wall at k = 1.
  ComplexifiedClass cw;
  cw.omega = lin(named(bl, "h"), 2, named(bl, "e"), -1);
  KScanResult wall = k_scan(bl, cw, lin(named(bl, "h"), 3, named(bl, "e"), 0), 3);
  CHECK(wall.verdicts[0].second.status == VerdictStatus::semistable);
  CHECK(wall.verdicts[1].second.status == VerdictStatus::unstable);
}

TEST_CASE("dictionary on worked data") {
  Fan bl = fan_blp_p2();
  ComplexifiedClass c = cs_class(bl);
  // L = -2h so the dHYM side runs on alpha = 2h.
  DivisorClass L = lin(named(bl, "h"), -2, named(bl, "e"), 0);
  DictionaryRecord rec = dhym_bridgeland_dictionary(bl, c, L, 10);
  CHECK(rec.consistent);
  CHECK(!rec.wall);
  CHECK(rec.dhym.overall == "violated");
  CHECK(rec.am.status == VerdictStatus::unstable);

  // Ample positive side: omega = 2h - e, L^dual = 2h - e.
  ComplexifiedClass cp;
  cp.omega = lin(named(bl, "h"), 2, named(bl, "e"), -1);
  DivisorClass Lp = lin(named(bl, "h"), -2, named(bl, "e"), 1);
  DictionaryRecord ok = dhym_bridgeland_dictionary(bl, cp, Lp, 10);
  CHECK(ok.consistent);
  CHECK(ok.dhym.overall == "positive");
  CHECK(ok.am.status == VerdictStatus::stable);

  CHECK_THROWS_AS(
      dhym_bridgeland_dictionary(bl, cp, lin(named(bl, "h"), 1, named(bl, "e"), 0), 4),
      input_error);
}

TEST_CASE("dictionary is consistent at large k on random generic instances") {
  std::mt19937 rng(61);
  std::uniform_int_distribution<int> coef(1, 6);
  Fan bl = fan_blp_p2();
  DivisorClass h = named(bl, "h"), e = named(bl, "e");
  int done = 0;
  while (done < 50) {
    DivisorClass w = lin(h, coef(rng), e, -coef(rng));
    DivisorClass a = lin(h, coef(rng), e, -coef(rng));
    if (!is_kahler(bl, w) || !is_kahler(bl, a)) continue;
    ComplexifiedClass c;
    c.omega = w;
    DivisorClass L(a.size());
    for (size_t i = 0; i < a.size(); ++i) L[i] = -a[i];
    DictionaryRecord rec = dhym_bridgeland_dictionary(bl, c, L, 64);
    CHECK(rec.consistent);
    ++done;
  }
}

TEST_CASE("higher rank instability") {
  Fan p2 = fan_p2();
  ComplexifiedClass cp;
  cp.omega = named(p2, "h");
  DivisorClass negh = lin(named(p2, "h"), -1, named(p2, "h"), 0);

  SUBCASE("symmetric data is a semistable boundary") {
    Verdict v = higher_rank_instability(p2, cp, negh, negh, 1);
    bool sub_equal = false;
    for (const auto& i : v.inequalities)
      if (i.destabilizer == "L1^k[1]" && i.cmp == 0) sub_equal = true;
    CHECK(sub_equal);
    CHECK(v.status != VerdictStatus::unstable);
  }

  SUBCASE("slope precondition is enforced") {
    CHECK_THROWS_AS(higher_rank_instability(p2, cp, named(p2, "h"), negh, 1), input_error);
  }

  SUBCASE("rank-2 data on the blow-up, beta sweep") {
    Fan bl = fan_blp_p2();
    ComplexifiedClass c;
    c.omega = lin(named(bl, "h"), 2, named(bl, "e"), -1);
    DivisorClass L1 = lin(named(bl, "h"), 1, named(bl, "e"), -2);
    DivisorClass O(bl.num_rays(), Rat(0));

    // Without a B-field the extension sits on a stability boundary: the
    // sub-object inequality for L1^k[1] is an exact equality.
    Verdict v0 = higher_rank_instability(bl, c, L1, O, 1);
    CHECK(v0.status != VerdictStatus::unstable);
    bool boundary = false;
    for (const auto& i : v0.inequalities)
      if (i.destabilizer == "L1^k[1]" && i.cmp == 0) boundary = true;
    CHECK(boundary);

    // Any positive multiple of omega as B-field tilts the phases so that
    // L1^k[1] strictly destabilises.  Exact phase deficits below the real
    // axis: 6t/(3r^2+3-3t^2) for the sub vs 12t/(3r^2+6-6t^2) for the
    // extension, and the former is smaller for every t > 0.
    for (Rat t : {Rat(1, 4), Rat(10)}) {
      c.beta = lin(c.omega, t, O, 0);
      Verdict v = higher_rank_instability(bl, c, L1, O, 1);
      CHECK(v.status == VerdictStatus::unstable);
      CHECK(!v.witness.empty());
      bool sub_violated = false;
      for (const auto& i : v.inequalities)
        if (i.destabilizer == "L1^k[1]" && i.cmp > 0) sub_violated = true;
      CHECK(sub_violated);
    }

    // Negative multiples make the twisted slope of O positive, leaving the
    // heart used by the construction.
    c.beta = lin(c.omega, Rat(-1, 2), O, 0);
    CHECK_THROWS_AS(higher_rank_instability(bl, c, L1, O, 1), input_error);
  }
}
