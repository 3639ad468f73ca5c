#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "dhym/lg.hpp"

using namespace dhym;

static DivisorClass named(const Fan& f, const std::string& n) {
  for (const auto& [name, v] : f.basis)
    if (name == n) return v;
  throw input_error("no basis class " + n);
}

static ComplexifiedClass kahler(const Fan& f, const DivisorClass& omega) {
  ComplexifiedClass c;
  c.omega = omega;
  return c;
}

// exp(-2 pi U + 2 pi i B) from the recorded exact logs.
static Cx coeff_from_logs(const Quad& u, const Rat& b) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::exp(Cx(-two_pi * u.to_double(), two_pi * to_double(b)));
}

TEST_CASE("superpotential construction") {
  SUBCASE("P^1: W = x + q/x") {
    Fan p1 = fan_pn(1);
    DivisorClass omega(2, Rat(0));
    omega[0] = Rat(3, 4);  // integral over the curve is 3/4
    LGModel m = build_lg(p1, kahler(p1, omega));
    CHECK(!m.weak_fano_warning);
    CHECK(m.exponents == p1.rays);
    REQUIRE(m.gauge.size() == 1);
    int g = m.gauge[0], other = 1 - g;
    CHECK(m.coefficients[g] == Cx(1, 0));
    CHECK(m.logU[other] == Quad(Rat(0), Rat(3, 4), Rat(1)));
    CHECK(m.logB[other] == Rat(0));
    CHECK(std::abs(m.coefficients[other] - std::exp(-2 * 3.14159265358979324 * 0.75)) < 1e-15);
  }

  SUBCASE("P^2: W = x + y + q/(xy)") {
    Fan p2 = fan_p2();
    LGModel m = build_lg(p2, kahler(p2, named(p2, "h")));
    int fixed = 0;
    for (const Cx& a : m.coefficients)
      if (a == Cx(1, 0)) ++fixed;
    CHECK(fixed >= 2);
    // One non-gauge ray carrying q = e^{-2 pi}.
    for (int j = 0; j < 3; ++j) {
      bool in_gauge = std::find(m.gauge.begin(), m.gauge.end(), j) != m.gauge.end();
      if (in_gauge) continue;
      CHECK(m.logU[j] == Quad(Rat(0), Rat(1), Rat(1)));
    }
  }

  SUBCASE("blow-up: both curve relations are satisfied") {
    Fan bl = fan_blp_p2();
    DivisorClass omega(4, Rat(0));
    for (size_t i = 0; i < 4; ++i)
      omega[i] = named(bl, "h")[i] * 2 - named(bl, "e")[i];
    CHECK_NOTHROW(build_lg(bl, kahler(bl, omega)));  // internal invariant check
  }

  SUBCASE("weak Fano warning") {
    Fan h2 = fan_hirzebruch(2);
    DivisorClass omega(4, Rat(0));
    for (size_t i = 0; i < 4; ++i)
      omega[i] = named(h2, "s")[i] + 3 * named(h2, "fib")[i];
    REQUIRE(is_kahler(h2, omega));
    LGModel m = build_lg(h2, kahler(h2, omega));
    CHECK(m.weak_fano_warning);
    CHECK(!build_lg(fan_p2(), kahler(fan_p2(), named(fan_p2(), "h"))).weak_fano_warning);
  }
}

TEST_CASE("curve relation invariant for random classes") {
  std::mt19937 rng(24680);
  std::uniform_int_distribution<int> coef(1, 6);
  std::vector<Fan> fans = {fan_p2(), fan_p1xp1(), fan_blp_p2(), fan_blpq_p2(), fan_pn(3)};
  for (const Fan& f : fans) {
    int tried = 0;
    while (tried < 8) {
      DivisorClass omega(f.num_rays(), Rat(0));
      for (Rat& x : omega) x = coef(rng);
      if (!is_kahler(f, omega)) continue;
      ++tried;
      ComplexifiedClass c = kahler(f, omega);
      if (tried % 2 == 0) {
        c.beta = DivisorClass(f.num_rays(), Rat(0));
        c.beta[0] = Rat(coef(rng), 7);
      }
      LGModel m = build_lg(f, c);
      DivisorClass beta = beta_of(f, c);
      for (const ToricCurve& gen : mori_generators(f)) {
        // Product of a_i^{d_i}, with integer exponents, against the exact
        // pairing of the complexified class with the curve.
        Cx prod(1, 0);
        Rat wdot = 0, bdot = 0;
        for (int i = 0; i < f.num_rays(); ++i) {
          long long d = static_cast<long long>(numerator(gen.pairing[i]));
          for (long long r = 0; r < std::abs(d); ++r)
            prod = d > 0 ? prod * m.coefficients[i] : prod / m.coefficients[i];
          wdot += omega[i] * gen.pairing[i];
          bdot += beta[i] * gen.pairing[i];
        }
        constexpr double two_pi = 6.283185307179586476925286766559;
        Cx expect = std::exp(Cx(-two_pi * to_double(wdot), two_pi * to_double(bdot)));
        CHECK(std::abs(prod - expect) < 1e-12 * (1 + std::abs(expect)));
      }
      // The recorded logs reproduce the numeric coefficients.
      for (int i = 0; i < f.num_rays(); ++i)
        CHECK(std::abs(m.coefficients[i] - coeff_from_logs(m.logU[i], m.logB[i])) < 1e-14);
    }
  }
}

TEST_CASE("curve class enumeration") {
  CHECK(enumerate_curve_classes(fan_pn(1), 5).size() == 6);
  for (const CurveClass& c : enumerate_curve_classes(fan_pn(1), 5)) {
    CHECK(c.d[0] == c.degree);
    CHECK(c.d[1] == c.degree);
  }
  CHECK(enumerate_curve_classes(fan_p1xp1(), 3).size() == 10);
  CHECK(enumerate_curve_classes(fan_pn(3), 2).size() == 3);
  // Picard rank 2: combinations of the two extremal generators.
  auto bl = enumerate_curve_classes(fan_blp_p2(), 2);
  CHECK(bl.size() == 6);
  CHECK_THROWS_AS(enumerate_curve_classes(fan_blpq_p2(), 2), input_error);
}

TEST_CASE("I-function") {
  Fan p1 = fan_pn(1);
  std::vector<Cx> q = {Cx(0.01, 0)};

  SUBCASE("degree zero is the Novikov prefactor") {
    CohClass<Cx> lead = i_function(p1, q, Cx(1, 0), 0);
    CohClass<Cx> p = divisor_class<Cx>(p1, nef_duals(p1)[0]);
    CohClass<Cx> expect = coh_exp(scale(p, std::log(Cx(0.01, 0))));
    CHECK(detail::coh_norm(lead + scale(expect, Cx(-1, 0))) < 1e-15);
  }

  SUBCASE("partial sums are Cauchy well below 1e-14") {
    IFunctionResult r = i_function_full(p1, q, Cx(1, 0), 20);
    CHECK(r.tail < 1e-14);
    CHECK(r.truncation <= 20);
  }

  SUBCASE("divergence is detected") {
    CHECK_THROWS_AS(i_function_full(p1, {Cx(1e6, 0)}, Cx(1, 0), 30), numeric_error);
  }
}

TEST_CASE("periods on the positive cycle match the Bessel oracle") {
  Fan p1 = fan_pn(1);
  DivisorClass omega(2, Rat(0));
  omega[0] = Rat(3, 4);
  LGModel m = build_lg(p1, kahler(p1, omega));
  double q = std::exp(-2 * 3.14159265358979324 * 0.75);
  for (double z : {0.5, 1.0, 2.0}) {
    PeriodResult pr = positive_cycle_period(m, z);
    double oracle = 2 * std::cyl_bessel_k(0.0, 2 * std::sqrt(q) / z);
    CHECK(pr.method == "quadrature");
    CHECK(pr.value.imag() == 0.0);
    CHECK(std::abs(pr.value.real() - oracle) < 1e-9 * oracle);
  }
  CHECK_THROWS_AS(positive_cycle_period(m, -1.0), input_error);
  ComplexifiedClass cb = kahler(p1, omega);
  cb.beta = DivisorClass(2, Rat(0));
  cb.beta[0] = Rat(1, 3);
  CHECK_THROWS_AS(positive_cycle_period(build_lg(p1, cb), 1.0), input_error);
}

TEST_CASE("cohomological period identity on P^1") {
  Fan p1 = fan_pn(1);
  CohClass<Rat> chO = chern_character(p1, DivisorClass(2, Rat(0)));

  // Exact Bessel value at the advertised point.
  PeriodResult g = gamma_lhs(p1, {Cx(0.01, 0)}, Cx(1, 0), chO);
  CHECK(g.method == "gamma_lhs");
  CHECK(g.normalization == 1.0);
  CHECK(std::abs(g.value.real() - 3.5054076) < 1e-6);
  CHECK(std::abs(g.value.imag()) < 1e-10);

  // Identity against the Bessel closed form across the grid.
  for (double q : {0.01, 0.04})
    for (double z : {0.5, 1.0, 2.0}) {
      PeriodResult gl = gamma_lhs(p1, {Cx(q, 0)}, Cx(z, 0), chO);
      double oracle = 2 * std::cyl_bessel_k(0.0, 2 * std::sqrt(q) / z);
      CHECK(std::abs(gl.value - Cx(oracle, 0)) < 1e-6 * oracle);
    }

  // Identity against direct quadrature at a rationally-specified class.
  DivisorClass omega(2, Rat(0));
  omega[0] = Rat(3, 4);
  LGModel m = build_lg(p1, kahler(p1, omega));
  double q = std::exp(-2 * 3.14159265358979324 * 0.75);
  PeriodResult quad = positive_cycle_period(m, 1.0);
  PeriodResult coh = gamma_lhs(p1, {Cx(q, 0)}, Cx(1, 0), chO);
  CHECK(std::abs(coh.value - quad.value) < 1e-6 * std::abs(quad.value));

  // Vanishing on the zero class.
  CHECK(std::abs(gamma_lhs(p1, {Cx(0.01, 0)}, Cx(1, 0), CohClass<Rat>(1)).value) < 1e-14);
}

TEST_CASE("cohomological period identity on P^2") {
  Fan p2 = fan_p2();
  DivisorClass omega(3, Rat(0));
  for (size_t i = 0; i < 3; ++i) omega[i] = named(p2, "h")[i] * Rat(11, 10);
  LGModel m = build_lg(p2, kahler(p2, omega));
  double q = std::exp(-2 * 3.14159265358979324 * 1.1);
  PeriodResult quad = positive_cycle_period(m, 1.0);
  CohClass<Rat> chO = chern_character(p2, DivisorClass(3, Rat(0)));
  PeriodResult coh = gamma_lhs(p2, {Cx(q, 0)}, Cx(1, 0), chO);
  CHECK(std::abs(coh.value - quad.value) < 1e-4 * std::abs(quad.value));
}

TEST_CASE("scaling expansion: first-order convergence in 1/k") {
  Fan p1 = fan_pn(1);
  DivisorClass omega(2, Rat(0));
  omega[0] = Rat(1, 2);
  DivisorClass L(2, Rat(0));
  L[0] = Rat(1);
  constexpr double two_pi = 6.283185307179586476925286766559;
  double q = std::exp(-two_pi * 0.5);

  // Target: integral over X of e^{-i omega} ch(L).
  CohClass<Cx> wcx = divisor_class<Cx>(p1, omega);
  CohClass<Cx> target_c = coh_exp(scale(wcx, Cx(0, -1))) * to_cx(chern_character(p1, L));
  Cx target = evaluate_top(p1, target_c);

  std::vector<double> ks = {8, 16, 32}, errs;
  for (double k : ks) {
    DivisorClass Lk(2, Rat(0));
    Lk[0] = Rat(static_cast<long long>(k));
    PeriodResult g = gamma_lhs(p1, {Cx(std::pow(q, k), 0)}, Cx(1, 0),
                               chern_character(p1, Lk));
    Cx approx = g.value / (Cx(0, two_pi) * k);
    errs.push_back(std::abs(approx - target));
  }
  CHECK(errs[0] > errs[1]);
  CHECK(errs[1] > errs[2]);
  double slope = std::log(errs[0] / errs[2]) / std::log(4.0);
  CHECK(slope > 0.8);
  CHECK(slope < 1.2);
}

TEST_CASE("critical points") {
  Fan p1 = fan_pn(1);
  DivisorClass omega(2, Rat(0));
  omega[0] = Rat(1);
  LGModel m1 = build_lg(p1, kahler(p1, omega));
  double q = std::exp(-2 * 3.14159265358979324);
  auto pts1 = critical_points(m1);
  REQUIRE(pts1.size() == 2);
  CHECK(std::abs(pts1[0][0] - Cx(-std::sqrt(q), 0)) < 1e-10);
  CHECK(std::abs(pts1[1][0] - Cx(std::sqrt(q), 0)) < 1e-10);

  Fan p2 = fan_p2();
  LGModel m2 = build_lg(p2, kahler(p2, named(p2, "h")));
  auto pts2 = critical_points(m2);
  REQUIRE(pts2.size() == 3);
  double q2 = std::exp(-2 * 3.14159265358979324);
  for (const auto& x : pts2) {
    CHECK(std::abs(x[0] - x[1]) < 1e-8);
    Cx cube = x[0] * x[0] * x[0];
    CHECK(std::abs(cube - Cx(q2, 0)) < 1e-10);
  }

  // Count equals the number of maximal cones on every surface preset.
  std::vector<Fan> fans = {fan_p1xp1(), fan_blp_p2(), fan_blpq_p2(), fan_hirzebruch(2)};
  std::mt19937 rng(777);
  std::uniform_int_distribution<int> coef(1, 4);
  for (const Fan& f : fans) {
    DivisorClass w(f.num_rays(), Rat(0));
    do {
      for (Rat& x : w) x = coef(rng);
    } while (!is_kahler(f, w));
    LGModel m = build_lg(f, kahler(f, w));
    CHECK(critical_points(m).size() == f.max_cones.size());
  }
}

TEST_CASE("residue pairing") {
  Fan p1 = fan_pn(1);
  DivisorClass omega(2, Rat(0));
  omega[0] = Rat(1, 2);
  LGModel m = build_lg(p1, kahler(p1, omega));
  Laurent one = parse_laurent("1", 1), x = parse_laurent("x", 1);

  // Desk values: <1,1> = 0, <1,x> = 1, <x,x> = 0.
  CHECK(std::abs(residue_pairing(m, one, one)) < 1e-10);
  CHECK(std::abs(residue_pairing(m, one, x) - Cx(1, 0)) < 1e-10);
  CHECK(std::abs(residue_pairing(m, x, x)) < 1e-10);

  SUBCASE("symmetry and bilinearity on a surface") {
    Fan pp = fan_p1xp1();
    DivisorClass w(4, Rat(0));
    for (Rat& c : w) c = Rat(1, 2);
    REQUIRE(is_kahler(pp, w));
    LGModel ms = build_lg(pp, kahler(pp, w));
    std::mt19937 rng(31415);
    std::uniform_int_distribution<int> e(-2, 2), c(-3, 3);
    auto rnd = [&]() {
      std::ostringstream os;
      bool any = false;
      for (int t = 0; t < 3; ++t) {
        int cc = c(rng);
        if (cc == 0) continue;
        if (any) os << " + ";
        os << cc << "*x^" << e(rng) << "*y^" << e(rng);
        any = true;
      }
      if (!any) os << "1";
      return parse_laurent(os.str(), 2);
    };
    for (int trial = 0; trial < 10; ++trial) {
      Laurent a = rnd(), b = rnd(), cc = rnd();
      Cx ab = residue_pairing(ms, a, b), ba = residue_pairing(ms, b, a);
      CHECK(std::abs(ab - ba) < 1e-8 * (1 + std::abs(ab)));
      Laurent apc = a;
      for (const auto& t : cc.terms) apc.terms.push_back(t);
      Cx lhs = residue_pairing(ms, apc, b);
      Cx rhs = ab + residue_pairing(ms, cc, b);
      CHECK(std::abs(lhs - rhs) < 1e-8 * (1 + std::abs(rhs)));
    }
  }

  SUBCASE("Laurent parsing") {
    Laurent p = parse_laurent("2*x^-1*y^3 + 1 - x", 2);
    REQUIRE(p.terms.size() == 3);
    Cx v = eval_laurent(p, {Cx(2, 0), Cx(1.5, 0)});
    CHECK(std::abs(v - Cx(2 * 0.5 * 3.375 + 1 - 2, 0)) < 1e-12);
    CHECK_THROWS_AS(parse_laurent("", 1), input_error);
    CHECK_THROWS_AS(parse_laurent("y", 1), input_error);
    CHECK_THROWS_AS(parse_laurent("x + *", 1), input_error);
  }
}
