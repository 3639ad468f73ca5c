#pragma once

// Landau-Ginzburg side: the superpotential W = sum_i a_i x^{v_i} mirror to a
// toric manifold, its periods over the positive real cycle, the Givental
// I-function with the Gamma-class pairing, critical points, and the
// leading-order Grothendieck residue pairing.

#include <array>
#include <complex>
#include <random>

#include "charges.hpp"
#include "cones.hpp"

namespace dhym {

using Cx = std::complex<double>;

struct LGModel {
  Fan fan;
  std::vector<Ray> exponents;        // one row per ray
  std::vector<Cx> coefficients;      // a_i, numeric
  std::vector<Quad> logU;            // a_i = exp(-2*pi*U_i + 2*pi*i*B_i), exact
  std::vector<Rat> logB;
  std::vector<int> gauge;            // rays whose coefficient is fixed to 1
  bool weak_fano_warning = false;    // potential used outside its Fano home
};

struct PeriodResult {
  Cx value{0, 0};
  std::string method;                // quadrature | gamma_lhs | saddle
  double error_estimate = 0;
  int truncation = -1;               // Novikov order, when applicable
  double normalization = 1.0;        // factor applied to match quadrature
};

namespace detail {

// Relation vector for ray j against the gauge cone sigma: d_j = 1 and
// sum_i d_i v_i = 0 with support in sigma ∪ {j}.
inline std::vector<Rat> ray_relation(const Fan& f, const Cone& sigma, int j) {
  int n = f.n;
  std::vector<std::vector<Rat>> A(n, std::vector<Rat>(n));
  std::vector<Rat> b(n);
  for (int r = 0; r < n; ++r) {
    for (int cidx = 0; cidx < n; ++cidx) A[r][cidx] = Rat(f.rays[sigma[cidx]][r]);
    b[r] = Rat(-f.rays[j][r]);
  }
  std::vector<Rat> c = solve_rat(A, b);
  std::vector<Rat> d(f.num_rays(), Rat(0));
  d[j] = 1;
  for (int cidx = 0; cidx < n; ++cidx) d[sigma[cidx]] += c[cidx];
  return d;
}

}  // namespace detail

inline LGModel build_lg(const Fan& f, const ComplexifiedClass& c) {
  check_complexified(f, c);
  LGModel m;
  m.fan = f;
  m.exponents = f.rays;
  m.weak_fano_warning = !is_fano(f);
  DivisorClass beta = beta_of(f, c);
  Cone sigma = f.max_cones.front();
  for (int s : sigma) m.gauge.push_back(s);
  m.logU.assign(f.num_rays(), Quad());
  m.logB.assign(f.num_rays(), Rat(0));
  for (int j = 0; j < f.num_rays(); ++j) {
    if (std::find(sigma.begin(), sigma.end(), j) != sigma.end()) continue;
    std::vector<Rat> d = detail::ray_relation(f, sigma, j);
    Rat wdot = 0, bdot = 0;
    for (int i = 0; i < f.num_rays(); ++i) {
      wdot += c.omega[i] * d[i];
      bdot += beta[i] * d[i];
    }
    m.logU[j] = Quad(Rat(0), c.k * wdot, c.scale_r);
    m.logB[j] = c.k * bdot;
  }
  // Relation invariant: every Mori generator pairs with (U, B) exactly as the
  // complexified class does.
  for (const ToricCurve& gen : mori_generators(f)) {
    Quad lhs, w;
    Rat lhsB = 0, bb = 0;
    for (int i = 0; i < f.num_rays(); ++i) {
      lhs += m.logU[i] * Quad(gen.pairing[i]);
      w += Quad(Rat(0), c.k * c.omega[i] * gen.pairing[i], c.scale_r);
      lhsB += m.logB[i] * gen.pairing[i];
      bb += c.k * beta[i] * gen.pairing[i];
    }
    if (sgn(lhs - w) != 0 || lhsB != bb)
      throw numeric_error("superpotential coefficients violate a curve relation");
  }
  constexpr double two_pi = 6.283185307179586476925286766559;
  for (int i = 0; i < f.num_rays(); ++i)
    m.coefficients.push_back(std::exp(Cx(-two_pi * m.logU[i].to_double(),
                                         two_pi * to_double(m.logB[i]))));
  return m;
}

// ---------------------------------------------------------------------------
// Curve classes and the I-function.

struct CurveClass {
  std::vector<int> combo;        // coefficients over the Mori generators
  std::vector<long long> d;      // pairing D_i . d per ray
  int degree = 0;                // sum of combo entries
};

inline std::vector<ToricCurve> supported_mori_basis(const Fan& f) {
  std::vector<ToricCurve> gens = mori_generators(f);
  int rho = f.num_rays() - f.n;
  bool pn_like = static_cast<int>(gens.size()) == 1 && rho == 1;
  if (!(pn_like || rho <= 2))
    throw input_error("I-function machinery supports Picard rank <= 2 fans only");
  if (static_cast<int>(gens.size()) != rho)
    throw input_error("Mori generators do not form a basis for this fan");
  return gens;
}

inline std::vector<CurveClass> enumerate_curve_classes(const Fan& f, int N) {
  if (N < 0) throw input_error("negative degree bound");
  std::vector<ToricCurve> gens = supported_mori_basis(f);
  int g = static_cast<int>(gens.size());
  std::vector<CurveClass> out;
  std::vector<int> combo(g, 0);
  auto emit = [&]() {
    CurveClass cc;
    cc.combo = combo;
    cc.d.assign(f.num_rays(), 0);
    for (int l = 0; l < g; ++l)
      for (int i = 0; i < f.num_rays(); ++i) {
        Rat v = Rat(combo[l]) * gens[l].pairing[i];
        if (denominator(v) != 1) throw numeric_error("non-integral curve pairing");
        cc.d[i] += static_cast<long long>(numerator(v));
      }
    for (int x : combo) cc.degree += x;
    out.push_back(std::move(cc));
  };
  if (g == 1) {
    for (combo[0] = 0; combo[0] <= N; ++combo[0]) emit();
  } else {
    for (combo[0] = 0; combo[0] <= N; ++combo[0])
      for (combo[1] = 0; combo[0] + combo[1] <= N; ++combo[1]) emit();
  }
  std::sort(out.begin(), out.end(), [](const CurveClass& a, const CurveClass& b) {
    if (a.degree != b.degree) return a.degree < b.degree;
    return a.combo < b.combo;
  });
  return out;
}

// Nef duals of the Mori basis: divisor classes p_l with p_l . gen_m = delta.
inline std::vector<DivisorClass> nef_duals(const Fan& f) {
  std::vector<ToricCurve> gens = supported_mori_basis(f);
  std::vector<int> basis = pic_basis(f, toric_curves(f));
  int rho = static_cast<int>(gens.size());
  std::vector<DivisorClass> out;
  for (int l = 0; l < rho; ++l) {
    std::vector<std::vector<Rat>> A(rho, std::vector<Rat>(rho));
    std::vector<Rat> b(rho);
    for (int m2 = 0; m2 < rho; ++m2) {
      for (int bidx = 0; bidx < rho; ++bidx) A[m2][bidx] = gens[m2].pairing[basis[bidx]];
      b[m2] = (m2 == l) ? 1 : 0;
    }
    std::vector<Rat> y = detail::solve_rat(A, b);
    DivisorClass p(f.num_rays(), Rat(0));
    for (int bidx = 0; bidx < rho; ++bidx) p[basis[bidx]] = y[bidx];
    out.push_back(std::move(p));
  }
  return out;
}

namespace detail {

// Inverse of a class with nonzero scalar part: c(1+N) -> c^{-1} sum (-N)^k.
inline CohClass<Cx> coh_inv(const CohClass<Cx>& u) {
  auto it = u.terms.find({});
  if (it == u.terms.end() || std::abs(it->second) == 0)
    throw numeric_error("inverting a class with vanishing scalar part");
  Cx c = it->second;
  CohClass<Cx> nil = u;
  nil.terms.erase(std::vector<int>{});
  nil = scale(nil, Cx(1) / c);
  CohClass<Cx> out = CohClass<Cx>::one(u.dim), pw = CohClass<Cx>::one(u.dim);
  for (int k = 1; k <= u.dim; ++k) {
    pw = pw * nil;
    out = out + scale(pw, Cx(k % 2 ? -1 : 1));
  }
  return scale(out, Cx(1) / c);
}

inline double coh_norm(const CohClass<Cx>& a) {
  double s = 0;
  for (const auto& [k, c] : a.terms) s += std::abs(c);
  return s;
}

}  // namespace detail

struct IFunctionResult {
  CohClass<Cx> value;
  double tail = 0;   // norm of the last degree slice
  int truncation = 0;
};

inline IFunctionResult i_function_full(const Fan& f, const std::vector<Cx>& q, Cx z, int N) {
  std::vector<ToricCurve> gens = supported_mori_basis(f);
  if (q.size() != gens.size())
    throw input_error("expected one Novikov parameter per Mori generator");
  if (std::abs(z) == 0) throw input_error("z must be nonzero");
  std::vector<DivisorClass> duals = nef_duals(f);
  // q^{p/z} = exp(sum_l (log q_l / z) p_l) in the nilpotent ring.
  CohClass<Cx> logq(f.n);
  for (size_t l = 0; l < duals.size(); ++l) {
    CohClass<Cx> pl = divisor_class<Cx>(f, duals[l]);
    logq = logq + scale(pl, std::log(q[l]) / z);
  }
  CohClass<Cx> prefactor = coh_exp(logq);

  CohClass<Cx> sum(f.n);
  double prev_slice = 0, last_slice = 0;
  int used = 0;
  for (const CurveClass& cc : enumerate_curve_classes(f, N)) {
    Cx qd(1, 0);
    for (size_t l = 0; l < gens.size(); ++l)
      for (int rep = 0; rep < cc.combo[l]; ++rep) qd *= q[l];
    CohClass<Cx> term = scale(CohClass<Cx>::one(f.n), qd);
    for (int i = 0; i < f.num_rays(); ++i) {
      long long di = cc.d[i];
      CohClass<Cx> Di(f.n);
      Di.add_term({i}, Cx(1));
      if (di >= 0) {
        for (long long j = 1; j <= di; ++j)
          term = term * detail::coh_inv(Di + scale(CohClass<Cx>::one(f.n), Cx(double(j)) * z));
      } else {
        for (long long j = 0; j < -di; ++j)
          term = term * (Di - scale(CohClass<Cx>::one(f.n), Cx(double(j)) * z));
      }
    }
    sum = sum + term;
    if (cc.degree > used) {
      prev_slice = last_slice;
      last_slice = 0;
      used = cc.degree;
    }
    last_slice += detail::coh_norm(term);
  }
  if (N >= 2 && last_slice > prev_slice && last_slice > 1e-8 * detail::coh_norm(sum))
    throw numeric_error("I-function partial sums are not Cauchy at this q");
  IFunctionResult out;
  out.value = prefactor * sum;
  out.tail = last_slice;
  out.truncation = N;
  return out;
}

inline CohClass<Cx> i_function(const Fan& f, const std::vector<Cx>& q, Cx z, int N) {
  return i_function_full(f, q, z, N).value;
}

// Degree-weighted scalar action: multiply the H^{2k} part by s^k.
inline CohClass<Cx> apply_deg_half(const CohClass<Cx>& a, Cx s) {
  CohClass<Cx> out(a.dim);
  for (const auto& [k, c] : a.terms) {
    Cx w(1, 0);
    for (size_t rep = 0; rep < k.size(); ++rep) w *= s;
    out.add_term(k, c * w);
  }
  return out;
}

// Left-hand side of the Gamma-conjecture identity:
//   integral_X z^{c1(X)} z^{deg/2} I(q,-z) ∪ Gamma_X ∪ (2 pi i)^{deg/2} ch(E).
inline PeriodResult gamma_lhs(const Fan& f, const std::vector<Cx>& q, Cx z,
                              const CohClass<Rat>& E, int N = 40) {
  IFunctionResult ir = i_function_full(f, q, -z, N);
  CohClass<Cx> acc = apply_deg_half(ir.value, z);
  CohClass<Cx> c1 = divisor_class<Cx>(f, anticanonical(f));
  acc = acc * coh_exp(scale(c1, std::log(z)));
  acc = acc * gamma_class(f);
  constexpr double two_pi = 6.283185307179586476925286766559;
  acc = acc * apply_deg_half(to_cx(E), Cx(0, two_pi));
  PeriodResult out;
  out.value = evaluate_top(f, acc);
  out.method = "gamma_lhs";
  out.truncation = ir.truncation;
  out.normalization = 1.0;
  out.error_estimate = ir.tail;
  return out;
}

// Minimal one-parameter model with an exactly specified Novikov value, used
// when the quadrature side of the period identity must run at a literal q
// (only meaningful where one ray falls outside the gauge cone: p1, p2).
inline LGModel direct_q_model(const Fan& f, double q) {
  if (f.num_rays() != f.n + 1)
    throw input_error("direct q models support p1 and p2 only");
  if (q <= 0) throw input_error("q must be positive");
  LGModel m;
  m.fan = f;
  m.exponents = f.rays;
  m.gauge = f.max_cones.front();
  m.logU.assign(f.num_rays(), Quad());
  m.logB.assign(f.num_rays(), Rat(0));
  for (int i = 0; i < f.num_rays(); ++i) {
    bool in_gauge = std::find(m.gauge.begin(), m.gauge.end(), i) != m.gauge.end();
    m.coefficients.push_back(Cx(in_gauge ? 1.0 : q, 0));
  }
  return m;
}

// ---------------------------------------------------------------------------
// Positive-cycle period by quadrature.

namespace detail {

inline double w_real(const LGModel& m, const std::vector<double>& u) {
  double w = 0;
  for (size_t i = 0; i < m.exponents.size(); ++i) {
    double e = 0;
    for (size_t k = 0; k < u.size(); ++k) e += double(m.exponents[i][k]) * u[k];
    w += m.coefficients[i].real() * std::exp(e);
  }
  return w;
}

}  // namespace detail

inline PeriodResult positive_cycle_period(const LGModel& m, double z) {
  const Fan& f = m.fan;
  if (f.n > 2) throw input_error("positive_cycle_period supports n <= 2");
  if (z <= 0) throw input_error("z must be positive");
  for (size_t i = 0; i < m.logB.size(); ++i)
    if (denominator(m.logB[i]) != 1)
      throw input_error("positive_cycle_period needs real positive coefficients (beta = 0)");

  // Box half-width: expand until the integrand is negligible on the boundary.
  double R = 4;
  auto boundary_max = [&](double r) {
    double mx = 0;
    int probes = 64;
    if (f.n == 1) {
      mx = std::max(std::exp(-detail::w_real(m, {r}) / z),
                    std::exp(-detail::w_real(m, {-r}) / z));
    } else {
      for (int s = 0; s <= probes; ++s) {
        double t = -r + 2 * r * s / probes;
        for (double edge : {r, -r}) {
          mx = std::max(mx, std::exp(-detail::w_real(m, {edge, t}) / z));
          mx = std::max(mx, std::exp(-detail::w_real(m, {t, edge}) / z));
        }
      }
    }
    return mx;
  };
  while (boundary_max(R) > 1e-22 && R < 120) R *= 1.4;
  if (boundary_max(R) > 1e-16) throw numeric_error("period integrand does not decay");

  auto trapezoid = [&](int npts) {
    double h = 2 * R / npts;
    double total = 0;
    if (f.n == 1) {
      for (int i = 0; i <= npts; ++i) {
        double u = -R + i * h;
        double wgt = (i == 0 || i == npts) ? 0.5 : 1.0;
        total += wgt * std::exp(-detail::w_real(m, {u}) / z);
      }
      return total * h;
    }
    for (int i = 0; i <= npts; ++i) {
      double u1 = -R + i * h;
      double w1 = (i == 0 || i == npts) ? 0.5 : 1.0;
      double row = 0;
      for (int j = 0; j <= npts; ++j) {
        double u2 = -R + j * h;
        double w2 = (j == 0 || j == npts) ? 0.5 : 1.0;
        row += w2 * std::exp(-detail::w_real(m, {u1, u2}) / z);
      }
      total += w1 * row;
    }
    return total * h * h;
  };

  int npts = f.n == 1 ? 256 : 128;
  int cap = f.n == 1 ? (1 << 17) : 4096;
  double prev = trapezoid(npts), cur = prev, err = 1;
  while (npts < cap) {
    npts *= 2;
    cur = trapezoid(npts);
    err = std::abs(cur - prev) / std::max(1e-300, std::abs(cur));
    prev = cur;
    if (err < 1e-11) break;
  }
  PeriodResult out;
  out.value = Cx(cur, 0);
  out.method = "quadrature";
  out.error_estimate = err * std::abs(cur);
  return out;
}

// ---------------------------------------------------------------------------
// Critical points and the residue pairing.

namespace detail {

// Durand-Kerner roots of a dense polynomial (ascending coefficients).
inline std::vector<Cx> poly_roots(std::vector<Cx> coef) {
  while (!coef.empty() && std::abs(coef.back()) < 1e-300) coef.pop_back();
  int deg = static_cast<int>(coef.size()) - 1;
  if (deg <= 0) return {};
  for (auto& c : coef) c /= coef[deg];
  std::vector<Cx> roots(deg);
  for (int i = 0; i < deg; ++i) roots[i] = std::pow(Cx(0.4, 0.9), i);
  for (int it = 0; it < 500; ++it) {
    double shift = 0;
    for (int i = 0; i < deg; ++i) {
      Cx p(coef[deg]);
      for (int k = deg - 1; k >= 0; --k) p = p * roots[i] + coef[k];
      Cx den(1, 0);
      for (int j = 0; j < deg; ++j)
        if (j != i) den *= roots[i] - roots[j];
      Cx d = p / den;
      roots[i] -= d;
      shift = std::max(shift, std::abs(d));
    }
    if (shift < 1e-14) break;
  }
  return roots;
}

inline Cx eval_w_term(const LGModel& m, size_t i, const std::vector<Cx>& logx) {
  Cx e(0, 0);
  for (size_t k = 0; k < logx.size(); ++k) e += double(m.exponents[i][k]) * logx[k];
  return m.coefficients[i] * std::exp(e);
}

}  // namespace detail

inline std::vector<std::vector<Cx>> critical_points(const LGModel& m) {
  const Fan& f = m.fan;
  if (f.n > 2) throw input_error("critical_points supports n <= 2");
  size_t want = f.max_cones.size();
  std::vector<std::vector<Cx>> pts;
  auto push_unique = [&](const std::vector<Cx>& x) {
    // Relative comparison per coordinate: the points live on the torus and can
    // be uniformly tiny (large-volume q), so absolute tolerances merge
    // genuinely distinct roots.
    for (const auto& p : pts) {
      double d = 0;
      for (int k = 0; k < f.n; ++k)
        d = std::max(d, std::abs(p[k] - x[k]) / (1e-300 + std::abs(p[k]) + std::abs(x[k])));
      if (d < 1e-6) return;
    }
    pts.push_back(x);
  };
  if (f.n == 1) {
    // x W'(x) is a Laurent polynomial; shift to an ordinary one.
    long long lo = 0, hi = 0;
    for (const Ray& v : m.exponents) {
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
    }
    std::vector<Cx> coef(hi - lo + 1, Cx(0, 0));
    for (size_t i = 0; i < m.exponents.size(); ++i)
      coef[m.exponents[i][0] - lo] += m.coefficients[i] * double(m.exponents[i][0]);
    for (const Cx& r : detail::poly_roots(coef))
      if (std::abs(r) > 1e-12) push_unique({r});
  } else {
    std::mt19937 rng(424242u);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    constexpr double pi = 3.14159265358979323846;
    // Deterministic seeds from three-term dominant balances: in log
    // coordinates, equate the magnitudes of the monomials of each ray triple.
    // Critical points sit near such balances even when the coefficients span
    // many orders of magnitude, where box-random starts never reach.
    std::vector<Cx> seeds0, seeds1;
    int mrays = static_cast<int>(m.exponents.size());
    for (int i = 0; i < mrays; ++i)
      for (int j = i + 1; j < mrays; ++j)
        for (int k = j + 1; k < mrays; ++k) {
          double a00 = double(m.exponents[j][0] - m.exponents[i][0]);
          double a01 = double(m.exponents[j][1] - m.exponents[i][1]);
          double a10 = double(m.exponents[k][0] - m.exponents[i][0]);
          double a11 = double(m.exponents[k][1] - m.exponents[i][1]);
          double det = a00 * a11 - a01 * a10;
          if (std::abs(det) < 1e-12) continue;
          Cx b0 = std::log(m.coefficients[i]) - std::log(m.coefficients[j]);
          Cx b1 = std::log(m.coefficients[i]) - std::log(m.coefficients[k]);
          seeds0.push_back((a11 * b0 - a01 * b1) / det);
          seeds1.push_back((a00 * b1 - a10 * b0) / det);
        }
    size_t nseeds = seeds0.size();
    for (int trial = 0; trial < 4000 + 40 * static_cast<int>(nseeds) && pts.size() < want;
         ++trial) {
      std::vector<Cx> u;
      if (nseeds > 0 && trial < 40 * static_cast<int>(nseeds)) {
        size_t s = trial % nseeds;
        u = {seeds0[s] + Cx(0.2 * uni(rng), pi * uni(rng)),
             seeds1[s] + Cx(0.2 * uni(rng), pi * uni(rng))};
      } else {
        u = {Cx(3 * uni(rng), pi * uni(rng)), Cx(3 * uni(rng), pi * uni(rng))};
      }
      bool ok = false;
      for (int it = 0; it < 120; ++it) {
        // G_k(u) = sum_i a_i v_ik e^{v_i . u}; Newton step on u.
        Cx g0(0, 0), g1(0, 0), j00(0, 0), j01(0, 0), j11(0, 0);
        double scale = 0;
        for (size_t i = 0; i < m.exponents.size(); ++i) {
          Cx t = detail::eval_w_term(m, i, u);
          double v0 = double(m.exponents[i][0]), v1 = double(m.exponents[i][1]);
          g0 += v0 * t;
          g1 += v1 * t;
          j00 += v0 * v0 * t;
          j01 += v0 * v1 * t;
          j11 += v1 * v1 * t;
          scale += std::abs(t);
        }
        double res = std::abs(g0) + std::abs(g1);
        if (res < 1e-12 * (1e-300 + scale)) {
          ok = true;
          break;
        }
        Cx det = j00 * j11 - j01 * j01;
        if (std::abs(det) < 1e-300) break;
        Cx d0 = (j11 * g0 - j01 * g1) / det, d1 = (j00 * g1 - j01 * g0) / det;
        double step = std::abs(d0) + std::abs(d1);
        double damp = step > 2 ? 2 / step : 1.0;
        u[0] -= damp * d0;
        u[1] -= damp * d1;
      }
      if (ok) push_unique({std::exp(u[0]), std::exp(u[1])});
    }
  }
  if (pts.size() != want)
    throw numeric_error("critical point count " + std::to_string(pts.size()) +
                        " does not match the expected " + std::to_string(want));
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    for (size_t k = 0; k < a.size(); ++k) {
      if (a[k].real() != b[k].real()) return a[k].real() < b[k].real();
      if (a[k].imag() != b[k].imag()) return a[k].imag() < b[k].imag();
    }
    return false;
  });
  return pts;
}

// Laurent polynomials in the torus coordinates, for residue inputs.
struct Laurent {
  std::vector<std::pair<Ray, Cx>> terms;  // exponent vector, coefficient
};

inline Cx eval_laurent(const Laurent& p, const std::vector<Cx>& x) {
  Cx out(0, 0);
  for (const auto& [e, c] : p.terms) {
    Cx t = c;
    for (size_t k = 0; k < x.size(); ++k) {
      long long ek = e[k];
      Cx b = ek >= 0 ? x[k] : Cx(1, 0) / x[k];
      for (long long rep = 0; rep < std::abs(ek); ++rep) t *= b;
    }
    out += t;
  }
  return out;
}

// Leading-order residue pairing: sum over critical points of
// f*g / (prod_i x_i^2 * det Hess W).
inline Cx residue_pairing(const LGModel& m, const Laurent& fcl, const Laurent& gcl) {
  const Fan& fan = m.fan;
  std::vector<std::vector<Cx>> pts = critical_points(m);
  Cx out(0, 0);
  for (const auto& x : pts) {
    std::vector<Cx> logx(fan.n);
    for (int k = 0; k < fan.n; ++k) logx[k] = std::log(x[k]);
    // H_{kl} = sum_i a_i v_ik (v_il - delta_kl) x^{v_i} / (x_k x_l).
    std::vector<std::vector<Cx>> H(fan.n, std::vector<Cx>(fan.n, Cx(0, 0)));
    for (size_t i = 0; i < m.exponents.size(); ++i) {
      Cx t = detail::eval_w_term(m, i, logx);
      for (int k = 0; k < fan.n; ++k)
        for (int l = 0; l < fan.n; ++l) {
          double vk = double(m.exponents[i][k]), vl = double(m.exponents[i][l]);
          H[k][l] += t * vk * (vl - (k == l ? 1.0 : 0.0)) / (x[k] * x[l]);
        }
    }
    Cx det = fan.n == 1 ? H[0][0] : H[0][0] * H[1][1] - H[0][1] * H[1][0];
    Cx denom = det;
    for (int k = 0; k < fan.n; ++k) denom *= x[k] * x[k];
    if (std::abs(denom) < 1e-12) {
      std::ostringstream os;
      os << "degenerate critical point at (";
      for (int k = 0; k < fan.n; ++k) os << (k ? ", " : "") << x[k];
      os << ")";
      throw numeric_error(os.str());
    }
    out += eval_laurent(fcl, x) * eval_laurent(gcl, x) / denom;
  }
  return out;
}

// Parse "2*x^-1*y^3 + 1 - x" style Laurent literals (variables x, y).
inline Laurent parse_laurent(const std::string& s, int n) {
  Laurent out;
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) throw input_error("empty Laurent literal");
  size_t pos = 0;
  while (pos < t.size()) {
    double sign = 1;
    while (pos < t.size() && (t[pos] == '+' || t[pos] == '-')) {
      if (t[pos] == '-') sign = -sign;
      ++pos;
    }
    size_t end = pos;
    while (end < t.size() && t[end] != '+' && (t[end] != '-' || t[end - 1] == '^')) ++end;
    std::string mono = t.substr(pos, end - pos);
    pos = end;
    if (mono.empty()) throw input_error("bad Laurent literal '" + s + "'");
    double coeff = sign;
    Ray expo(n, 0);
    size_t mp = 0;
    bool saw_factor = false;
    while (mp < mono.size()) {
      if (mono[mp] == '*') {
        ++mp;
        continue;
      }
      if (mono[mp] == 'x' || mono[mp] == 'y') {
        int var = mono[mp] == 'x' ? 0 : 1;
        if (var >= n) throw input_error("variable out of range in '" + s + "'");
        ++mp;
        long long e = 1;
        if (mp < mono.size() && mono[mp] == '^') {
          ++mp;
          size_t used = 0;
          e = std::stoll(mono.substr(mp), &used);
          mp += used;
        }
        expo[var] += e;
        saw_factor = true;
      } else {
        size_t used = 0;
        double v = std::stod(mono.substr(mp), &used);
        if (used == 0) throw input_error("bad Laurent literal '" + s + "'");
        coeff *= v;
        mp += used;
        saw_factor = true;
      }
    }
    if (!saw_factor) throw input_error("bad Laurent literal '" + s + "'");
    out.terms.emplace_back(expo, Cx(coeff, 0));
  }
  return out;
}

}  // namespace dhym
