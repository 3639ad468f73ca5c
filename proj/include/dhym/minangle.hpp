#pragma once

// Minimal angle optimization on surfaces: maximize
//   g(t) = ((alpha - sum t_i D_i)^2 - omega^2) / (2 (alpha - sum t_i D_i) . omega)
// over t >= 0 with positive denominator.  Supports of size <= 2 are solved in
// closed form over Q(sqrt(r)); larger supports fall back to projected ascent.

#include <random>

#include "cones.hpp"

namespace dhym {

inline Rat cot_phi(const Fan& f, const DivisorClass& omega, const DivisorClass& alpha) {
  if (f.n != 2) throw input_error("cot_phi requires a surface");
  std::vector<DivisorClass> aw = {alpha, omega}, aa = {alpha, alpha}, ww = {omega, omega};
  Rat adotw = intersect_divisors(f, aw);
  if (adotw <= 0) throw input_error("cot_phi requires alpha . omega > 0");
  return (intersect_divisors(f, aa) - intersect_divisors(f, ww)) / (2 * adotw);
}

struct MinAngleResult {
  double cot_theta_min = 0;
  std::optional<Quad> exact;      // present when the optimum came from an exact solve
  std::vector<Quad> D_star;       // per-ray coefficients, >= 0
  std::vector<int> support;
  bool attained = false;
  double gap = 0;                 // cot_theta_min - cot_phi
  std::optional<Quad> exact_gap;
  bool certified = false;
  bool tie_flag = false;
  Rat cot_phi_value;
};

namespace detail {

struct PairingData {
  std::vector<std::vector<Rat>> Q;  // D_i . D_j
  std::vector<Rat> aD;              // alpha . D_i
  std::vector<Rat> wD;              // omega . D_i
  Rat aa, ww, aw;
};

inline PairingData pairing_data(const Fan& f, const DivisorClass& omega,
                                const DivisorClass& alpha) {
  PairingData p;
  p.Q = intersection_matrix(f);
  int m = f.num_rays();
  p.aD.assign(m, Rat(0));
  p.wD.assign(m, Rat(0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      p.aD[i] += alpha[j] * p.Q[j][i];
      p.wD[i] += omega[j] * p.Q[j][i];
    }
  std::vector<DivisorClass> aa = {alpha, alpha}, ww = {omega, omega}, aw = {alpha, omega};
  p.aa = intersect_divisors(f, aa);
  p.ww = intersect_divisors(f, ww);
  p.aw = intersect_divisors(f, aw);
  return p;
}

// g(t) for Quad coefficients t over the full ray set; throws if denominator
// is not positive.
inline std::optional<Quad> g_value(const PairingData& p, const std::vector<Quad>& t) {
  int m = static_cast<int>(p.aD.size());
  Quad num = Quad(p.aa - p.ww), den = Quad(2 * p.aw);
  // num = (alpha - D)^2 - omega^2 = aa - 2 t.aD + t Q t - ww
  // den = 2 (alpha - D).omega = 2 aw - 2 t.wD
  for (int i = 0; i < m; ++i) {
    if (sgn(t[i]) == 0) continue;
    num = num - Quad(Rat(2)) * Quad(p.aD[i]) * t[i];
    den = den - Quad(Rat(2)) * Quad(p.wD[i]) * t[i];
    for (int j = 0; j < m; ++j) {
      if (sgn(t[j]) == 0) continue;
      num = num + t[i] * t[j] * Quad(p.Q[i][j]);
    }
  }
  if (sgn(den) <= 0) return std::nullopt;
  return num / den;
}

// Double-precision shadow of PairingData so the iterative search does not pay
// for exact-to-double conversions inside its inner loop.
struct PairingDataD {
  std::vector<std::vector<double>> Q;
  std::vector<double> aD, wD;
  double aa_minus_ww, aw;
};

inline PairingDataD to_doubles(const PairingData& p) {
  PairingDataD d;
  int m = static_cast<int>(p.aD.size());
  d.Q.assign(m, std::vector<double>(m));
  d.aD.resize(m);
  d.wD.resize(m);
  for (int i = 0; i < m; ++i) {
    d.aD[i] = to_double(p.aD[i]);
    d.wD[i] = to_double(p.wD[i]);
    for (int j = 0; j < m; ++j) d.Q[i][j] = to_double(p.Q[i][j]);
  }
  d.aa_minus_ww = to_double(p.aa - p.ww);
  d.aw = to_double(p.aw);
  return d;
}

inline double g_value_d(const PairingDataD& p, const std::vector<double>& t) {
  int m = static_cast<int>(p.aD.size());
  double num = p.aa_minus_ww, den = 2 * p.aw;
  for (int i = 0; i < m; ++i) {
    num -= 2 * p.aD[i] * t[i];
    den -= 2 * p.wD[i] * t[i];
    for (int j = 0; j < m; ++j) num += t[i] * t[j] * p.Q[i][j];
  }
  if (den <= 0) return -1e300;
  return num / den;
}

struct Candidate {
  Quad value;
  std::vector<Quad> t;  // full-length coefficient vector
  std::vector<int> support;
  bool exact = true;
};

// Compare candidate values, exact when radicands are compatible, by double
// with a tie band otherwise.  Returns -1/0/+1.
inline int cmp_values(const Quad& x, const Quad& y) {
  if (x.b == 0 || y.b == 0 || x.r == y.r) return sgn(x - y);
  double dx = x.to_double(), dy = y.to_double();
  double tol = 1e-12 * (1 + std::abs(dx) + std::abs(dy));
  if (std::abs(dx - dy) <= tol) return 0;
  return dx < dy ? -1 : 1;
}

// Roots of a quadratic with rational coefficients (a may be 0) as Quads.
inline std::vector<Quad> quad_roots(const Rat& a, const Rat& b, const Rat& c) {
  std::vector<Quad> out;
  if (a == 0) {
    if (b != 0) out.emplace_back(Quad(-c / b));
    return out;
  }
  Rat disc = b * b - 4 * a * c;
  if (disc < 0) return out;
  Quad sq = quad_sqrt_of(disc);
  out.push_back((Quad(-b) + sq) / Quad(2 * a));
  out.push_back((Quad(-b) - sq) / Quad(2 * a));
  return out;
}

}  // namespace dhym detail

inline MinAngleResult minimal_angle(const Fan& f, const DivisorClass& omega,
                                    const DivisorClass& alpha) {
  if (f.n != 2) throw input_error("minimal_angle requires a surface");
  Rat cphi = cot_phi(f, omega, alpha);  // also validates alpha . omega > 0
  detail::PairingData p = detail::pairing_data(f, omega, alpha);
  detail::PairingDataD pd = detail::to_doubles(p);
  int m = f.num_rays();
  int rho = m - f.n;

  std::vector<detail::Candidate> cands;
  // Support {} : D = 0.
  {
    detail::Candidate c0;
    c0.value = Quad(cphi);
    c0.t.assign(m, Quad());
    cands.push_back(std::move(c0));
  }
  // Supports {i}: stationarity reduces to a rational quadratic in t.
  for (int i = 0; i < m; ++i) {
    Rat a2 = p.Q[i][i], a1 = -2 * p.aD[i], a0 = p.aa - p.ww;
    Rat b1 = -2 * p.wD[i], b0 = 2 * p.aw;
    // (N' Den - N Den') = a2 b1 t^2 + 2 a2 b0 t + (a1 b0 - a0 b1) = 0
    for (const Quad& t : detail::quad_roots(a2 * b1, 2 * a2 * b0, a1 * b0 - a0 * b1)) {
      if (sgn(t) <= 0) continue;
      std::vector<Quad> tv(m, Quad());
      tv[i] = t;
      if (auto val = detail::g_value(p, tv)) {
        detail::Candidate c;
        c.value = *val;
        c.t = tv;
        c.support = {i};
        cands.push_back(std::move(c));
      }
    }
  }
  // Supports {i,j}: solve the stationarity system (alpha - D - g omega).D_s = 0
  // for t(g), substitute into the defining equation, and solve the resulting
  // rational quadratic in g (coefficients recovered by exact interpolation).
  if (rho >= 2) {
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        Rat det = p.Q[i][i] * p.Q[j][j] - p.Q[i][j] * p.Q[i][j];
        if (det == 0) continue;  // dependent directions; covered by 1-D supports
        // t(g) = M^{-1} (b - g w) with M = [[Qii,Qij],[Qij,Qjj]].
        auto t_of_g = [&](const Quad& g) {
          Quad bi = Quad(p.aD[i]) - g * Quad(p.wD[i]);
          Quad bj = Quad(p.aD[j]) - g * Quad(p.wD[j]);
          Quad ti = (Quad(p.Q[j][j]) * bi - Quad(p.Q[i][j]) * bj) / Quad(det);
          Quad tj = (Quad(p.Q[i][i]) * bj - Quad(p.Q[i][j]) * bi) / Quad(det);
          return std::pair<Quad, Quad>(ti, tj);
        };
        // F(g) = (alpha - D(g))^2 - omega^2 - 2 g (alpha - D(g)).omega, a
        // rational quadratic in g.
        // The explicit return type forces evaluation of the multiprecision
        // expression before the locals it references go out of scope.
        auto F = [&](const Rat& g) -> Rat {
          auto [ti, tj] = t_of_g(Quad(g));
          Rat Ti = ti.a, Tj = tj.a;  // rational g gives rational t
          Rat num = p.aa - p.ww - 2 * p.aD[i] * Ti - 2 * p.aD[j] * Tj + Ti * Ti * p.Q[i][i] +
                    2 * Ti * Tj * p.Q[i][j] + Tj * Tj * p.Q[j][j];
          Rat den = 2 * (p.aw - Ti * p.wD[i] - Tj * p.wD[j]);
          return num - g * den;
        };
        Rat F0 = F(Rat(0)), F1 = F(Rat(1)), Fm1 = F(Rat(-1));
        Rat c2 = (F1 + Fm1 - 2 * F0) / 2, c1 = (F1 - Fm1) / 2, c0 = F0;
        for (const Quad& g : detail::quad_roots(c2, c1, c0)) {
          auto [ti, tj] = t_of_g(g);
          if (sgn(ti) <= 0 || sgn(tj) <= 0) continue;
          std::vector<Quad> tv(m, Quad());
          tv[i] = ti;
          tv[j] = tj;
          if (auto val = detail::g_value(p, tv)) {
            if (sgn(*val - g) != 0) continue;  // spurious root
            detail::Candidate c;
            c.value = *val;
            c.t = tv;
            c.support = {i, j};
            cands.push_back(std::move(c));
          }
        }
      }
    }
  }
  // Supports of size >= 3: projected ascent, non-exact.
  if (rho >= 3) {
    std::mt19937 rng(20260826);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> best_t;
    double best_v = -1e300;
    for (int trial = 0; trial < 64; ++trial) {
      std::vector<double> t(m);
      for (double& x : t) x = 0.3 * uni(rng);
      double fv = detail::g_value_d(pd, t);
      if (fv == -1e300) continue;
      for (int iter = 0; iter < 4000; ++iter) {
        // numeric gradient + projected backtracking step
        std::vector<double> grad(m);
        double h = 1e-7;
        for (int i = 0; i < m; ++i) {
          std::vector<double> tp = t;
          tp[i] += h;
          double fp = detail::g_value_d(pd, tp);
          grad[i] = (fp - fv) / h;
        }
        double gn = 0;
        for (double gg : grad) gn = std::max(gn, std::abs(gg));
        if (gn < 1e-12) break;
        double step = 0.1;
        bool moved = false;
        while (step > 1e-14) {
          std::vector<double> tn(m);
          for (int i = 0; i < m; ++i) tn[i] = std::max(0.0, t[i] + step * grad[i]);
          double fn = detail::g_value_d(pd, tn);
          if (fn > fv) {
            t = tn;
            fv = fn;
            moved = true;
            break;
          }
          step /= 2;
        }
        if (!moved) break;
      }
      if (fv > best_v) {
        best_v = fv;
        best_t = t;
      }
    }
    if (!best_t.empty()) {
      detail::Candidate c;
      c.exact = false;
      c.value = Quad();  // carried numerically below
      // Approximate rationalization purely for bookkeeping: keep doubles via
      // value compares; store t as rational approximations.
      for (int i = 0; i < m; ++i) {
        if (best_t[i] > 1e-9) c.support.push_back(i);
      }
      if (static_cast<int>(c.support.size()) >= 3) {
        c.t.assign(m, Quad());
        for (int i = 0; i < m; ++i) {
          Rat approx(static_cast<long long>(best_t[i] * 1e12), 1000000000000LL);
          c.t[i] = Quad(approx);
        }
        if (auto val = detail::g_value(p, c.t)) {
          c.value = *val;
          cands.push_back(std::move(c));
        }
      }
    }
  }

  // Pick the best candidate; ties toward smaller support, then lex.
  MinAngleResult res;
  res.cot_phi_value = cphi;
  int best = 0;
  bool tie = false;
  for (int i = 1; i < static_cast<int>(cands.size()); ++i) {
    int cmp = detail::cmp_values(cands[i].value, cands[best].value);
    if (cmp > 0) {
      best = i;
      tie = false;
    } else if (cmp == 0 && cands[i].support != cands[best].support) {
      tie = true;
      if (cands[i].support.size() < cands[best].support.size() ||
          (cands[i].support.size() == cands[best].support.size() &&
           cands[i].support < cands[best].support))
        best = i;
    }
  }
  const detail::Candidate& win = cands[best];
  res.attained = true;
  res.tie_flag = tie;
  res.cot_theta_min = win.value.to_double();
  if (win.exact) {
    res.exact = win.value;
    res.exact_gap = win.value - Quad(cphi);
  }
  res.D_star = win.t;
  res.support = win.support;
  res.gap = res.cot_theta_min - to_double(cphi);

  // Certification sample: D* should dominate random feasible points.
  {
    std::mt19937 rng(987654321u);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double vstar = res.cot_theta_min;
    bool ok = to_double(cphi) <= vstar + 1e-9;
    int checked = 0;
    for (int s = 0; s < 20000 && ok; ++s) {
      std::vector<double> t(m);
      for (double& x : t) x = (uni(rng) < 0.5 ? 0.0 : 3.0 * uni(rng) * uni(rng));
      double fv = detail::g_value_d(pd, t);
      if (fv == -1e300) continue;
      ++checked;
      if (fv > vstar + 1e-9) ok = false;
      if (checked >= 10000) break;
    }
    res.certified = ok;
  }
  return res;
}

// Best rational approximation with denominator <= qmax (continued fractions).
inline Rat rational_approx(double x, long long qmax) {
  if (x < 0) return -rational_approx(-x, qmax);
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double v = x;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(v);
    long long a = static_cast<long long>(fl);
    long long p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > qmax) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    double frac = v - fl;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
  }
  return Rat(p1, q1);
}

// Nearest Q-divisor with bounded denominators matching cot_theta_min to 1e-9.
inline std::optional<DivisorClass> rationality_round(const Fan& f, const DivisorClass& omega,
                                                     const DivisorClass& alpha,
                                                     const MinAngleResult& r, long long qmax) {
  if (!r.attained) throw input_error("rationality_round needs an attained result");
  detail::PairingData p = detail::pairing_data(f, omega, alpha);
  int m = f.num_rays();
  std::vector<double> t(m);
  DivisorClass d(m, Rat(0));
  std::vector<Quad> tq(m, Quad());
  for (int i = 0; i < m; ++i) {
    double ti = r.D_star[i].to_double();
    Rat ri = rational_approx(ti, qmax);
    if (ri < 0) ri = 0;
    d[i] = ri;
    tq[i] = Quad(ri);
  }
  auto val = detail::g_value(p, tq);
  if (!val) return std::nullopt;
  // Near an interior optimum g is stationary, so any half-decent rational
  // point matches the float value; when the optimum is known exactly, demand
  // an exact match (impossible for an irrational optimum, as intended).
  if (r.exact) {
    if (sgn(*val - *r.exact) != 0) return std::nullopt;
  } else if (std::abs(val->to_double() - r.cot_theta_min) > 1e-9) {
    return std::nullopt;
  }
  return d;
}

// Weak (semipositivity) form of the surface criterion:
//  (i)   the top-degree inequality on X (an identity, checked for sign),
//  (ii)  alpha.C - cot(phi) omega.C >= 0 on every toric curve,
//  (iii) alpha.g - cot(phi) omega.g >= 0 for every nef-cone generator g.
struct SemipositivityResult {
  bool passes = false;
  Rat cot_phi_value;
  std::vector<std::string> failures;
  std::vector<std::string> equalities;
};

inline SemipositivityResult semipositivity_check(const Fan& f, const DivisorClass& omega,
                                                 const DivisorClass& alpha) {
  if (f.n != 2) throw input_error("semipositivity_check requires a surface");
  SemipositivityResult out;
  Rat cphi = cot_phi(f, omega, alpha);
  out.cot_phi_value = cphi;
  std::vector<DivisorClass> aa = {alpha, alpha}, ww = {omega, omega}, aw = {alpha, omega};
  // (i) k = 2 on X: (alpha^2 - omega^2) - cot(phi) 2 alpha.omega; zero by the
  // definition of cot(phi), but checked to catch orientation errors.
  Rat global = intersect_divisors(f, aa) - intersect_divisors(f, ww) -
               cphi * 2 * intersect_divisors(f, aw);
  if (global < 0) out.failures.push_back("global k=2 inequality on X");
  else if (global == 0) out.equalities.push_back("global k=2 inequality on X (identity)");
  // (ii) toric curves.
  for (const ToricCurve& c : toric_curves(f)) {
    Rat v = pair_divisor_curve(alpha, c) - cphi * pair_divisor_curve(omega, c);
    std::string name = "curve ray " + std::to_string(c.cone[0]);
    if (v < 0) out.failures.push_back(name);
    else if (v == 0) out.equalities.push_back(name);
  }
  // (iii) nef generators.
  for (const DivisorClass& g : nef_generators(f)) {
    std::vector<DivisorClass> ag = {alpha, g}, wg = {omega, g};
    Rat v = intersect_divisors(f, ag) - cphi * intersect_divisors(f, wg);
    std::string name = "nef generator";
    for (size_t i = 0; i < g.size(); ++i)
      if (g[i] != 0) name += " +" + rat_str(g[i]) + "*D" + std::to_string(i);
    if (v < 0) out.failures.push_back(name);
    else if (v == 0) out.equalities.push_back(name);
  }
  out.passes = out.failures.empty();
  return out;
}

}  // namespace dhym
