#pragma once

// Cohomology of smooth complete toric varieties: polynomial classes in the
// ray divisors, top intersection numbers via dual-vector reduction, Chern
// characters, the Gamma class, and Kahler/weak-Fano positivity checks.

#include <complex>
#include <functional>
#include <map>

#include "fan.hpp"
#include "rational.hpp"

namespace dhym {

// Scalar embeddings of Rat into the coefficient rings we use.
inline void from_rat(const Rat& x, Rat& out) { out = x; }
inline void from_rat(const Rat& x, Quad& out) { out = Quad(x); }
inline void from_rat(const Rat& x, GQuad& out) { out = GQuad(Quad(x)); }
inline void from_rat(const Rat& x, std::complex<double>& out) { out = to_double(x); }
template <class S>
S scalar_from_rat(const Rat& x) {
  S out;
  from_rat(x, out);
  return out;
}

inline bool scalar_is_zero(const Rat& x) { return x == 0; }
inline bool scalar_is_zero(const Quad& x) { return sgn(x) == 0; }
inline bool scalar_is_zero(const GQuad& x) { return x.is_zero(); }
inline bool scalar_is_zero(const std::complex<double>& x) { return x == std::complex<double>(0); }

// A cohomology class written as a polynomial in the ray divisors, truncated
// at the dimension of the variety.  Keys are sorted index multisets; the
// empty key is the degree-zero part.
template <class S>
struct CohClass {
  int dim = 0;  // complex dimension of the ambient variety
  std::map<std::vector<int>, S> terms;

  CohClass() = default;
  explicit CohClass(int dim_) : dim(dim_) {}

  static CohClass one(int dim_) {
    CohClass c(dim_);
    c.terms[{}] = scalar_from_rat<S>(Rat(1));
    return c;
  }

  void add_term(std::vector<int> key, const S& coeff) {
    if (static_cast<int>(key.size()) > dim || scalar_is_zero(coeff)) return;
    std::sort(key.begin(), key.end());
    auto it = terms.find(key);
    if (it == terms.end()) terms.emplace(std::move(key), coeff);
    else {
      it->second += coeff;
      if (scalar_is_zero(it->second)) terms.erase(it);
    }
  }

  // Homogeneous part of the given degree.
  CohClass graded_part(int deg) const {
    CohClass out(dim);
    for (const auto& [k, c] : terms)
      if (static_cast<int>(k.size()) == deg) out.terms.emplace(k, c);
    return out;
  }
};

template <class S>
CohClass<S> operator+(const CohClass<S>& a, const CohClass<S>& b) {
  CohClass<S> out = a;
  for (const auto& [k, c] : b.terms) out.add_term(k, c);
  return out;
}

template <class S>
CohClass<S> operator-(const CohClass<S>& a, const CohClass<S>& b) {
  CohClass<S> out = a;
  for (const auto& [k, c] : b.terms) out.add_term(k, -c);
  return out;
}

template <class S>
CohClass<S> operator*(const CohClass<S>& a, const CohClass<S>& b) {
  CohClass<S> out(a.dim);
  for (const auto& [ka, ca] : a.terms)
    for (const auto& [kb, cb] : b.terms) {
      if (static_cast<int>(ka.size() + kb.size()) > out.dim) continue;
      std::vector<int> k = ka;
      k.insert(k.end(), kb.begin(), kb.end());
      out.add_term(std::move(k), ca * cb);
    }
  return out;
}

template <class S>
CohClass<S> scale(const CohClass<S>& a, const S& s) {
  CohClass<S> out(a.dim);
  for (const auto& [k, c] : a.terms) out.add_term(k, c * s);
  return out;
}

// Truncated exponential exp(a) for a with no degree-0 part.
template <class S>
CohClass<S> coh_exp(const CohClass<S>& a) {
  if (a.terms.count({})) throw numeric_error("coh_exp needs vanishing degree-0 part");
  CohClass<S> out = CohClass<S>::one(a.dim);
  CohClass<S> pw = CohClass<S>::one(a.dim);
  Rat fact = 1;
  for (int j = 1; j <= a.dim; ++j) {
    pw = pw * a;
    fact *= j;
    out = out + scale(pw, scalar_from_rat<S>(Rat(1) / fact));
  }
  return out;
}

template <class A, class B>
CohClass<B> coh_convert(const CohClass<A>& a, const std::function<B(const A&)>& f) {
  CohClass<B> out(a.dim);
  for (const auto& [k, c] : a.terms) out.add_term(k, f(c));
  return out;
}

inline CohClass<Quad> to_quad(const CohClass<Rat>& a) {
  return coh_convert<Rat, Quad>(a, [](const Rat& x) { return Quad(x); });
}
inline CohClass<GQuad> to_gquad(const CohClass<Rat>& a) {
  return coh_convert<Rat, GQuad>(a, [](const Rat& x) { return GQuad(Quad(x)); });
}
inline CohClass<std::complex<double>> to_cx(const CohClass<Rat>& a) {
  return coh_convert<Rat, std::complex<double>>(
      a, [](const Rat& x) { return std::complex<double>(to_double(x)); });
}

// ---------------------------------------------------------------------------
// Top intersection numbers.

namespace detail {

inline bool subset_of(const std::vector<int>& a, const Cone& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Solve M x = rhs for rational M; throws on singular M.
inline std::vector<Rat> solve_rat(std::vector<std::vector<Rat>> m, std::vector<Rat> rhs) {
  int n = static_cast<int>(m.size());
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int r = c; r < n; ++r)
      if (m[r][c] != 0) {
        p = r;
        break;
      }
    if (p < 0) throw numeric_error("singular linear system");
    std::swap(m[p], m[c]);
    std::swap(rhs[p], rhs[c]);
    for (int r = 0; r < n; ++r) {
      if (r == c || m[r][c] == 0) continue;
      Rat f = m[r][c] / m[c][c];
      for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  std::vector<Rat> x(n);
  for (int i = 0; i < n; ++i) x[i] = rhs[i] / m[i][i];
  return x;
}

}  // namespace detail

// D_{i_1} ... D_{i_n} on the smooth complete toric variety of f.  `idx` has
// exactly n entries (repetitions allowed).  Distinct products are 1 or 0 by
// whether the rays span a maximal cone; repeated factors are reduced with the
// linear equivalence D_i ~ sum_{j not in sigma} <m, v_j> D_j for the dual
// vector m supported on a maximal cone sigma containing the other factors.
inline Rat intersection_number(const Fan& f, std::vector<int> idx) {
  if (static_cast<int>(idx.size()) != f.n)
    throw input_error("intersection_number needs exactly n factors");
  std::sort(idx.begin(), idx.end());
  for (int i : idx)
    if (i < 0 || i >= f.num_rays()) throw input_error("ray index out of range");

  {
    std::lock_guard<std::mutex> lock(f.cache->mu);
    auto it = f.cache->top.find(idx);
    if (it != f.cache->top.end()) return it->second;
  }

  std::vector<int> distinct = idx;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  Rat result;
  if (distinct.size() == idx.size()) {
    // Transverse case: 1 iff the factors span a maximal cone.
    bool is_max = std::binary_search(f.max_cones.begin(), f.max_cones.end(), Cone(idx));
    result = is_max ? 1 : 0;
  } else if (![&] {
               for (const Cone& s : f.max_cones)
                 if (detail::subset_of(distinct, s)) return true;
               return false;
             }()) {
    // The distinct factors do not even span a cone: the strata are disjoint.
    result = 0;
  } else {
    // Pick the lexicographically smallest maximal cone containing the
    // distinct factors and a repeated index i to eliminate one copy of.
    int rep = -1;
    for (size_t k = 0; k + 1 < idx.size(); ++k)
      if (idx[k] == idx[k + 1]) {
        rep = idx[k];
        break;
      }
    Cone sigma;
    for (const Cone& s : f.max_cones)
      if (detail::subset_of(distinct, s)) {
        sigma = s;
        break;
      }
    // m with <m, v_j> = -delta_{j,rep} for j in sigma.
    std::vector<std::vector<Rat>> M;
    std::vector<Rat> rhs;
    for (int j : sigma) {
      std::vector<Rat> row;
      for (long long c : f.rays[j]) row.emplace_back(c);
      M.push_back(std::move(row));
      rhs.emplace_back(j == rep ? -1 : 0);
    }
    std::vector<Rat> m = detail::solve_rat(std::move(M), std::move(rhs));

    std::vector<int> rest = idx;
    rest.erase(std::find(rest.begin(), rest.end(), rep));  // drop one copy
    result = 0;
    for (int j = 0; j < f.num_rays(); ++j) {
      if (std::binary_search(sigma.begin(), sigma.end(), j)) continue;
      Rat coeff = 0;
      for (int t = 0; t < f.n; ++t) coeff += m[t] * f.rays[j][t];
      if (coeff == 0) continue;
      std::vector<int> child = rest;
      child.push_back(j);
      result += coeff * intersection_number(f, std::move(child));
    }
  }

  std::lock_guard<std::mutex> lock(f.cache->mu);
  f.cache->top.emplace(std::move(idx), result);
  return result;
}

// Integral over X of the top-degree part of a class.
template <class S>
S evaluate_top(const Fan& f, const CohClass<S>& c) {
  S out = scalar_from_rat<S>(Rat(0));
  for (const auto& [k, coeff] : c.terms) {
    if (static_cast<int>(k.size()) != f.n) continue;
    out += coeff * scalar_from_rat<S>(intersection_number(f, k));
  }
  return out;
}

// Divisor classes are coefficient vectors over the rays.
using DivisorClass = std::vector<Rat>;

template <class S = Rat>
CohClass<S> divisor_class(const Fan& f, const DivisorClass& d) {
  if (static_cast<int>(d.size()) != f.num_rays())
    throw input_error("divisor coefficient vector has wrong length");
  CohClass<S> out(f.n);
  for (int i = 0; i < f.num_rays(); ++i) out.add_term({i}, scalar_from_rat<S>(d[i]));
  return out;
}

// Pairing of divisor classes under the top intersection form (surfaces give
// the usual intersection matrix; in general this is an n-fold product).
inline Rat intersect_divisors(const Fan& f, const std::vector<DivisorClass>& ds) {
  if (static_cast<int>(ds.size()) != f.n)
    throw input_error("need exactly n divisor classes");
  CohClass<Rat> p = CohClass<Rat>::one(f.n);
  for (const DivisorClass& d : ds) p = p * divisor_class<Rat>(f, d);
  return evaluate_top(f, p);
}

// Intersection matrix of the ray divisors on a surface.
inline std::vector<std::vector<Rat>> intersection_matrix(const Fan& f) {
  if (f.n != 2) throw input_error("intersection_matrix needs a surface fan");
  int m = f.num_rays();
  std::vector<std::vector<Rat>> out(m, std::vector<Rat>(m));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      out[i][j] = out[j][i] = intersection_number(f, {i, j});
  return out;
}

// ch(O(D)) = exp(D), exact.
inline CohClass<Rat> chern_character(const Fan& f, const DivisorClass& d) {
  return coh_exp(divisor_class<Rat>(f, d));
}

// Anticanonical class -K = sum of all ray divisors.
inline DivisorClass anticanonical(const Fan& f) {
  return DivisorClass(f.num_rays(), Rat(1));
}

// Pairing of a divisor with every torus-invariant curve (codim n-1 stratum).
struct CurvePairing {
  Cone curve;   // the (n-1)-cone
  Rat value;    // D . C
};

inline std::vector<CurvePairing> positivity_cones(const Fan& f, const DivisorClass& d) {
  std::vector<CurvePairing> out;
  for (const Stratum& s : enumerate_strata(f)) {
    if (s.codim != f.n - 1) continue;
    Rat v = 0;
    for (int i = 0; i < f.num_rays(); ++i) {
      if (d[i] == 0) continue;
      std::vector<int> idx = s.cone;
      idx.push_back(i);
      v += d[i] * intersection_number(f, idx);
    }
    out.push_back({s.cone, v});
  }
  return out;
}

// A divisor is Kahler (ample) iff it pairs strictly positively with every
// torus-invariant curve; nef iff non-negatively (toric Nakai-Moishezon).
inline bool is_kahler(const Fan& f, const DivisorClass& d) {
  for (const CurvePairing& p : positivity_cones(f, d))
    if (p.value <= 0) return false;
  return true;
}
inline bool is_nef(const Fan& f, const DivisorClass& d) {
  for (const CurvePairing& p : positivity_cones(f, d))
    if (p.value < 0) return false;
  return true;
}

inline bool is_weak_fano(const Fan& f) { return is_nef(f, anticanonical(f)); }
inline bool is_fano(const Fan& f) { return is_kahler(f, anticanonical(f)); }

// ---------------------------------------------------------------------------
/// Gamma class (floating point): product over rays of
//   exp(-gamma_E D_i + sum_{k>=2} (-1)^k zeta(k)/k D_i^k).
inline CohClass<std::complex<double>> gamma_class(const Fan& f) {
  constexpr double euler_gamma = 0.57721566490153286060651209008240243;
  CohClass<std::complex<double>> out = CohClass<std::complex<double>>::one(f.n);
  for (int i = 0; i < f.num_rays(); ++i) {
    CohClass<std::complex<double>> logterm(f.n);
    std::vector<int> key;
    for (int k = 1; k <= f.n; ++k) {
      key.push_back(i);
      double coeff = (k == 1) ? -euler_gamma
                              : ((k % 2 == 0 ? 1.0 : -1.0) * std::riemann_zeta(double(k)) / k);
      logterm.add_term(key, std::complex<double>(coeff));
    }
    out = out * coh_exp(logterm);
  }
  return out;
}

}  // namespace dhym
