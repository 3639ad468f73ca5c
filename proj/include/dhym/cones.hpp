#pragma once

// Curve classes, Mori generators, and nef-cone generators for smooth complete
// toric varieties of small Picard rank.  Everything is exact rational.

#include "chow.hpp"

namespace dhym {

// A torus-invariant curve (codim n-1 stratum) with its full pairing vector
// against the ray divisors: pairing[i] = C . D_i.
struct ToricCurve {
  Cone cone;
  std::vector<Rat> pairing;
};

inline std::vector<ToricCurve> toric_curves(const Fan& f) {
  std::vector<ToricCurve> out;
  if (f.n == 1) {
    // The curve is X itself; every ray divisor is a point of degree one.
    ToricCurve c;
    c.pairing.assign(f.num_rays(), Rat(1));
    out.push_back(std::move(c));
    return out;
  }
  for (const Stratum& s : enumerate_strata(f)) {
    if (s.codim != f.n - 1) continue;
    ToricCurve c;
    c.cone = s.cone;
    for (int i = 0; i < f.num_rays(); ++i) {
      std::vector<int> idx = s.cone;
      idx.push_back(i);
      c.pairing.push_back(intersection_number(f, idx));
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline Rat pair_divisor_curve(const DivisorClass& d, const ToricCurve& c) {
  Rat v = 0;
  for (size_t i = 0; i < d.size(); ++i) v += d[i] * c.pairing[i];
  return v;
}

namespace detail {

inline int mat_rank(std::vector<std::vector<Rat>> m) {
  int rows = static_cast<int>(m.size());
  if (rows == 0) return 0;
  int cols = static_cast<int>(m[0].size());
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int p = -1;
    for (int r = rank; r < rows; ++r)
      if (m[r][c] != 0) {
        p = r;
        break;
      }
    if (p < 0) continue;
    std::swap(m[p], m[rank]);
    for (int r = 0; r < rows; ++r) {
      if (r == rank || m[r][c] == 0) continue;
      Rat fct = m[r][c] / m[rank][c];
      for (int k = c; k < cols; ++k) m[r][k] -= fct * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

// Null space of a (rank-deficient-by-one) list of row vectors in Q^dim.
inline std::vector<std::vector<Rat>> null_space(std::vector<std::vector<Rat>> m, int dim) {
  // Gauss-Jordan to reduced row echelon.
  int rows = static_cast<int>(m.size());
  std::vector<int> pivot_col;
  int rank = 0;
  for (int c = 0; c < dim && rank < rows; ++c) {
    int p = -1;
    for (int r = rank; r < rows; ++r)
      if (m[r][c] != 0) {
        p = r;
        break;
      }
    if (p < 0) continue;
    std::swap(m[p], m[rank]);
    Rat pv = m[rank][c];
    for (int k = 0; k < dim; ++k) m[rank][k] /= pv;
    for (int r = 0; r < rows; ++r) {
      if (r == rank || m[r][c] == 0) continue;
      Rat fct = m[r][c];
      for (int k = 0; k < dim; ++k) m[r][k] -= fct * m[rank][k];
    }
    pivot_col.push_back(c);
    ++rank;
  }
  std::vector<std::vector<Rat>> basis;
  std::vector<char> is_pivot(dim, 0);
  for (int c : pivot_col) is_pivot[c] = 1;
  for (int c = 0; c < dim; ++c) {
    if (is_pivot[c]) continue;
    std::vector<Rat> v(dim, Rat(0));
    v[c] = 1;
    for (int r = 0; r < rank; ++r) v[pivot_col[r]] = -m[r][c];
    basis.push_back(std::move(v));
  }
  return basis;
}

inline void make_primitive(std::vector<Rat>& v) {
  Int lcm_den = 1, gcd_num = 0;
  for (const Rat& x : v) lcm_den = lcm(lcm_den, denominator(x));
  for (Rat& x : v) x *= lcm_den;
  for (const Rat& x : v) gcd_num = gcd(gcd_num, numerator(x));
  if (gcd_num != 0)
    for (Rat& x : v) x /= gcd_num;
}

}  // namespace detail

// Is `target` in the rational cone spanned by `gens`?  Uses conical
// Caratheodory: check all linearly independent subsets of size <= dim.
inline bool in_cone(const std::vector<Rat>& target, const std::vector<std::vector<Rat>>& gens) {
  int dim = static_cast<int>(target.size());
  bool zero = true;
  for (const Rat& x : target)
    if (x != 0) zero = false;
  if (zero) return true;
  int g = static_cast<int>(gens.size());
  int maxk = std::min(dim, g);
  std::vector<int> pick;
  std::function<bool(int, int)> rec = [&](int start, int k) -> bool {
    if (k == 0) {
      // Solve target = sum lambda_s gens[pick[s]] with lambda >= 0.
      int s = static_cast<int>(pick.size());
      // Least-squares-free exact solve: find s independent coordinate rows.
      std::vector<std::vector<Rat>> M;  // rows: coordinates; cols: picked gens
      std::vector<Rat> rhs;
      std::vector<std::vector<Rat>> all_rows;
      for (int c = 0; c < dim; ++c) {
        std::vector<Rat> row(s);
        for (int j = 0; j < s; ++j) row[j] = gens[pick[j]][c];
        all_rows.push_back(row);
      }
      // Greedily pick independent rows.
      std::vector<int> chosen;
      for (int c = 0; c < dim && static_cast<int>(chosen.size()) < s; ++c) {
        std::vector<std::vector<Rat>> trial;
        for (int cc : chosen) trial.push_back(all_rows[cc]);
        trial.push_back(all_rows[c]);
        if (detail::mat_rank(trial) == static_cast<int>(trial.size())) chosen.push_back(c);
      }
      if (static_cast<int>(chosen.size()) != s) return false;  // dependent gens
      for (int c : chosen) {
        M.push_back(all_rows[c]);
        rhs.push_back(target[c]);
      }
      std::vector<Rat> lambda;
      try {
        lambda = detail::solve_rat(M, rhs);
      } catch (const numeric_error&) {
        return false;
      }
      for (const Rat& l : lambda)
        if (l < 0) return false;
      // Verify on all coordinates.
      for (int c = 0; c < dim; ++c) {
        Rat acc = 0;
        for (int j = 0; j < s; ++j) acc += lambda[j] * gens[pick[j]][c];
        if (acc != target[c]) return false;
      }
      return true;
    }
    for (int i = start; i < g; ++i) {
      pick.push_back(i);
      if (rec(i + 1, k - 1)) {
        pick.pop_back();
        return true;
      }
      pick.pop_back();
    }
    return false;
  };
  for (int k = 1; k <= maxk; ++k)
    if (rec(0, k)) return true;
  return false;
}

// Ray indices whose divisor classes form a basis of Num^1 (rank = m - n),
// detected through their pairing vectors against the toric curves.
inline std::vector<int> pic_basis(const Fan& f, const std::vector<ToricCurve>& curves) {
  int rho = f.num_rays() - f.n;
  std::vector<int> basis;
  std::vector<std::vector<Rat>> rows;
  for (int i = 0; i < f.num_rays() && static_cast<int>(basis.size()) < rho; ++i) {
    std::vector<Rat> row;
    for (const ToricCurve& c : curves) row.push_back(c.pairing[i]);
    rows.push_back(row);
    if (detail::mat_rank(rows) == static_cast<int>(rows.size())) basis.push_back(i);
    else rows.pop_back();
  }
  if (static_cast<int>(basis.size()) != rho) throw numeric_error("could not find Picard basis");
  return basis;
}

// Mori generators: the extremal toric curve classes (dedup by pairing vector).
inline std::vector<ToricCurve> mori_generators(const Fan& f) {
  std::vector<ToricCurve> curves = toric_curves(f);
  // Dedup numerically equivalent curves.
  std::vector<ToricCurve> classes;
  for (const ToricCurve& c : curves) {
    bool dup = false;
    for (const ToricCurve& d : classes)
      if (d.pairing == c.pairing) dup = true;
    if (!dup) classes.push_back(c);
  }
  std::vector<int> basis = pic_basis(f, curves);
  auto coords = [&](const ToricCurve& c) {
    std::vector<Rat> v;
    for (int b : basis) v.push_back(c.pairing[b]);
    return v;
  };
  std::vector<ToricCurve> out;
  for (size_t i = 0; i < classes.size(); ++i) {
    std::vector<std::vector<Rat>> others;
    for (size_t j = 0; j < classes.size(); ++j)
      if (j != i) others.push_back(coords(classes[j]));
    if (!in_cone(coords(classes[i]), others)) out.push_back(classes[i]);
  }
  if (out.empty()) out = classes;  // rho = 1 with a single class
  return out;
}

// Nef-cone generators returned as divisor classes (coefficients over rays).
// Enumerates candidate extremal directions from (rho-1)-subsets of the curve
// constraints and keeps those valid on the whole Mori cone.
inline std::vector<DivisorClass> nef_generators(const Fan& f) {
  std::vector<ToricCurve> curves = toric_curves(f);
  std::vector<int> basis = pic_basis(f, curves);
  int rho = static_cast<int>(basis.size());
  // Constraint matrix A[curve][b] = C . D_b for y = sum y_b D_b.
  std::vector<std::vector<Rat>> A;
  for (const ToricCurve& c : curves) {
    std::vector<Rat> row;
    for (int b : basis) row.push_back(c.pairing[b]);
    bool dup = false;
    for (const auto& r : A)
      if (r == row) dup = true;
    if (!dup) A.push_back(row);
  }
  auto feasible = [&](const std::vector<Rat>& y) {
    for (const auto& row : A) {
      Rat acc = 0;
      for (int b = 0; b < rho; ++b) acc += row[b] * y[b];
      if (acc < 0) return false;
    }
    return true;
  };
  std::vector<std::vector<Rat>> dirs;
  std::set<std::vector<std::string>> seen;
  auto try_add = [&](std::vector<Rat> y) {
    if (!feasible(y)) {
      for (Rat& x : y) x = -x;
      if (!feasible(y)) return;
    }
    detail::make_primitive(y);
    std::vector<std::string> key;
    for (const Rat& x : y) key.push_back(rat_str(x));
    if (seen.insert(key).second) dirs.push_back(y);
  };
  if (rho == 1) {
    try_add({Rat(1)});
  } else {
    // All (rho-1)-subsets of constraints.
    int nc = static_cast<int>(A.size());
    std::vector<int> pick;
    std::function<void(int, int)> rec = [&](int start, int k) {
      if (k == 0) {
        std::vector<std::vector<Rat>> rows;
        for (int p : pick) rows.push_back(A[p]);
        if (detail::mat_rank(rows) != rho - 1) return;
        auto ns = detail::null_space(rows, rho);
        if (ns.size() == 1) try_add(ns[0]);
        return;
      }
      for (int i = start; i < nc; ++i) {
        pick.push_back(i);
        rec(i + 1, k - 1);
        pick.pop_back();
      }
    };
    rec(0, rho - 1);
  }
  std::vector<DivisorClass> out;
  for (const auto& y : dirs) {
    DivisorClass d(f.num_rays(), Rat(0));
    for (int b = 0; b < rho; ++b) d[basis[b]] = y[b];
    out.push_back(d);
  }
  if (out.empty()) throw numeric_error("nef cone generator enumeration failed");
  return out;
}

}  // namespace dhym
