#pragma once

// Smooth complete fans in Z^n: validation, presets, strata enumeration, and
// the cyclic self-intersection data for surfaces.

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <vector>

#include "rational.hpp"

namespace dhym {

using Ray = std::vector<long long>;
using Cone = std::vector<int>;  // sorted ray indices

struct Fan {
  int n = 0;                      // ambient lattice rank
  std::vector<Ray> rays;          // primitive generators
  std::vector<Cone> max_cones;    // each of size n, sorted
  std::string name;               // preset label, informational

  // Optional named divisor basis (e.g. h, e on the blow-up of the plane):
  // each entry is a class written in ray-divisor coordinates.
  std::vector<std::pair<std::string, std::vector<Rat>>> basis;

  // Memoized top intersection numbers, keyed by sorted index multiset.
  struct Cache {
    std::map<std::vector<int>, Rat> top;
    std::mutex mu;
  };
  std::shared_ptr<Cache> cache = std::make_shared<Cache>();

  int num_rays() const { return static_cast<int>(rays.size()); }
};

namespace detail {

inline Rat det_rat(std::vector<std::vector<Rat>> m) {
  int n = static_cast<int>(m.size());
  Rat det = 1;
  for (int c = 0; c < n; ++c) {
    int p = -1;
    for (int r = c; r < n; ++r)
      if (m[r][c] != 0) {
        p = r;
        break;
      }
    if (p < 0) return Rat(0);
    if (p != c) {
      std::swap(m[p], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (int r = c + 1; r < n; ++r) {
      Rat f = m[r][c] / m[c][c];
      for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

inline long long gcdll(long long a, long long b) { return std::gcd(std::llabs(a), std::llabs(b)); }

}  // namespace detail

// Determinant of the ray matrix of a maximal cone; +-1 iff the cone is smooth.
inline Rat cone_det(const Fan& f, const Cone& sigma) {
  std::vector<std::vector<Rat>> m;
  for (int i : sigma) {
    std::vector<Rat> row;
    for (long long v : f.rays[i]) row.emplace_back(v);
    m.push_back(std::move(row));
  }
  return detail::det_rat(std::move(m));
}

// Throws input_error when the fan is not a smooth complete fan.
inline void validate_fan(const Fan& f) {
  if (f.n < 1) throw input_error("fan dimension must be positive");
  for (const Ray& v : f.rays) {
    if (static_cast<int>(v.size()) != f.n) throw input_error("ray of wrong dimension");
    long long g = 0;
    for (long long c : v) g = detail::gcdll(g, c);
    if (g != 1) throw input_error("ray is not primitive");
  }
  std::set<Ray> seen(f.rays.begin(), f.rays.end());
  if (static_cast<int>(seen.size()) != f.num_rays()) throw input_error("duplicate rays");

  if (f.max_cones.empty()) throw input_error("no maximal cones");
  std::set<Cone> cone_set;
  for (const Cone& s : f.max_cones) {
    if (static_cast<int>(s.size()) != f.n) throw input_error("maximal cone of wrong size");
    if (!std::is_sorted(s.begin(), s.end())) throw input_error("cone indices not sorted");
    for (int i : s)
      if (i < 0 || i >= f.num_rays()) throw input_error("cone index out of range");
    Rat d = cone_det(f, s);
    if (d != 1 && d != -1) throw input_error("non-smooth maximal cone");
    if (!cone_set.insert(s).second) throw input_error("duplicate maximal cone");
  }
  // Cone-membership lookups binary-search this list, so the list itself must
  // be in lexicographic order.
  if (!std::is_sorted(f.max_cones.begin(), f.max_cones.end()))
    throw input_error("maximal cone list not sorted");

  // Completeness for a smooth fan: every facet ((n-1)-face) of a maximal cone
  // lies in exactly two maximal cones, and the facet-adjacency graph is
  // connected.  For n = 1 this degenerates to the two rays +-1.
  if (f.n == 1) {
    if (f.max_cones.size() != 2) throw input_error("incomplete fan");
    return;
  }
  std::map<Cone, std::vector<int>> facets;
  for (int ci = 0; ci < static_cast<int>(f.max_cones.size()); ++ci) {
    const Cone& s = f.max_cones[ci];
    for (int drop = 0; drop < f.n; ++drop) {
      Cone fac;
      for (int k = 0; k < f.n; ++k)
        if (k != drop) fac.push_back(s[k]);
      facets[fac].push_back(ci);
    }
  }
  std::vector<std::set<int>> adj(f.max_cones.size());
  for (const auto& [fac, owners] : facets) {
    if (owners.size() != 2) throw input_error("incomplete fan: facet not shared by two cones");
    adj[owners[0]].insert(owners[1]);
    adj[owners[1]].insert(owners[0]);
  }
  std::vector<char> vis(f.max_cones.size(), 0);
  std::vector<int> stack = {0};
  vis[0] = 1;
  while (!stack.empty()) {
    int c = stack.back();
    stack.pop_back();
    for (int d : adj[c])
      if (!vis[d]) {
        vis[d] = 1;
        stack.push_back(d);
      }
  }
  if (std::count(vis.begin(), vis.end(), 1) != static_cast<long>(f.max_cones.size()))
    throw input_error("incomplete fan: support not connected");
}

namespace detail {

inline std::vector<Rat> ray_unit(int m, int i) {
  std::vector<Rat> v(m, Rat(0));
  v[i] = 1;
  return v;
}

}  // namespace detail

// Projective space P^n.
inline Fan fan_pn(int n) {
  if (n < 1) throw input_error("pn needs n >= 1");
  Fan f;
  f.n = n;
  f.name = "p" + std::to_string(n);
  for (int i = 0; i < n; ++i) {
    Ray e(n, 0);
    e[i] = 1;
    f.rays.push_back(e);
  }
  f.rays.push_back(Ray(n, -1));
  for (int omit = 0; omit <= n; ++omit) {
    Cone s;
    for (int i = 0; i <= n; ++i)
      if (i != omit) s.push_back(i);
    f.max_cones.push_back(s);
  }
  std::sort(f.max_cones.begin(), f.max_cones.end());
  if (n >= 1) f.basis = {{"h", detail::ray_unit(n + 1, 0)}};
  return f;
}

inline Fan fan_p2() {
  Fan f = fan_pn(2);
  f.name = "p2";
  return f;
}

inline Fan fan_p1xp1() {
  Fan f;
  f.n = 2;
  f.name = "p1xp1";
  f.rays = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  f.max_cones = {{0, 2}, {0, 3}, {1, 2}, {1, 3}};
  // f1 = fiber of first projection (= D2 class), f2 = fiber of second (= D0).
  f.basis = {{"f1", detail::ray_unit(4, 2)}, {"f2", detail::ray_unit(4, 0)}};
  return f;
}

// Hirzebruch surface F_a; ray 1 = (0,1) carries the (-a)-curve.
inline Fan fan_hirzebruch(int a) {
  if (a < 0) throw input_error("hirzebruch parameter must be >= 0");
  Fan f;
  f.n = 2;
  f.name = "hirzebruch" + std::to_string(a);
  f.rays = {{1, 0}, {0, 1}, {-1, static_cast<long long>(a)}, {0, -1}};
  f.max_cones = {{0, 1}, {0, 3}, {1, 2}, {2, 3}};
  // s = negative section (D1), fib = fiber class (D0).
  f.basis = {{"s", detail::ray_unit(4, 1)}, {"fib", detail::ray_unit(4, 0)}};
  return f;
}

// Blow-up of P^2 at one torus-fixed point; ray 3 = (1,1) is the exceptional curve.
inline Fan fan_blp_p2() {
  Fan f;
  f.n = 2;
  f.name = "blp_p2";
  f.rays = {{1, 0}, {0, 1}, {-1, -1}, {1, 1}};
  f.max_cones = {{0, 3}, {1, 3}, {0, 2}, {1, 2}};
  std::sort(f.max_cones.begin(), f.max_cones.end());
  // h = pullback of the line (= D2 class), e = exceptional divisor D3.
  f.basis = {{"h", detail::ray_unit(4, 2)}, {"e", detail::ray_unit(4, 3)}};
  return f;
}

// Blow-up of P^2 at two torus-fixed points; rays 3 = (1,1) and 4 = (-1,0)
// are the two exceptional curves.
inline Fan fan_blpq_p2() {
  Fan f;
  f.n = 2;
  f.name = "blpq_p2";
  f.rays = {{1, 0}, {0, 1}, {-1, -1}, {1, 1}, {-1, 0}};
  f.max_cones = {{0, 3}, {1, 3}, {1, 4}, {2, 4}, {0, 2}};
  std::sort(f.max_cones.begin(), f.max_cones.end());
  f.basis = {{"h", detail::ray_unit(5, 2)},
             {"e1", detail::ray_unit(5, 3)},
             {"e2", detail::ray_unit(5, 4)}};
  return f;
}

// Blow-up of P^n at one torus-fixed point: star subdivision of the cone
// <e_1..e_n> at (1,..,1).  Rays: e_1..e_n, (-1,..,-1), (1,..,1).
inline Fan fan_blp_pn(int n) {
  if (n < 2) throw input_error("blp_pn needs n >= 2");
  Fan f;
  f.n = n;
  f.name = "blp_p" + std::to_string(n);
  for (int i = 0; i < n; ++i) {
    Ray e(n, 0);
    e[i] = 1;
    f.rays.push_back(e);
  }
  f.rays.push_back(Ray(n, -1));  // index n
  f.rays.push_back(Ray(n, 1));   // index n+1, exceptional
  // Cones of P^n containing the ray -1 (i.e. omitting some e_i) survive.
  for (int omit = 0; omit < n; ++omit) {
    Cone s;
    for (int i = 0; i < n; ++i)
      if (i != omit) s.push_back(i);
    s.push_back(n);
    std::sort(s.begin(), s.end());
    f.max_cones.push_back(s);
  }
  // <e_1..e_n> is replaced by its star subdivision at the new ray.
  for (int omit = 0; omit < n; ++omit) {
    Cone s;
    for (int i = 0; i < n; ++i)
      if (i != omit) s.push_back(i);
    s.push_back(n + 1);
    std::sort(s.begin(), s.end());
    f.max_cones.push_back(s);
  }
  std::sort(f.max_cones.begin(), f.max_cones.end());
  f.basis = {{"h", detail::ray_unit(n + 2, n)}, {"e", detail::ray_unit(n + 2, n + 1)}};
  return f;
}

// Parse names like "p2", "pn(3)", "hirzebruch(2)", "blp_p2", "blp_pn(3)".
inline Fan preset_fan(const std::string& spec) {
  auto param = [&](const std::string& prefix) -> std::optional<int> {
    if (spec.rfind(prefix + "(", 0) == 0 && spec.back() == ')') {
      std::string inner = spec.substr(prefix.size() + 1, spec.size() - prefix.size() - 2);
      try {
        return std::stoi(inner);
      } catch (const std::exception&) {
        throw input_error("bad preset parameter in '" + spec + "'");
      }
    }
    return std::nullopt;
  };
  Fan f;
  if (spec == "p2") f = fan_p2();
  else if (spec == "p1") f = fan_pn(1);
  else if (auto n = param("pn")) f = fan_pn(*n);
  else if (spec == "p1xp1") f = fan_p1xp1();
  else if (auto a = param("hirzebruch")) f = fan_hirzebruch(*a);
  else if (spec == "blp_p2") f = fan_blp_p2();
  else if (spec == "blpq_p2") f = fan_blpq_p2();
  else if (auto n = param("blp_pn")) f = fan_blp_pn(*n);
  else throw input_error("unknown preset '" + spec + "'");
  validate_fan(f);
  return f;
}

// Does the fan match the combinatorics of blp_pn (up to nothing: presets are
// built with a fixed ray order, so an exact structural check is enough)?
inline bool is_blp_pn(const Fan& f) {
  if (f.num_rays() != f.n + 2 || f.n < 2) return false;
  Fan ref = fan_blp_pn(f.n);
  return f.rays == ref.rays && f.max_cones == ref.max_cones;
}

struct Stratum {
  Cone cone;   // generating rays of the torus orbit closure
  int codim;   // = |cone|
};

// All torus-invariant proper subvarieties: nonzero cones of the fan, listed
// as faces of maximal cones, sorted by codimension then lexicographically.
inline std::vector<Stratum> enumerate_strata(const Fan& f) {
  std::set<Cone> faces;
  for (const Cone& s : f.max_cones) {
    int k = static_cast<int>(s.size());
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
      Cone face;
      for (int i = 0; i < k; ++i)
        if (mask & (1u << i)) face.push_back(s[i]);
      faces.insert(face);
    }
  }
  std::vector<Stratum> out;
  for (const Cone& c : faces) out.push_back({c, static_cast<int>(c.size())});
  std::sort(out.begin(), out.end(), [](const Stratum& a, const Stratum& b) {
    if (a.codim != b.codim) return a.codim < b.codim;
    return a.cone < b.cone;
  });
  return out;
}

// For a smooth complete surface fan: rays in counterclockwise order together
// with the integers c_i defined by v_{i-1} + v_{i+1} = c_i v_i, so that the
// toric divisor D_i has self-intersection -c_i.
struct SurfaceCurveData {
  std::vector<int> cyclic_order;       // ray indices, counterclockwise
  std::map<int, long long> wheel_c;    // ray index -> c_i
  std::map<int, long long> self_int;   // ray index -> D_i^2 = -c_i
};

inline SurfaceCurveData surface_curve_selfintersections(const Fan& f) {
  if (f.n != 2) throw input_error("surface_curve_selfintersections needs a surface fan");
  int m = f.num_rays();
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  auto half = [&](int i) {  // 0 for upper half plane (incl. positive x-axis), 1 below
    const Ray& v = f.rays[i];
    return (v[1] > 0 || (v[1] == 0 && v[0] > 0)) ? 0 : 1;
  };
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    int hi = half(i), hj = half(j);
    if (hi != hj) return hi < hj;
    const Ray &a = f.rays[i], &b = f.rays[j];
    return a[0] * b[1] - a[1] * b[0] > 0;  // counterclockwise within a half plane
  });
  SurfaceCurveData out;
  out.cyclic_order = order;
  for (int k = 0; k < m; ++k) {
    const Ray& prev = f.rays[order[(k + m - 1) % m]];
    const Ray& next = f.rays[order[(k + 1) % m]];
    const Ray& v = f.rays[order[k]];
    Ray s = {prev[0] + next[0], prev[1] + next[1]};
    // s = c * v with v primitive.
    long long c;
    if (v[0] != 0) {
      if (s[0] % v[0] != 0) throw numeric_error("wheel relation failed");
      c = s[0] / v[0];
    } else {
      if (s[1] % v[1] != 0) throw numeric_error("wheel relation failed");
      c = s[1] / v[1];
    }
    if (s[0] != c * v[0] || s[1] != c * v[1]) throw numeric_error("wheel relation failed");
    out.wheel_c[order[k]] = c;
    out.self_int[order[k]] = -c;
  }
  // Euler relation for smooth complete surfaces: sum of c_i = 3m - 12.
  long long total = 0;
  for (auto& [i, c] : out.wheel_c) total += c;
  if (total != 3LL * m - 12) throw numeric_error("surface wheel sum violates Euler relation");
  return out;
}

}  // namespace dhym
