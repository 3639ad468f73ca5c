#pragma once

// Exact scalar tower used throughout the workbench:
//   Rat   -- arbitrary-precision rationals
//   Quad  -- elements a + b*sqrt(r) of a real quadratic extension Q(sqrt(r))
//   GQuad -- complex numbers with Quad real and imaginary parts
// Quad carries its radicand r along with the value, so Kahler forms scaled by
// 1/sqrt(3) and optima like 10 - sqrt(78) stay exact end to end.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace dhym {

using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline int sgn(const Rat& x) { return x == 0 ? 0 : (x > 0 ? 1 : -1); }

inline double to_double(const Rat& x) { return static_cast<double>(x); }

inline std::string rat_str(const Rat& x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// Parse "p", "-p/q", allowing surrounding whitespace.
inline Rat parse_rat(const std::string& s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) throw input_error("empty rational literal");
  try {
    auto slash = t.find('/');
    if (slash == std::string::npos) return Rat(Int(t));
    Int num(t.substr(0, slash)), den(t.substr(slash + 1));
    if (den == 0) throw input_error("zero denominator in '" + s + "'");
    return Rat(num, den);
  } catch (const input_error&) {
    throw;
  } catch (const std::exception&) {
    throw input_error("bad rational literal '" + s + "'");
  }
}

// sqrt of a rational if it is a perfect square.
inline std::optional<Rat> exact_sqrt(const Rat& x) {
  if (x < 0) return std::nullopt;
  if (x == 0) return Rat(0);
  Int n = numerator(x), d = denominator(x);
  Int sn = sqrt(n), sd = sqrt(d);
  if (sn * sn == n && sd * sd == d) return Rat(sn, sd);
  return std::nullopt;
}

// a + b*sqrt(r) with r >= 0 rational.  Canonical form: b == 0 implies r == 0,
// and r is never a perfect square (those fold into the rational part).
struct Quad {
  Rat a, b, r;

  Quad() : a(0), b(0), r(0) {}
  Quad(const Rat& a_) : a(a_), b(0), r(0) {}
  Quad(int a_) : a(a_), b(0), r(0) {}
  Quad(const Rat& a_, const Rat& b_, const Rat& r_) : a(a_), b(b_), r(r_) {
    normalize();
  }

  void normalize() {
    if (r < 0) throw numeric_error("negative radicand");
    if (b == 0 || r == 0) {
      b = 0;
      r = 0;
      return;
    }
    if (auto s = exact_sqrt(r)) {
      a += b * *s;
      b = 0;
      r = 0;
      return;
    }
    // Reduce the radicand: sqrt(n/d) = sqrt(n d)/d, then pull square factors
    // out of the integer n d by trial division (sqrt(1248) -> 4 sqrt(78)).
    Int n = numerator(r), d = denominator(r);
    Int m = n * d, sq = 1;
    for (Int p = 2; p * p <= m && p <= 1000000; ++p) {
      Int pp = p * p;
      while (m % pp == 0) {
        m /= pp;
        sq *= p;
      }
    }
    if (sq != 1 || d != 1) {
      b *= Rat(sq, d);
      r = Rat(m);
    }
  }

  bool is_rational() const { return b == 0; }

  double to_double() const {
    return dhym::to_double(a) + dhym::to_double(b) * std::sqrt(dhym::to_double(r));
  }
};

// Check whether two Quads can live in a common extension; returns the shared
// radicand.  Purely rational values are compatible with everything.
inline Rat join_radicand(const Quad& x, const Quad& y) {
  if (x.b == 0) return y.r;
  if (y.b == 0) return x.r;
  if (x.r != y.r)
    throw numeric_error("mixed radicands " + rat_str(x.r) + " vs " + rat_str(y.r));
  return x.r;
}

inline Quad operator+(const Quad& x, const Quad& y) {
  return Quad(x.a + y.a, x.b + y.b, join_radicand(x, y));
}
inline Quad operator-(const Quad& x) { return Quad(-x.a, -x.b, x.r); }
inline Quad operator-(const Quad& x, const Quad& y) { return x + (-y); }
inline Quad operator*(const Quad& x, const Quad& y) {
  Rat r = join_radicand(x, y);
  return Quad(x.a * y.a + x.b * y.b * r, x.a * y.b + x.b * y.a, r);
}
inline Quad& operator+=(Quad& x, const Quad& y) { return x = x + y; }
inline Quad& operator-=(Quad& x, const Quad& y) { return x = x - y; }
inline Quad& operator*=(Quad& x, const Quad& y) { return x = x * y; }

inline int sgn(const Quad& x) {
  if (x.b == 0) return sgn(x.a);
  if (x.a == 0) return sgn(x.b);
  // a and b nonzero: compare a^2 with b^2 r.
  Rat lhs = x.a * x.a, rhs = x.b * x.b * x.r;
  if (lhs == rhs) return sgn(x.a) == sgn(x.b) ? sgn(x.a) : 0;
  if (sgn(x.a) == sgn(x.b)) return sgn(x.a);
  return lhs > rhs ? sgn(x.a) : sgn(x.b);
}

inline bool operator==(const Quad& x, const Quad& y) { return sgn(x - y) == 0; }
inline bool operator!=(const Quad& x, const Quad& y) { return sgn(x - y) != 0; }
inline bool operator<(const Quad& x, const Quad& y) { return sgn(x - y) < 0; }
inline bool operator>(const Quad& x, const Quad& y) { return sgn(x - y) > 0; }
inline bool operator<=(const Quad& x, const Quad& y) { return sgn(x - y) <= 0; }
inline bool operator>=(const Quad& x, const Quad& y) { return sgn(x - y) >= 0; }

inline Quad inv(const Quad& x) {
  if (x.b == 0) {
    if (x.a == 0) throw numeric_error("division by zero");
    return Quad(1 / x.a);
  }
  Rat den = x.a * x.a - x.b * x.b * x.r;
  if (den == 0) throw numeric_error("division by zero in Q(sqrt(r))");
  return Quad(x.a / den, -x.b / den, x.r);
}
inline Quad operator/(const Quad& x, const Quad& y) { return x * inv(y); }

// sqrt(r) as a Quad.
inline Quad quad_sqrt_of(const Rat& r) { return Quad(Rat(0), Rat(1), r); }

inline std::string quad_str(const Quad& x) {
  if (x.b == 0) return rat_str(x.a);
  std::ostringstream os;
  if (x.a != 0) os << x.a << (x.b > 0 ? " + " : " - ");
  else if (x.b < 0) os << "-";
  Rat ab = x.b < 0 ? Rat(-x.b) : x.b;
  if (ab != 1) os << ab << "*";
  os << "sqrt(" << x.r << ")";
  return os.str();
}

// Complex numbers over the Quad field.
struct GQuad {
  Quad re, im;
  GQuad() = default;
  GQuad(const Quad& re_) : re(re_) {}
  GQuad(const Quad& re_, const Quad& im_) : re(re_), im(im_) {}
  GQuad(const Rat& re_) : re(re_) {}
  GQuad(int re_) : re(re_) {}

  std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }
  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
};

inline GQuad operator+(const GQuad& x, const GQuad& y) { return {x.re + y.re, x.im + y.im}; }
inline GQuad operator-(const GQuad& x) { return {-x.re, -x.im}; }
inline GQuad operator-(const GQuad& x, const GQuad& y) { return x + (-y); }
inline GQuad operator*(const GQuad& x, const GQuad& y) {
  return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}
inline GQuad& operator+=(GQuad& x, const GQuad& y) { return x = x + y; }
inline GQuad& operator-=(GQuad& x, const GQuad& y) { return x = x - y; }
inline GQuad& operator*=(GQuad& x, const GQuad& y) { return x = x * y; }
inline GQuad conj(const GQuad& x) { return {x.re, -x.im}; }
inline GQuad mul_i(const GQuad& x) { return {-x.im, x.re}; }

// Ordered bucket for the principal argument in (-pi, pi]; z must be nonzero.
// Buckets increase with arg; odd buckets are the axis directions.
inline int arg_bucket(const GQuad& z) {
  int sre = sgn(z.re), sim = sgn(z.im);
  if (sre == 0 && sim == 0) throw numeric_error("argument of zero");
  if (sim < 0) return sre < 0 ? 0 : (sre == 0 ? 1 : 2);
  if (sim == 0) return sre > 0 ? 3 : 7;
  return sre > 0 ? 4 : (sre == 0 ? 5 : 6);
}

// Compare principal arguments exactly: -1 / 0 / +1 for arg(x) < / = / > arg(y).
inline int arg_cmp(const GQuad& x, const GQuad& y) {
  int bx = arg_bucket(x), by = arg_bucket(y);
  if (bx != by) return bx < by ? -1 : 1;
  // Same open bucket: both args lie in a common open half-plane interval, so
  // the sign of the cross product decides.
  return -sgn(x.re * y.im - x.im * y.re);
}

}  // namespace dhym
