#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "invol2/errors.hpp"

namespace invol2 {
namespace gf2 {

// A monomial packs up to 8 exponents, one byte each, variable 0 in the most
// significant byte so that an unsigned compare is a lexicographic compare.
using Mono = std::uint64_t;

constexpr int kMaxVars = 8;

inline int mono_exp(Mono m, int v) { return static_cast<int>((m >> (8 * (7 - v))) & 0xffu); }

inline Mono mono_var(int v, int e = 1) { return static_cast<Mono>(e) << (8 * (7 - v)); }

inline int mono_deg(Mono m) {
  int s = 0;
  while (m) {
    s += static_cast<int>(m & 0xffu);
    m >>= 8;
  }
  return s;
}

inline bool mono_divides(Mono a, Mono b) {  // a | b
  for (int i = 0; i < 8; ++i) {
    if ((a & 0xffu) > (b & 0xffu)) return false;
    a >>= 8;
    b >>= 8;
  }
  return true;
}

inline Mono mono_mul(Mono a, Mono b) {
  const Mono sum = a + b;
  // carry out of any exponent byte would wrap silently; fail loudly instead
  if (((a & b) | ((a ^ b) & ~sum)) & 0x8080808080808080ULL)
    throw DegreeOverflow("monomial exponent exceeds the representable range");
  return sum;
}
inline Mono mono_div(Mono a, Mono b) { return a - b; }  // pre: b | a

inline Mono mono_gcd(Mono a, Mono b) {
  Mono r = 0;
  for (int i = 0; i < 8; ++i) {
    int sh = 8 * i;
    Mono ea = (a >> sh) & 0xffu, eb = (b >> sh) & 0xffu;
    r |= (ea < eb ? ea : eb) << sh;
  }
  return r;
}

// grlex, larger first
inline bool mono_less_desc(Mono a, Mono b) {
  int da = mono_deg(a), db = mono_deg(b);
  if (da != db) return da > db;
  return a > b;
}

// Multivariate polynomial over GF(2): the set of its monomials, sorted
// grlex-descending.  Addition is symmetric difference; there is no
// coefficient data, which keeps everything canonical by construction.
class Poly {
 public:
  std::vector<Mono> t;

  Poly() = default;
  static Poly zero() { return Poly{}; }
  static Poly one() { return Poly::mono(0); }
  static Poly var(int v, int e = 1) { return Poly::mono(mono_var(v, e)); }
  static Poly mono(Mono m) {
    Poly p;
    p.t.push_back(m);
    return p;
  }

  bool is_zero() const { return t.empty(); }
  bool is_one() const { return t.size() == 1 && t[0] == 0; }
  int total_deg() const { return t.empty() ? -1 : mono_deg(t.front()); }
  Mono lead() const { return t.front(); }

  bool operator==(const Poly& o) const { return t == o.t; }
  bool operator!=(const Poly& o) const { return t != o.t; }
  // grlex-graded comparison of the term lists, used only for deterministic tie-breaks
  bool operator<(const Poly& o) const {
    return std::lexicographical_compare(t.begin(), t.end(), o.t.begin(), o.t.end(), mono_less_desc);
  }

  int deg_in(int v) const {
    int d = 0;
    for (Mono m : t) d = std::max(d, mono_exp(m, v));
    return d;
  }

  bool contains_var(int v) const {
    for (Mono m : t)
      if (mono_exp(m, v) > 0) return true;
    return false;
  }

  std::uint8_t vars_mask() const {
    std::uint8_t r = 0;
    for (Mono m : t)
      for (int v = 0; v < kMaxVars; ++v)
        if (mono_exp(m, v) > 0) r |= std::uint8_t(1u << v);
    return r;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.t.reserve(a.t.size() + b.t.size());
    std::size_t i = 0, j = 0;
    while (i < a.t.size() && j < b.t.size()) {
      if (a.t[i] == b.t[j]) {
        ++i;
        ++j;  // cancels in characteristic 2
      } else if (mono_less_desc(a.t[i], b.t[j])) {
        r.t.push_back(a.t[i++]);
      } else {
        r.t.push_back(b.t[j++]);
      }
    }
    r.t.insert(r.t.end(), a.t.begin() + i, a.t.end());
    r.t.insert(r.t.end(), b.t.begin() + j, b.t.end());
    return r;
  }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly{};
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    std::vector<Mono> buf;
    buf.reserve(a.t.size() * b.t.size());
    for (Mono ma : a.t)
      for (Mono mb : b.t) buf.push_back(mono_mul(ma, mb));
    std::sort(buf.begin(), buf.end(), mono_less_desc);
    Poly r;
    r.t.reserve(buf.size());
    for (std::size_t i = 0; i < buf.size();) {
      std::size_t j = i;
      while (j < buf.size() && buf[j] == buf[i]) ++j;
      if ((j - i) % 2 == 1) r.t.push_back(buf[i]);
      i = j;
    }
    return r;
  }

  Poly& operator+=(const Poly& o) { return *this = *this + o; }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  // In GF(2)[x1..xm] squaring doubles every exponent, so a polynomial is a
  // square iff all exponents are even.
  bool is_square(Poly* root = nullptr) const {
    for (Mono m : t)
      for (int v = 0; v < kMaxVars; ++v)
        if (mono_exp(m, v) % 2 != 0) return false;
    if (root) {
      root->t.clear();
      root->t.reserve(t.size());
      for (Mono m : t) {
        Mono h = 0;
        for (int v = 0; v < kMaxVars; ++v) h |= mono_var(v, mono_exp(m, v) / 2);
        root->t.push_back(h);
      }
      // halving preserves grlex order, no re-sort needed
    }
    return true;
  }

  Poly square() const {
    Poly r;
    r.t.reserve(t.size());
    for (Mono m : t) r.t.push_back(mono_mul(m, m));
    return r;
  }
};

// Exact division; throws InvariantViolation if d does not divide f.
inline Poly divexact(const Poly& f, const Poly& d) {
  if (d.is_zero()) throw DivisionByZero("polynomial division by zero");
  if (f.is_zero()) return Poly{};
  if (d.is_one()) return f;
  Poly r = f, q;
  std::vector<Mono> qt;
  while (!r.is_zero()) {
    if (!mono_divides(d.lead(), r.lead()))
      throw InvariantViolation("divexact: inexact polynomial division");
    Mono m = mono_div(r.lead(), d.lead());
    qt.push_back(m);
    r += Poly::mono(m) * d;
  }
  std::sort(qt.begin(), qt.end(), mono_less_desc);
  q.t = std::move(qt);
  return q;
}

// coefficient of x_v^e in f, as a polynomial with the v-exponent removed
inline Poly coeff_in(const Poly& f, int v, int e) {
  Poly r;
  for (Mono m : f.t)
    if (mono_exp(m, v) == e) r.t.push_back(mono_div(m, mono_var(v, e)));
  std::sort(r.t.begin(), r.t.end(), mono_less_desc);
  return r;
}

inline Poly gcd(const Poly& a, const Poly& b);

namespace detail {

// gcd of all coefficients of f viewed as univariate in x_v
inline Poly content_in(const Poly& f, int v) {
  Poly c;
  for (int e = f.deg_in(v); e >= 0; --e) {
    Poly ce = coeff_in(f, v, e);
    if (ce.is_zero()) continue;
    c = c.is_zero() ? ce : gcd(c, ce);
    if (c.is_one()) break;
  }
  return c;
}

// pseudo-remainder of f by g with respect to x_v (deg_v(g) >= 1)
inline Poly prem(Poly f, const Poly& g, int v) {
  const int dg = g.deg_in(v);
  const Poly lg = coeff_in(g, v, dg);
  while (!f.is_zero()) {
    const int df = f.deg_in(v);
    if (df < dg) break;
    const Poly lf = coeff_in(f, v, df);
    // lg*f + lf*x^(df-dg)*g kills the degree-df coefficient
    f = lg * f + lf * Poly::var(v, df - dg) * g;
  }
  return f;
}

}  // namespace detail

// Recursive primitive-part/content GCD, lowest-index variable as the main
// variable.  Units are trivial over GF(2), so the result is canonical.
inline Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_one() || b.is_one()) return Poly::one();
  const std::uint8_t vm = static_cast<std::uint8_t>(a.vars_mask() | b.vars_mask());
  if (vm == 0) return Poly::one();
  int v = 0;
  while (!(vm & (1u << v))) ++v;

  const Poly ca = detail::content_in(a, v);
  const Poly cb = detail::content_in(b, v);
  const Poly c = gcd(ca, cb);
  Poly f = divexact(a, ca);
  Poly g = divexact(b, cb);
  if (f.deg_in(v) < g.deg_in(v)) std::swap(f, g);
  while (true) {
    if (g.deg_in(v) == 0) {
      // g is primitive of degree 0 in v, hence 1
      return c;
    }
    Poly r = detail::prem(f, g, v);
    if (r.is_zero()) return c * g;
    if (r.deg_in(v) == 0) return c;
    f = g;
    g = divexact(r, detail::content_in(r, v));
  }
}

inline std::string mono_to_string(Mono m, const std::vector<std::string>& names) {
  if (m == 0) return "1";
  std::string s;
  for (int v = 0; v < kMaxVars; ++v) {
    int e = mono_exp(m, v);
    if (e == 0) continue;
    if (!s.empty()) s += "*";
    s += names[static_cast<std::size_t>(v)];
    if (e > 1) s += "^" + std::to_string(e);
  }
  return s;
}

inline std::string to_string(const Poly& p, const std::vector<std::string>& names) {
  if (p.is_zero()) return "0";
  std::string s;
  for (Mono m : p.t) {
    if (!s.empty()) s += " + ";
    s += mono_to_string(m, names);
  }
  return s;
}

}  // namespace gf2
}  // namespace invol2
