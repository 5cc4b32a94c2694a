#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "invol2/errors.hpp"
#include "invol2/gf2poly.hpp"

namespace invol2 {

class FieldCtx;
using FieldCtxPtr = std::shared_ptr<const FieldCtx>;

// An element of F = GF(2)(x1..xm) as a reduced fraction of GF(2)-polynomials,
// or of a quadratic extension K = base[T]/(T^2 - alpha) as a pair (c0, c1)
// meaning c0 + c1*T with c0, c1 in the base field.  Representations are
// canonical, so operator== is exact equality.
class RatFunc {
 public:
  RatFunc() = default;

  static RatFunc zero(const FieldCtxPtr& ctx);
  static RatFunc one(const FieldCtxPtr& ctx);
  static RatFunc from_int(const FieldCtxPtr& ctx, unsigned long long n);
  static RatFunc var(const FieldCtxPtr& ctx, int v);
  static RatFunc from_poly(const FieldCtxPtr& ctx, const gf2::Poly& p);
  static RatFunc frac(const FieldCtxPtr& ctx, const gf2::Poly& num, const gf2::Poly& den);
  // embeds a base-field element into its quadratic extension
  static RatFunc lift(const FieldCtxPtr& ext_ctx, const RatFunc& base_elem);
  // the extension generator T of an extension context
  static RatFunc generator(const FieldCtxPtr& ext_ctx);

  const FieldCtxPtr& ctx() const { return ctx_; }
  bool valid() const { return ctx_ != nullptr; }

  bool is_zero() const;
  bool is_one() const;
  bool operator==(const RatFunc& o) const;
  bool operator!=(const RatFunc& o) const { return !(*this == o); }

  // base-field accessors
  const gf2::Poly& num() const { return num_; }
  const gf2::Poly& den() const { return den_; }
  // extension accessors (c0 + c1*T)
  const RatFunc& c0() const { return ext_[0]; }
  const RatFunc& c1() const { return ext_[1]; }

  friend RatFunc operator+(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator*(const RatFunc& a, const RatFunc& b);
  friend RatFunc operator/(const RatFunc& a, const RatFunc& b);
  RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
  RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }

  RatFunc inv() const;
  RatFunc square() const;
  RatFunc pow(unsigned long long e) const;

  // max total degree across the representation, used for pivot selection
  int pivot_degree() const;

  std::string to_string() const;

 private:
  FieldCtxPtr ctx_;
  gf2::Poly num_, den_;       // base representation
  std::vector<RatFunc> ext_;  // size 2 for an extension context

  void reduce_();
  void check_budget_() const;
  static void require_same_ctx_(const RatFunc& a, const RatFunc& b);
};

// Field context: an ordered variable list for GF(2)(x1..xm), the total-degree
// budget, and (for K = base(sqrt(alpha))) the extension data including the
// p-basis bookkeeping used by the Frobenius decomposition.
//
// "Atoms" are the p-basis entries of the field over its squares: variable
// indices for a rational function field; an extension swaps one atom for the
// new generator (codes < 0 identify generators by tower depth).
class FieldCtx : public std::enable_shared_from_this<FieldCtx> {
 public:
  static FieldCtxPtr rational(std::vector<std::string> vars, int degree_budget = 64) {
    if (vars.size() > static_cast<std::size_t>(gf2::kMaxVars))
      throw Error("at most " + std::to_string(gf2::kMaxVars) + " variables are supported");
    if (degree_budget < 1) throw Error("degree budget must be >= 1");
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i].empty()) throw Error("empty variable name");
      for (std::size_t j = i + 1; j < vars.size(); ++j)
        if (vars[i] == vars[j]) throw Error("duplicate variable name: " + vars[i]);
    }
    auto ctx = std::make_shared<FieldCtx>(Private{});
    ctx->vars_ = std::move(vars);
    ctx->budget_ = degree_budget;
    for (int v = 0; v < static_cast<int>(ctx->vars_.size()); ++v) ctx->atoms_.push_back(v);
    return ctx;
  }

  const std::vector<std::string>& vars() const { return vars_; }
  int nvars() const { return static_cast<int>(vars_.size()); }
  int degree_budget() const { return budget_; }

  bool is_extension() const { return base_ != nullptr; }
  const FieldCtxPtr& base() const { return base_; }
  const RatFunc& alpha() const { return *alpha_; }
  int tower_depth() const { return base_ ? base_->tower_depth() + 1 : 0; }
  const std::string& generator_name() const { return gen_name_; }

  // p-basis atoms: codes >= 0 are variable indices, code -d is the
  // generator of the depth-d extension in the tower
  const std::vector<int>& atoms() const { return atoms_; }
  int dropped_atom_pos() const { return dropped_pos_; }
  // dropped base atom as sum h^2 * (square-free atom monomial); each h is
  // stored by its base-field components (c0, c1) so the table does not hold
  // owning references back to this context
  struct SubstTerm {
    std::uint64_t mask;
    RatFunc c0, c1;
  };
  const std::vector<SubstTerm>& substitution() const { return subst_; }

  std::string atom_name(int code) const {
    if (code >= 0) return vars_[static_cast<std::size_t>(code)];
    const FieldCtx* c = this;
    while (c->tower_depth() > -code) c = c->base_.get();
    return c->gen_name_;
  }

  // value of atom `code` as an element of this field
  RatFunc atom_value(int code) const {
    auto self = shared_from_this();
    if (code >= 0) return RatFunc::var(self, code);
    if (-code == tower_depth()) return RatFunc::generator(self);
    return RatFunc::lift(self, base_->atom_value(code));
  }

  struct Private {};  // make_shared helper; use the factories
  explicit FieldCtx(Private) {}

 private:
  std::vector<std::string> vars_;
  int budget_ = 64;
  FieldCtxPtr base_;
  std::unique_ptr<const RatFunc> alpha_;
  std::string gen_name_;
  std::vector<int> atoms_;
  int dropped_pos_ = -1;
  std::vector<SubstTerm> subst_;

  friend FieldCtxPtr extend_by_sqrt(const FieldCtxPtr&, const RatFunc&);
};

inline void RatFunc::require_same_ctx_(const RatFunc& a, const RatFunc& b) {
  if (a.ctx_.get() != b.ctx_.get()) throw Error("operands belong to different field contexts");
}

inline RatFunc RatFunc::zero(const FieldCtxPtr& ctx) {
  RatFunc r;
  r.ctx_ = ctx;
  if (ctx->is_extension()) {
    r.ext_ = {zero(ctx->base()), zero(ctx->base())};
  } else {
    r.den_ = gf2::Poly::one();
  }
  return r;
}

inline RatFunc RatFunc::one(const FieldCtxPtr& ctx) {
  RatFunc r = zero(ctx);
  if (ctx->is_extension())
    r.ext_[0] = one(ctx->base());
  else
    r.num_ = gf2::Poly::one();
  return r;
}

inline RatFunc RatFunc::from_int(const FieldCtxPtr& ctx, unsigned long long n) {
  return n % 2 ? one(ctx) : zero(ctx);
}

inline RatFunc RatFunc::var(const FieldCtxPtr& ctx, int v) {
  if (v < 0 || v >= ctx->nvars()) throw Error("variable index out of range");
  if (ctx->is_extension()) return lift(ctx, var(ctx->base(), v));
  RatFunc r = zero(ctx);
  r.num_ = gf2::Poly::var(v);
  return r;
}

inline RatFunc RatFunc::from_poly(const FieldCtxPtr& ctx, const gf2::Poly& p) {
  if (ctx->is_extension()) return lift(ctx, from_poly(ctx->base(), p));
  RatFunc r = zero(ctx);
  r.num_ = p;
  r.check_budget_();
  return r;
}

inline RatFunc RatFunc::frac(const FieldCtxPtr& ctx, const gf2::Poly& num, const gf2::Poly& den) {
  if (ctx->is_extension()) return lift(ctx, frac(ctx->base(), num, den));
  if (den.is_zero()) throw DivisionByZero();
  RatFunc r;
  r.ctx_ = ctx;
  r.num_ = num;
  r.den_ = den;
  r.reduce_();
  return r;
}

inline RatFunc RatFunc::lift(const FieldCtxPtr& ext_ctx, const RatFunc& base_elem) {
  if (!ext_ctx->is_extension() || ext_ctx->base().get() != base_elem.ctx().get())
    throw Error("lift: not an element of the base field");
  RatFunc r;
  r.ctx_ = ext_ctx;
  r.ext_ = {base_elem, zero(ext_ctx->base())};
  return r;
}

inline RatFunc RatFunc::generator(const FieldCtxPtr& ext_ctx) {
  if (!ext_ctx->is_extension()) throw Error("generator: not an extension context");
  RatFunc r;
  r.ctx_ = ext_ctx;
  r.ext_ = {zero(ext_ctx->base()), one(ext_ctx->base())};
  return r;
}

inline bool RatFunc::is_zero() const {
  if (!ext_.empty()) return ext_[0].is_zero() && ext_[1].is_zero();
  return num_.is_zero();
}

inline bool RatFunc::is_one() const {
  if (!ext_.empty()) return ext_[0].is_one() && ext_[1].is_zero();
  return num_.is_one() && den_.is_one();
}

inline bool RatFunc::operator==(const RatFunc& o) const {
  if (ctx_.get() != o.ctx_.get()) return false;
  if (!ext_.empty()) return ext_[0] == o.ext_[0] && ext_[1] == o.ext_[1];
  return num_ == o.num_ && den_ == o.den_;
}

inline void RatFunc::check_budget_() const {
  const int b = ctx_->degree_budget();
  if (num_.total_deg() > b || den_.total_deg() > b)
    throw DegreeOverflow("total degree " +
                         std::to_string(std::max(num_.total_deg(), den_.total_deg())) +
                         " exceeds budget " + std::to_string(b));
}

inline void RatFunc::reduce_() {
  if (den_.is_zero()) throw DivisionByZero();
  if (num_.is_zero()) {
    den_ = gf2::Poly::one();
    return;
  }
  if (!den_.is_one()) {
    gf2::Poly g = gf2::gcd(num_, den_);
    if (!g.is_one()) {
      num_ = gf2::divexact(num_, g);
      den_ = gf2::divexact(den_, g);
    }
  }
  check_budget_();
}

inline RatFunc operator+(const RatFunc& a, const RatFunc& b) {
  RatFunc::require_same_ctx_(a, b);
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (!a.ext_.empty()) {
    RatFunc r;
    r.ctx_ = a.ctx_;
    r.ext_ = {a.ext_[0] + b.ext_[0], a.ext_[1] + b.ext_[1]};
    return r;
  }
  RatFunc r;
  r.ctx_ = a.ctx_;
  if (a.den_ == b.den_) {
    r.num_ = a.num_ + b.num_;
    r.den_ = a.den_;
    r.reduce_();
    return r;
  }
  const gf2::Poly d = gf2::gcd(a.den_, b.den_);
  const gf2::Poly ad = gf2::divexact(a.den_, d);
  const gf2::Poly bd = gf2::divexact(b.den_, d);
  r.num_ = a.num_ * bd + b.num_ * ad;
  r.den_ = ad * b.den_;
  r.reduce_();
  return r;
}

inline RatFunc operator*(const RatFunc& a, const RatFunc& b) {
  RatFunc::require_same_ctx_(a, b);
  if (a.is_zero() || b.is_zero()) return RatFunc::zero(a.ctx_);
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (!a.ext_.empty()) {
    // (a0 + a1 T)(b0 + b1 T) = (a0 b0 + a1 b1 alpha) + (a0 b1 + a1 b0) T
    const RatFunc& alpha = a.ctx_->alpha();
    RatFunc r;
    r.ctx_ = a.ctx_;
    r.ext_ = {a.ext_[0] * b.ext_[0] + a.ext_[1] * b.ext_[1] * alpha,
              a.ext_[0] * b.ext_[1] + a.ext_[1] * b.ext_[0]};
    return r;
  }
  // cross-cancel so the product of reduced fractions is already reduced
  const gf2::Poly g1 = gf2::gcd(a.num_, b.den_);
  const gf2::Poly g2 = gf2::gcd(b.num_, a.den_);
  RatFunc r;
  r.ctx_ = a.ctx_;
  r.num_ = gf2::divexact(a.num_, g1) * gf2::divexact(b.num_, g2);
  r.den_ = gf2::divexact(a.den_, g2) * gf2::divexact(b.den_, g1);
  r.check_budget_();
  return r;
}

inline RatFunc RatFunc::inv() const {
  if (is_zero()) throw DivisionByZero("inverse of zero");
  if (!ext_.empty()) {
    // (a + bT)^-1 = (a + bT)/(a^2 + alpha b^2), the denominator lies in the base field
    const RatFunc& alpha_k = ctx_->alpha();
    RatFunc norm = ext_[0].square() + alpha_k * ext_[1].square();
    if (norm.is_zero()) throw DivisionByZero("inverse of zero");
    RatFunc ninv = norm.inv();
    RatFunc r;
    r.ctx_ = ctx_;
    r.ext_ = {ext_[0] * ninv, ext_[1] * ninv};
    return r;
  }
  RatFunc r;
  r.ctx_ = ctx_;
  r.num_ = den_;
  r.den_ = num_;
  return r;
}

inline RatFunc operator/(const RatFunc& a, const RatFunc& b) { return a * b.inv(); }

inline RatFunc RatFunc::square() const {
  if (!ext_.empty()) {
    // (a + bT)^2 = a^2 + alpha b^2, no T component survives
    RatFunc r;
    r.ctx_ = ctx_;
    r.ext_ = {ext_[0].square() + ctx_->alpha() * ext_[1].square(), zero(ctx_->base())};
    return r;
  }
  RatFunc r;
  r.ctx_ = ctx_;
  r.num_ = num_.square();
  r.den_ = den_.square();
  r.check_budget_();
  return r;
}

inline RatFunc RatFunc::pow(unsigned long long e) const {
  RatFunc acc = one(ctx_);
  RatFunc base = *this;
  while (e) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e) base = base.square();
  }
  return acc;
}

inline int RatFunc::pivot_degree() const {
  if (!ext_.empty()) return std::max(ext_[0].pivot_degree(), ext_[1].pivot_degree());
  return std::max(num_.total_deg(), den_.total_deg());
}

inline std::string RatFunc::to_string() const {
  if (!ext_.empty()) {
    const std::string t = ctx_->generator_name();
    if (ext_[1].is_zero()) return ext_[0].to_string();
    std::string hi = ext_[1].is_one() ? t : "(" + ext_[1].to_string() + ")*" + t;
    if (ext_[0].is_zero()) return hi;
    return ext_[0].to_string() + " + " + hi;
  }
  const std::string n = gf2::to_string(num_, ctx_->vars());
  if (den_.is_one()) return n;
  return "(" + n + ")/(" + gf2::to_string(den_, ctx_->vars()) + ")";
}

// ---------------------------------------------------------------------------
// Seeded randomness.  Coefficient polynomials are drawn dense over all
// monomials of bounded total degree, which keeps downstream algebra small.

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  std::uint64_t next() { return g_(); }
  bool bit() { return (g_() >> 17) & 1; }
  std::uint32_t below(std::uint32_t n) {
    return static_cast<std::uint32_t>(g_() % n);
  }

 private:
  std::mt19937_64 g_;
};

namespace detail {
inline void enum_monos(int nvars, int maxdeg, int v, gf2::Mono cur, std::vector<gf2::Mono>& out) {
  if (v == nvars) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= maxdeg; ++e) enum_monos(nvars, maxdeg - e, v + 1, gf2::mono_mul(cur, gf2::mono_var(v, e)), out);
}
}  // namespace detail

inline std::vector<gf2::Mono> monomials_up_to(int nvars, int maxdeg) {
  std::vector<gf2::Mono> out;
  detail::enum_monos(nvars, maxdeg, 0, 0, out);
  std::sort(out.begin(), out.end(), gf2::mono_less_desc);
  return out;
}

inline gf2::Poly random_poly(const FieldCtxPtr& ctx, Rng& rng, int maxdeg = 2, bool nonzero = false) {
  const FieldCtx* c = ctx.get();
  while (c->is_extension()) c = c->base().get();
  auto monos = monomials_up_to(c->nvars(), maxdeg);
  gf2::Poly p;
  for (gf2::Mono m : monos)
    if (rng.bit()) p += gf2::Poly::mono(m);
  if (nonzero && p.is_zero()) p = gf2::Poly::one();
  return p;
}

inline RatFunc random_element(const FieldCtxPtr& ctx, Rng& rng, int maxdeg = 2, bool nonzero = false) {
  if (ctx->is_extension()) {
    RatFunc c0 = random_element(ctx->base(), rng, maxdeg, nonzero);
    RatFunc c1 = random_element(ctx->base(), rng, maxdeg, false);
    return RatFunc::lift(ctx, c0) + RatFunc::lift(ctx, c1) * RatFunc::generator(ctx);
  }
  return RatFunc::from_poly(ctx, random_poly(ctx, rng, maxdeg, nonzero));
}

// ---------------------------------------------------------------------------
// Parsing.  Grammar: sum := prod (('+'|'-') prod)*, prod := pow (('*'|'/') pow)*,
// pow := atom ('^' uint)?, atom := ident | uint | '(' sum ')'.  Identifiers
// resolve to context variables or extension generators.

namespace detail {

struct Lexer {
  std::string s;
  std::size_t i = 0;

  void skip() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
  }
  bool eof() {
    skip();
    return i >= s.size();
  }
  char peek() {
    skip();
    return i < s.size() ? s[i] : '\0';
  }
  bool accept(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  std::string ident() {
    skip();
    std::size_t j = i;
    auto head = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
    if (j < s.size() && head(s[j])) {
      ++j;
      while (j < s.size() && tail(s[j])) ++j;
      std::string r = s.substr(i, j - i);
      i = j;
      return r;
    }
    return {};
  }
  std::optional<unsigned long long> uint_lit() {
    skip();
    std::size_t j = i;
    unsigned long long v = 0;
    while (j < s.size() && s[j] >= '0' && s[j] <= '9') {
      v = v * 10 + static_cast<unsigned long long>(s[j] - '0');
      ++j;
    }
    if (j == i) return std::nullopt;
    i = j;
    return v;
  }
};

inline std::optional<RatFunc> resolve_name(const FieldCtxPtr& ctx, const std::string& name) {
  for (int v = 0; v < ctx->nvars(); ++v)
    if (ctx->vars()[static_cast<std::size_t>(v)] == name) return RatFunc::var(ctx, v);
  const FieldCtx* c = ctx.get();
  int depth = c->tower_depth();
  while (c->is_extension()) {
    if (c->generator_name() == name) return ctx->atom_value(-depth);
    c = c->base().get();
    --depth;
  }
  return std::nullopt;
}

inline RatFunc parse_sum(const FieldCtxPtr& ctx, Lexer& lx);

inline RatFunc parse_atom(const FieldCtxPtr& ctx, Lexer& lx) {
  if (lx.accept('(')) {
    RatFunc r = parse_sum(ctx, lx);
    if (!lx.accept(')')) throw ParseError("expected ')'");
    return r;
  }
  std::string id = lx.ident();
  if (!id.empty()) {
    auto r = resolve_name(ctx, id);
    if (!r) throw ParseError("unknown name: " + id);
    return *r;
  }
  if (auto v = lx.uint_lit()) return RatFunc::from_int(ctx, *v);
  throw ParseError("expected a term at position " + std::to_string(lx.i));
}

inline RatFunc parse_pow(const FieldCtxPtr& ctx, Lexer& lx) {
  RatFunc b = parse_atom(ctx, lx);
  if (lx.accept('^')) {
    auto e = lx.uint_lit();
    if (!e) throw ParseError("expected an integer exponent");
    return b.pow(*e);
  }
  return b;
}

inline RatFunc parse_prod(const FieldCtxPtr& ctx, Lexer& lx) {
  RatFunc r = parse_pow(ctx, lx);
  while (true) {
    if (lx.accept('*'))
      r = r * parse_pow(ctx, lx);
    else if (lx.accept('/'))
      r = r / parse_pow(ctx, lx);
    else
      return r;
  }
}

inline RatFunc parse_sum(const FieldCtxPtr& ctx, Lexer& lx) {
  RatFunc r = parse_prod(ctx, lx);
  while (true) {
    // '-' coincides with '+' in characteristic 2
    if (lx.accept('+') || lx.accept('-'))
      r = r + parse_prod(ctx, lx);
    else
      return r;
  }
}

}  // namespace detail

inline RatFunc parse_ratfunc(const FieldCtxPtr& ctx, const std::string& text) {
  detail::Lexer lx{text};
  RatFunc r = detail::parse_sum(ctx, lx);
  if (!lx.eof()) throw ParseError("trailing input: '" + text.substr(lx.i) + "'");
  return r;
}

}  // namespace invol2
