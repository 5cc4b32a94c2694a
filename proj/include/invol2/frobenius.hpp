#pragma once

#include <map>
#include <optional>
#include <vector>

#include "invol2/field.hpp"
#include "invol2/linalg.hpp"

namespace invol2 {

// F^2-coordinates of a field element: f = sum over square-free atom monomials
// m of c_m^2 * m, where the atoms form the p-basis of the field over its
// squares.  Masks index positions in FieldCtx::atoms().
using FrobMask = std::uint64_t;

struct FrobCoords {
  FieldCtxPtr ctx;
  std::map<FrobMask, RatFunc> coeff;  // nonzero coefficients only
};

// product of the atom values selected by `mask`, as an element of ctx
inline RatFunc frob_monomial_value(const FieldCtxPtr& ctx, FrobMask mask) {
  RatFunc r = RatFunc::one(ctx);
  const auto& atoms = ctx->atoms();
  for (std::size_t p = 0; p < atoms.size(); ++p)
    if (mask & (FrobMask(1) << p)) r = r * ctx->atom_value(atoms[p]);
  return r;
}

namespace detail {
// base-field split: f = num/den = (num*den)/den^2, then group the polynomial
// num*den by the parity pattern of its exponents
inline FrobCoords frob_decompose_base(const RatFunc& f) {
  FrobCoords out;
  out.ctx = f.ctx();
  const gf2::Poly g = f.num() * f.den();
  std::map<FrobMask, gf2::Poly> parts;
  for (gf2::Mono m : g.t) {
    FrobMask mask = 0;
    gf2::Mono half = 0;
    for (int v = 0; v < gf2::kMaxVars; ++v) {
      const int e = gf2::mono_exp(m, v);
      if (e & 1) mask |= FrobMask(1) << v;
      half |= gf2::mono_var(v, e / 2);
    }
    parts[mask].t.push_back(half);
  }
  for (auto& [mask, p] : parts) {
    std::sort(p.t.begin(), p.t.end(), gf2::mono_less_desc);
    RatFunc c = RatFunc::frac(f.ctx(), p, f.den());
    if (!c.is_zero()) out.coeff.emplace(mask, std::move(c));
  }
  return out;
}
}  // namespace detail

inline FrobCoords frobenius_decompose(const RatFunc& f) {
  const FieldCtxPtr& ctx = f.ctx();
  if (!ctx->is_extension()) return detail::frob_decompose_base(f);

  // K = base(sqrt(alpha)): decompose both components over the base, then
  // rewrite the dropped p-basis atom through the substitution table and tag
  // the c1 part with the generator atom (the last atom position).
  const int dp = ctx->dropped_atom_pos();
  const FrobMask tbit = FrobMask(1) << (ctx->atoms().size() - 1);
  const RatFunc gen = RatFunc::generator(ctx);
  std::vector<std::pair<FrobMask, RatFunc>> subst;
  for (const auto& s : ctx->substitution())
    subst.emplace_back(s.mask, RatFunc::lift(ctx, s.c0) + RatFunc::lift(ctx, s.c1) * gen);

  auto translate = [&](FrobMask s) {
    const FrobMask low = s & ((FrobMask(1) << dp) - 1);
    const FrobMask high = s >> (dp + 1);
    return low | (high << dp);
  };

  FrobCoords out;
  out.ctx = ctx;
  auto add = [&](FrobMask m, const RatFunc& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = out.coeff.emplace(m, c);
    if (!fresh) {
      it->second += c;  // (a^2 + b^2) m = (a + b)^2 m in characteristic 2
      if (it->second.is_zero()) out.coeff.erase(it);
    }
  };
  auto push = [&](const RatFunc& comp, FrobMask extra) {
    FrobCoords d = frobenius_decompose(comp);
    for (const auto& [s, c] : d.coeff) {
      if (!(s & (FrobMask(1) << dp))) {
        add(translate(s) | extra, RatFunc::lift(ctx, c));
      } else {
        const FrobMask rest = translate(s & ~(FrobMask(1) << dp));
        const RatFunc lc = RatFunc::lift(ctx, c);
        for (const auto& [v, h] : subst) {
          const FrobMask inter = v & rest;
          const FrobMask sym = v ^ rest;
          RatFunc coeff = lc * h;
          if (inter) coeff = coeff * frob_monomial_value(ctx, inter);
          add(sym | extra, coeff);
        }
      }
    }
  };
  push(f.c0(), 0);
  push(f.c1(), tbit);
  return out;
}

inline RatFunc frob_reconstruct(const FrobCoords& fc) {
  RatFunc r = RatFunc::zero(fc.ctx);
  for (const auto& [mask, c] : fc.coeff) r += c.square() * frob_monomial_value(fc.ctx, mask);
  return r;
}

// sqrt(f) if f is a square, i.e. its F^2-coordinates sit on the monomial 1
inline std::optional<RatFunc> is_square(const RatFunc& f) {
  FrobCoords d = frobenius_decompose(f);
  for (const auto& [mask, c] : d.coeff)
    if (mask != 0) return std::nullopt;
  RatFunc root = d.coeff.empty() ? RatFunc::zero(f.ctx()) : d.coeff.begin()->second;
  if (root.square() != f) throw InvariantViolation("is_square: root^2 != f");
  return root;
}

// ---------------------------------------------------------------------------
// Solving sum c_i^2 g_i = target for c_i in F.  Taking F^2-coordinates turns
// this into an ordinary F-linear system: per square-free monomial m, the
// (unsquared) coordinates satisfy sum c_i g_{i,m} = t_m, because squaring is
// additive in characteristic 2.

struct FrobeniusSystem {
  FieldCtxPtr ctx;
  std::vector<RatFunc> gens;
  std::vector<FrobMask> masks;  // row labels, ascending
  Matrix mat;                   // masks x gens matrix of unsquared coordinates

  std::optional<std::vector<RatFunc>> solve_target(const RatFunc& target) const {
    FrobCoords td = frobenius_decompose(target);
    std::vector<RatFunc> b(masks.size(), RatFunc::zero(ctx));
    {
      std::size_t row = 0;
      for (const auto& [m, c] : td.coeff) {
        while (row < masks.size() && masks[row] < m) ++row;
        if (row == masks.size() || masks[row] != m) return std::nullopt;  // monomial outside the span
        b[row] = c;
      }
    }
    auto x = solve(mat, b);
    if (!x) return std::nullopt;
    RatFunc check = RatFunc::zero(ctx);
    for (std::size_t i = 0; i < gens.size(); ++i) check += (*x)[i].square() * gens[i];
    if (check != target) throw InvariantViolation("frobenius solve: re-verification failed");
    return x;
  }

  // nontrivial dependencies sum c_i^2 g_i = 0; each basis vector re-verified
  std::vector<std::vector<RatFunc>> kernel() const {
    auto ker = kernel_basis(mat);
    for (const auto& v : ker) {
      RatFunc check = RatFunc::zero(ctx);
      for (std::size_t i = 0; i < gens.size(); ++i) check += v[i].square() * gens[i];
      if (!check.is_zero()) throw InvariantViolation("frobenius kernel: re-verification failed");
    }
    return ker;
  }

  std::size_t rank() const { return gens.size() - kernel_basis(mat).size(); }
};

inline FrobeniusSystem make_frobenius_system(const std::vector<RatFunc>& gens) {
  if (gens.empty()) throw Error("empty generator list");
  const FieldCtxPtr ctx = gens.front().ctx();
  std::vector<FrobCoords> ds;
  ds.reserve(gens.size());
  std::map<FrobMask, std::size_t> rows;
  for (const auto& g : gens) {
    if (g.ctx().get() != ctx.get()) throw Error("generators from different contexts");
    ds.push_back(frobenius_decompose(g));
    for (const auto& [m, c] : ds.back().coeff) rows.emplace(m, 0);
  }
  std::vector<FrobMask> masks;
  masks.reserve(rows.size());
  for (auto& [m, idx] : rows) {
    idx = masks.size();
    masks.push_back(m);
  }
  Matrix mat(ctx, masks.size(), gens.size());
  for (std::size_t j = 0; j < ds.size(); ++j)
    for (const auto& [m, c] : ds[j].coeff) mat.at(rows[m], j) = c;
  return FrobeniusSystem{ctx, gens, std::move(masks), std::move(mat)};
}

// per-target coefficient vectors with sum c_i^2 g_i = target, absent when unsolvable
inline std::vector<std::optional<std::vector<RatFunc>>> solve_frobenius_linear(
    const std::vector<RatFunc>& targets, const std::vector<RatFunc>& gens) {
  FrobeniusSystem sys = make_frobenius_system(gens);
  std::vector<std::optional<std::vector<RatFunc>>> out;
  out.reserve(targets.size());
  for (const auto& t : targets) out.push_back(sys.solve_target(t));
  return out;
}

inline std::optional<std::vector<RatFunc>> solve_frobenius_one(const RatFunc& target,
                                                               const std::vector<RatFunc>& gens) {
  return make_frobenius_system(gens).solve_target(target);
}

// ---------------------------------------------------------------------------
// K = F(sqrt(alpha)).  The p-basis of K is obtained by the exchange rule:
// drop the lowest-indexed atom that appears in a monomial of alpha's
// F^2-coordinates, adjoin the new generator T.  The dropped atom x satisfies
// alpha = R + x P with R, P supported away from x, hence
// x = (T^2 + R) P / P^2 is an F^2-combination of the remaining atoms; the
// substitution table stores that expansion for the decomposition above.
inline FieldCtxPtr extend_by_sqrt(const FieldCtxPtr& ctx, const RatFunc& alpha) {
  if (alpha.ctx().get() != ctx.get()) throw Error("alpha must live in the given context");
  FrobCoords ad = frobenius_decompose(alpha);
  FrobMask unionmask = 0;
  for (const auto& [m, c] : ad.coeff) unionmask |= m;
  if (unionmask == 0) throw AlreadySquare();
  int dp = 0;
  while (!(unionmask & (FrobMask(1) << dp))) ++dp;

  auto k = std::make_shared<FieldCtx>(FieldCtx::Private{});
  k->vars_ = ctx->vars();
  k->budget_ = ctx->degree_budget();
  k->base_ = ctx;
  k->alpha_ = std::make_unique<const RatFunc>(alpha);
  k->dropped_pos_ = dp;
  {
    std::vector<std::string> used = ctx->vars();
    for (const FieldCtx* c = ctx.get(); c->is_extension(); c = c->base().get())
      used.push_back(c->generator_name());
    std::string name = "T";
    for (int suffix = 2; std::find(used.begin(), used.end(), name) != used.end(); ++suffix)
      name = "T" + std::to_string(suffix);
    k->gen_name_ = name;
  }
  for (std::size_t p = 0; p < ctx->atoms().size(); ++p)
    if (static_cast<int>(p) != dp) k->atoms_.push_back(ctx->atoms()[p]);
  k->atoms_.push_back(-k->tower_depth());

  FieldCtxPtr kp = k;
  auto translate = [&](FrobMask s) {
    const FrobMask low = s & ((FrobMask(1) << dp) - 1);
    const FrobMask high = s >> (dp + 1);
    return low | (high << dp);
  };

  // alpha = R + x*P split by membership of the dropped atom
  RatFunc pbase = RatFunc::zero(ctx);
  std::vector<std::pair<FrobMask, RatFunc>> pcoords, rcoords;  // masks in K positions
  for (const auto& [s, c] : ad.coeff) {
    if (s & (FrobMask(1) << dp)) {
      const FrobMask w = translate(s & ~(FrobMask(1) << dp));
      pcoords.emplace_back(w, c);
      pbase += c.square() * frob_monomial_value(ctx, s & ~(FrobMask(1) << dp));
    } else {
      rcoords.emplace_back(translate(s), c);
    }
  }
  std::map<FrobMask, RatFunc> acc;
  auto add = [&](FrobMask m, const RatFunc& c) {
    auto [it, fresh] = acc.emplace(m, c);
    if (!fresh) it->second += c;
  };
  const RatFunc tk = RatFunc::generator(kp);
  for (const auto& [w, d] : pcoords) add(w, tk * RatFunc::lift(kp, d));
  for (const auto& [s, c] : rcoords)
    for (const auto& [w, d] : pcoords) {
      RatFunc coeff = RatFunc::lift(kp, c) * RatFunc::lift(kp, d);
      const FrobMask inter = s & w;
      if (inter) coeff = coeff * frob_monomial_value(kp, inter);
      add(s ^ w, coeff);
    }
  const RatFunc pinv = RatFunc::lift(kp, pbase).inv();
  RatFunc rec = RatFunc::zero(kp);
  for (auto& [m, c] : acc) {
    c = c * pinv;
    if (c.is_zero()) continue;
    // store by base components; owning K elements here would form a cycle
    k->subst_.push_back(FieldCtx::SubstTerm{m, c.c0(), c.c1()});
    rec += c.square() * frob_monomial_value(kp, m);
  }
  // sanity: the table must reconstruct the dropped atom exactly
  if (rec != RatFunc::lift(kp, ctx->atom_value(ctx->atoms()[static_cast<std::size_t>(dp)])))
    throw InvariantViolation("extend_by_sqrt: substitution table failed to reconstruct");
  return kp;
}

}  // namespace invol2
