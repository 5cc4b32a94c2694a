#pragma once

#include <optional>
#include <vector>

#include "invol2/frobenius.hpp"
#include "invol2/involution.hpp"

namespace invol2 {

// diagonal symmetric bilinear form <a_1, ..., a_k>, nonzero entries
struct DiagonalForm {
  FieldCtxPtr ctx;
  std::vector<RatFunc> entries;
};

inline DiagonalForm make_diagonal(const std::vector<RatFunc>& entries) {
  if (entries.empty()) throw Error("empty diagonal form");
  const FieldCtxPtr ctx = entries.front().ctx();
  for (const auto& e : entries) {
    if (e.ctx().get() != ctx.get()) throw Error("form entries from different contexts");
    if (e.is_zero()) throw ZeroEntry("diagonal form entry must be nonzero");
  }
  return DiagonalForm{ctx, entries};
}

// entries of a (x) b: all pairwise products, second factor major so that
// <1,x> (x) <1,y> = <1,x,y,xy>
inline DiagonalForm tensor_forms(const DiagonalForm& a, const DiagonalForm& b) {
  if (a.ctx.get() != b.ctx.get()) throw Error("forms from different contexts");
  std::vector<RatFunc> e;
  e.reserve(a.entries.size() * b.entries.size());
  for (const auto& bj : b.entries)
    for (const auto& ai : a.entries) e.push_back(ai * bj);
  return DiagonalForm{a.ctx, std::move(e)};
}

// bilinear Pfister form <<a_1, ..., a_n>>; expansion entry at subset mask S
// is the product of the generators selected by S
struct PfisterForm {
  std::vector<RatFunc> gens;
  DiagonalForm expansion;
  std::size_t n() const { return gens.size(); }
};

inline PfisterForm make_pfister(const std::vector<RatFunc>& gens) {
  if (gens.size() > 8) throw Error("pfister form with more than 8 slots");
  FieldCtxPtr ctx = gens.empty() ? nullptr : gens.front().ctx();
  for (const auto& g : gens) {
    if (g.ctx().get() != ctx.get()) throw Error("generators from different contexts");
    if (g.is_zero()) throw ZeroEntry("pfister generator must be nonzero");
  }
  if (!ctx) throw Error("make_pfister: need a context (no generators)");
  std::vector<RatFunc> e;
  const std::size_t total = std::size_t(1) << gens.size();
  e.reserve(total);
  for (std::size_t mask = 0; mask < total; ++mask) {
    RatFunc p = RatFunc::one(ctx);
    for (std::size_t i = 0; i < gens.size(); ++i)
      if (mask & (std::size_t(1) << i)) p = p * gens[i];
    e.push_back(std::move(p));
  }
  return PfisterForm{gens, DiagonalForm{ctx, std::move(e)}};
}

inline PfisterForm make_pfister_with_ctx(const FieldCtxPtr& ctx, const std::vector<RatFunc>& gens) {
  if (gens.empty())
    return PfisterForm{{}, DiagonalForm{ctx, {RatFunc::one(ctx)}}};
  return make_pfister(gens);
}

// membership in Q(b) = { b(v,v) } u {0}: since b(v,v) = sum a_i v_i^2, this is
// exactly an F^2-linear solve.  For target 0 a nontrivial dependence vector is
// returned (Q always contains 0, but a witness must be a nonzero vector).
inline std::optional<std::vector<RatFunc>> q_value_membership(const DiagonalForm& b,
                                                              const RatFunc& target) {
  FrobeniusSystem sys = make_frobenius_system(b.entries);
  if (target.is_zero()) {
    auto ker = sys.kernel();
    if (ker.empty()) return std::nullopt;
    return ker.front();
  }
  auto w = sys.solve_target(target);
  if (!w) return std::nullopt;
  RatFunc check = RatFunc::zero(b.ctx);
  for (std::size_t i = 0; i < b.entries.size(); ++i) check += (*w)[i].square() * b.entries[i];
  if (check != target) throw InvariantViolation("q_value_membership: witness failed");
  return w;
}

struct IsotropyResult {
  bool anisotropic = false;
  std::optional<std::vector<RatFunc>> witness;  // nontrivial dependence when isotropic
};

// anisotropic iff the entries are F^2-linearly independent
inline IsotropyResult is_anisotropic(const DiagonalForm& b) {
  FrobeniusSystem sys = make_frobenius_system(b.entries);
  auto ker = sys.kernel();
  if (ker.empty()) return IsotropyResult{true, std::nullopt};
  return IsotropyResult{false, ker.front()};
}

// i-invariant of a Pfister form: n - log2(F^2-rank of the 2^n subset
// products).  Splitting off one <<1>> factor halves the rank and isotropy of
// a diagonal form is exactly F^2-dependence of its entries, so the rank
// determines the number of <<1>> factors; 0 iff the expansion is anisotropic.
inline std::size_t i_invariant(const PfisterForm& p) {
  FrobeniusSystem sys = make_frobenius_system(p.expansion.entries);
  const std::size_t r = sys.rank();
  std::size_t log2 = 0;
  while ((std::size_t(1) << log2) < r) ++log2;
  if ((std::size_t(1) << log2) != r)
    throw InvariantViolation("pfister expansion rank is not a power of two");
  return p.n() - log2;
}

// Pfister invariant of a totally decomposable algebra: one discriminant
// representative per quaternion factor.  Factors must carry orthogonal
// involutions.
inline PfisterForm pfister_invariant(const std::vector<Involution>& factor_involutions) {
  if (factor_involutions.empty()) throw Error("pfister_invariant: no factors");
  std::vector<RatFunc> gens;
  gens.reserve(factor_involutions.size());
  for (const auto& s : factor_involutions) {
    if (s.kind() == InvolKind::symplectic) throw SymplecticFactor();
    gens.push_back(quat_discriminant(s));
  }
  return make_pfister(gens);
}

// lifts the generators to F(sqrt(alpha)) and recomputes the i-invariant there
inline std::size_t i_after_sqrt_extension(const PfisterForm& p, const RatFunc& alpha) {
  const FieldCtxPtr k = extend_by_sqrt(p.expansion.ctx, alpha);
  std::vector<RatFunc> lifted;
  lifted.reserve(p.gens.size());
  for (const auto& g : p.gens) lifted.push_back(RatFunc::lift(k, g));
  return i_invariant(make_pfister_with_ctx(k, lifted));
}

}  // namespace invol2
