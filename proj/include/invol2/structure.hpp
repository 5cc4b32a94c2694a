#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "invol2/forms.hpp"

namespace invol2 {

// One tensor factor of a totally decomposable algebra with involution.
// Every factor carries a designated quaternion basis (1, u, v, w) with
// u, v symmetric: the native basis for quaternion factors, and
// (e11+e22, e11, e12+e21, e12) for (M2, t), i.e. M2 = [0,1) with the Alt unit
// scaled so that v^2 = 1.
struct Factor {
  enum class Type { quaternion, m2_transpose };
  Type type = Type::quaternion;
  AlgebraPtr alg;
  Involution invol;
  QuaternionDesc quat;
};

inline Factor make_quat_factor(const RatFunc& alpha, const RatFunc& beta, bool canonical_gamma = false) {
  QuaternionAlgebra q = make_quaternion(alpha, beta);
  Involution s = canonical_gamma ? make_canonical(q) : make_quat_orthogonal(q);
  return Factor{Factor::Type::quaternion, q.alg, std::move(s), std::move(q.desc)};
}

inline Factor make_m2t_factor(const FieldCtxPtr& ctx) {
  MatrixAlgebra m = make_matrix_algebra(ctx, 2);
  Involution t = make_transpose(m.alg);
  AlgElement one = m.alg->unit();
  AlgElement u = m.alg->basis_element(m.index(0, 0));
  AlgElement v = m.alg->basis_element(m.index(0, 1)) + m.alg->basis_element(m.index(1, 0));
  AlgElement w = u * v;
  QuaternionDesc d{RatFunc::zero(ctx), RatFunc::one(ctx), one, u, v, w};
  if (u.square() != u || v.square() != m.alg->unit() || v * u != w + v)
    throw InvariantViolation("M2 quaternion basis relations failed");
  return Factor{Factor::Type::m2_transpose, m.alg, std::move(t), std::move(d)};
}

// A subalgebra given by generators, its canonical span basis, the subset
// products of the generators (the natural basis of an inseparable
// subalgebra), and the five inseparability flags.
struct InsepFlags {
  bool dim_ok = false;            // dim S = 2^n
  bool self_centralizing = false; // C_A(S) = S
  bool in_sym_plus = false;       // S inside Sym(A, sigma)^+
  bool in_alt_plus_F = false;     // S inside Alt(A, sigma)^+ + F
  bool gen_count_ok = false;      // at most n generators
  bool verdict() const {
    return dim_ok && self_centralizing && in_sym_plus && in_alt_plus_F && gen_count_ok;
  }
};

struct SubalgebraDesc {
  std::vector<AlgElement> generators;
  std::vector<AlgElement> basis;          // canonical RREF basis, contains 1
  std::vector<AlgElement> mask_products;  // products of generator subsets, mask order
  InsepFlags flags;
};

inline bool same_span(const std::vector<AlgElement>& a, const std::vector<AlgElement>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;  // both canonical RREF bases
  return true;
}

class DecomposedAlgebra {
 public:
  FieldCtxPtr ctx;
  std::vector<Factor> factors;
  AlgebraPtr A;
  Involution sigma;
  PfisterForm pf;                    // canonical discriminant representatives
  std::vector<RatFunc> disc_values;  // literal v_i^2 per factor
  DiagonalForm value_form;           // subset products of disc_values
  std::vector<AlgElement> U, V, W;   // embedded designated elements per factor

  std::size_t n() const { return factors.size(); }

  AlgElement embed(std::size_t i, const AlgElement& x) const {
    if (i >= factors.size()) throw Error("factor index out of range");
    if (x.algebra().get() != factors[i].alg.get()) throw Error("element not in factor " + std::to_string(i));
    std::vector<RatFunc> acc{RatFunc::one(ctx)};
    for (std::size_t j = 0; j < factors.size(); ++j) {
      const std::vector<RatFunc> cj =
          (j == i) ? x.coords() : factors[j].alg->unit().coords();
      std::vector<RatFunc> next(acc.size() * cj.size(), RatFunc::zero(ctx));
      for (std::size_t p = 0; p < acc.size(); ++p) {
        if (acc[p].is_zero()) continue;
        for (std::size_t q = 0; q < cj.size(); ++q)
          if (!cj[q].is_zero()) next[p * cj.size() + q] = acc[p] * cj[q];
      }
      acc = std::move(next);
    }
    return A->element(std::move(acc));
  }

  std::size_t i_invariant_value() const { return i_invariant(pf); }

  const SubalgebraDesc& default_insep() const;

  struct Cache {
    std::once_flag once_s;
    std::shared_ptr<const SubalgebraDesc> s;
  };
  std::shared_ptr<Cache> cache = std::make_shared<Cache>();
};

struct FactorSpec {
  enum class Kind { quaternion, m2t };
  Kind kind = Kind::quaternion;
  RatFunc alpha, beta;          // quaternion only
  bool canonical_gamma = false; // "gamma" involution; rejected for decomposed use
};

inline DecomposedAlgebra build_decomposed(const FieldCtxPtr& ctx, const std::vector<FactorSpec>& specs) {
  DecomposedAlgebra d;
  d.ctx = ctx;
  for (const auto& fs : specs) {
    if (fs.kind == FactorSpec::Kind::m2t)
      d.factors.push_back(make_m2t_factor(ctx));
    else
      d.factors.push_back(make_quat_factor(fs.alpha, fs.beta, fs.canonical_gamma));
  }
  if (d.factors.empty()) throw Error("decomposed algebra needs at least one factor");
  // orthogonality of every factor involution is part of the invariant
  std::vector<Involution> invs;
  for (const auto& f : d.factors) invs.push_back(f.invol);
  d.pf = pfister_invariant(invs);  // throws SymplecticFactor otherwise
  d.A = d.factors.front().alg;
  d.sigma = d.factors.front().invol;
  for (std::size_t i = 1; i < d.factors.size(); ++i) {
    AlgebraPtr next = tensor(d.A, d.factors[i].alg);
    d.sigma = tensor_involution(next, d.sigma, d.factors[i].invol);
    d.A = std::move(next);
  }
  for (std::size_t i = 0; i < d.factors.size(); ++i) {
    d.U.push_back(d.embed(i, d.factors[i].quat.u));
    d.V.push_back(d.embed(i, d.factors[i].quat.v));
    d.W.push_back(d.embed(i, d.factors[i].quat.w));
    auto sq = is_scalar(d.V.back().square());
    if (!sq) throw InvariantViolation("factor v is not square-central after embedding");
    d.disc_values.push_back(*sq);
  }
  {
    std::vector<RatFunc> e;
    const std::size_t total = std::size_t(1) << d.factors.size();
    for (std::size_t mask = 0; mask < total; ++mask) {
      RatFunc p = RatFunc::one(ctx);
      for (std::size_t i = 0; i < d.factors.size(); ++i)
        if (mask & (std::size_t(1) << i)) p = p * d.disc_values[i];
      e.push_back(std::move(p));
    }
    d.value_form = DiagonalForm{ctx, std::move(e)};
  }
  return d;
}

// products of the given commuting generators over subset masks
inline std::vector<AlgElement> subset_products(const AlgebraPtr& A, const std::vector<AlgElement>& gens) {
  std::vector<AlgElement> out;
  out.reserve(std::size_t(1) << gens.size());
  out.push_back(A->unit());
  for (std::size_t mask = 1; mask < (std::size_t(1) << gens.size()); ++mask) {
    std::size_t low = 0;
    while (!(mask & (std::size_t(1) << low))) ++low;
    out.push_back(out[mask & ~(std::size_t(1) << low)] * gens[low]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Inseparable subalgebras

inline InsepFlags check_inseparable(const DecomposedAlgebra& d, const SubalgebraDesc& s) {
  if (s.basis.empty()) throw NotSubalgebra("empty basis");
  for (const auto& b : s.basis)
    if (b.algebra().get() != d.A.get()) throw NotSubalgebra("basis element outside the algebra");
  if (!in_span(s.basis, d.A->unit())) throw NotSubalgebra("1 not in the span");
  for (std::size_t i = 0; i < s.basis.size(); ++i)
    for (std::size_t j = 0; j < s.basis.size(); ++j)
      if (!in_span(s.basis, s.basis[i] * s.basis[j]))
        throw NotSubalgebra("span not closed under multiplication");

  InsepFlags f;
  f.dim_ok = s.basis.size() == (std::size_t(1) << d.n());
  f.gen_count_ok = !s.generators.empty() && s.generators.size() <= d.n();

  f.in_sym_plus = true;
  for (std::size_t i = 0; i < s.basis.size() && f.in_sym_plus; ++i) {
    if (!sym_plus_member(s.basis[i], d.sigma).yes) f.in_sym_plus = false;
    for (std::size_t j = i + 1; j < s.basis.size() && f.in_sym_plus; ++j)
      if (s.basis[i] * s.basis[j] != s.basis[j] * s.basis[i]) f.in_sym_plus = false;
  }

  // C_A(gens) = C_A(S); requiring dim 2^n and containment in S gives equality
  const std::vector<AlgElement>& gens = s.generators.empty() ? s.basis : s.generators;
  std::vector<AlgElement> c = centralizer(gens);
  f.self_centralizing = c.size() == s.basis.size();
  if (f.self_centralizing)
    for (const auto& z : c)
      if (!in_span(s.basis, z)) {
        f.self_centralizing = false;
        break;
      }

  f.in_alt_plus_F = true;
  for (const auto& b : s.basis)
    if (!alt_plus_F_member(b, d.sigma)) {
      f.in_alt_plus_F = false;
      break;
    }
  return f;
}

// F[v_1, ..., v_n] for one chosen v per factor; the default choice is the
// designated v of each quaternion basis
inline SubalgebraDesc build_inseparable(const DecomposedAlgebra& d,
                                        const std::vector<AlgElement>& choices) {
  if (choices.size() != d.n()) throw BadChoice("need one choice per factor");
  std::vector<AlgElement> gens;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    const Factor& f = d.factors[i];
    if (choices[i].algebra().get() != f.alg.get())
      throw BadChoice("choice " + std::to_string(i) + " not in its factor");
    SquareCentralVerdict v = sym_plus_member(choices[i], f.invol);
    if (!v.yes) throw BadChoice("choice " + std::to_string(i) + " not in Sym^+: " + v.reason);
    if (v.square->is_zero()) throw BadChoice("choice " + std::to_string(i) + " is not a unit");
    if (is_scalar(choices[i])) throw BadChoice("choice " + std::to_string(i) + " is scalar");
    gens.push_back(d.embed(i, choices[i]));
  }
  GeneratedSubalgebra g = generated_subalgebra(gens);
  SubalgebraDesc s{gens, g.basis, subset_products(d.A, gens), {}};
  s.flags = check_inseparable(d, s);
  if (!s.flags.verdict()) throw InvariantViolation("build_inseparable: flags failed");
  return s;
}

inline std::vector<AlgElement> default_choices(const DecomposedAlgebra& d) {
  std::vector<AlgElement> c;
  for (const auto& f : d.factors) c.push_back(f.quat.v);
  return c;
}

inline const SubalgebraDesc& DecomposedAlgebra::default_insep() const {
  std::call_once(cache->once_s, [&] {
    cache->s = std::make_shared<const SubalgebraDesc>(build_inseparable(*this, default_choices(*this)));
  });
  return *cache->s;
}

namespace detail {
// the two inseparable subalgebras of the proof, built on factors (j0, j1, jm)
// with jm the (M2, t) slot; any other factor contributes its default v
inline std::pair<SubalgebraDesc, SubalgebraDesc> insep_pair_core(const DecomposedAlgebra& d,
                                                                 std::size_t j0, std::size_t j1,
                                                                 std::size_t jm) {
  const AlgElement& v3 = d.V[jm];
  auto v3sq = is_scalar(v3.square());
  if (!v3sq || !v3sq->is_one())
    throw InvariantViolation("(M2,t) factor v is not normalized to v^2 = 1");
  std::vector<AlgElement> gens1, gens2;
  for (std::size_t k = 0; k < d.n(); ++k)
    if (k != j0 && k != j1 && k != jm) {
      gens1.push_back(d.V[k]);
      gens2.push_back(d.V[k]);
    }
  gens1.push_back(d.V[j0]);
  gens1.push_back(d.V[j1]);
  gens1.push_back(v3);

  const AlgElement p1 = d.U[j1] * d.V[j0];
  const AlgElement v1p = p1 + (p1 + d.V[j0]) * v3;
  const AlgElement p2 = d.U[j0] * d.V[j1];
  const AlgElement v2p = p2 + (p2 + d.V[j1]) * v3;
  for (const AlgElement* e : {&v1p, &v2p})
    if (!sym_plus_member(*e, d.sigma).yes)
      throw InvariantViolation("constructed generator left Sym^+");
  gens2.push_back(v1p);
  gens2.push_back(v2p);
  gens2.push_back(v3);

  auto mkdesc = [&](std::vector<AlgElement> gens) {
    GeneratedSubalgebra g = generated_subalgebra(gens);
    SubalgebraDesc s{gens, g.basis, subset_products(d.A, gens), {}};
    s.flags = check_inseparable(d, s);
    if (!s.flags.verdict()) throw InvariantViolation("constructed subalgebra is not inseparable");
    return s;
  };
  SubalgebraDesc s1 = mkdesc(std::move(gens1));
  SubalgebraDesc s2 = mkdesc(std::move(gens2));
  if (same_span(s1.basis, s2.basis))
    throw InvariantViolation("the two constructed subalgebras coincide");
  return {std::move(s1), std::move(s2)};
}

inline std::size_t find_m2t(const DecomposedAlgebra& d) {
  for (std::size_t i = 0; i < d.n(); ++i)
    if (d.factors[i].type == Factor::Type::m2_transpose) return i;
  throw WrongShape("no (M2,t) factor");
}
}  // namespace detail

// degree 8, one (M2,t) factor: two distinct inseparable subalgebras
inline std::pair<SubalgebraDesc, SubalgebraDesc> lemma3_pair(const DecomposedAlgebra& d) {
  if (d.n() != 3) throw WrongShape("lemma3_pair needs exactly three factors");
  const std::size_t jm = detail::find_m2t(d);
  std::size_t j0 = 3, j1 = 3;
  for (std::size_t k = 0; k < 3; ++k) {
    if (k == jm) continue;
    if (j0 == 3)
      j0 = k;
    else
      j1 = k;
  }
  return detail::insep_pair_core(d, j0, j1, jm);
}

// degree >= 8 isotropic: extend the degree-8 pair by a default inseparable
// subalgebra on the remaining factors
inline std::pair<SubalgebraDesc, SubalgebraDesc> nonuniqueness_extend(const DecomposedAlgebra& d) {
  if (d.n() < 3) throw WrongShape("need degree >= 8");
  const std::size_t jm = detail::find_m2t(d);
  std::size_t j0 = d.n(), j1 = d.n();
  for (std::size_t k = 0; k < d.n(); ++k) {
    if (k == jm) continue;
    if (j0 == d.n()) {
      j0 = k;
    } else if (j1 == d.n()) {
      j1 = k;
      break;
    }
  }
  return detail::insep_pair_core(d, j0, j1, jm);
}

// ---------------------------------------------------------------------------
// Iteration lemmas and isotropy

struct PosResult {
  std::size_t k = 0;
  AlgElement power;  // (xy)^k, in Sym^+ and commuting with x
};

inline std::size_t default_iteration_cap(const DecomposedAlgebra& d) { return 2 * d.A->dim() * d.A->dim(); }

// minimal k <= cap with (xy)^k in Sym(A, sigma)^+; also checks the addendum
// (xy)^k x = x (xy)^k
inline PosResult pos_iterate(const DecomposedAlgebra& d, const AlgElement& x, const AlgElement& y,
                             const SubalgebraDesc& s, std::size_t cap = 0) {
  if (cap == 0) cap = default_iteration_cap(d);
  SquareCentralVerdict xv = sym_plus_member(x, d.sigma);
  if (!xv.yes || xv.square->is_zero()) throw BadChoice("x must be a unit in Sym^+");
  if (!in_span(s.basis, y)) throw BadChoice("y must lie in S");
  auto ysq = is_scalar(y.square());
  if (!ysq || ysq->is_zero()) throw BadChoice("y must be a unit of S");

  const AlgElement xy = x * y;
  AlgElement z = xy;
  for (std::size_t k = 1; k <= cap; ++k) {
    if (d.sigma.fixes(z) && is_scalar(z.square())) {
      if (z * x != x * z) throw InvariantViolation("(xy)^k does not commute with x");
      return PosResult{k, z};
    }
    z = z * xy;
  }
  throw IterationCapExceeded("no k <= " + std::to_string(cap) + " with (xy)^k symmetric square-central");
}

// y in S \ F with y^2 = 1, via the F^2-linear system over the squares of the
// generator subset products; exists iff the involution is isotropic
inline std::optional<AlgElement> square_one_element(const DecomposedAlgebra& d) {
  const SubalgebraDesc& s = d.default_insep();
  FrobeniusSystem sys = make_frobenius_system(d.value_form.entries);
  auto ker = sys.kernel();
  if (ker.empty()) return std::nullopt;
  auto part = sys.solve_target(RatFunc::one(d.ctx));
  if (!part) throw InvariantViolation("1 must be represented by the value form");
  auto combine = [&](const std::vector<RatFunc>& c) {
    AlgElement e = d.A->zero();
    for (std::size_t i = 0; i < c.size(); ++i)
      if (!c[i].is_zero()) e += c[i] * s.mask_products[i];
    return e;
  };
  AlgElement y = combine(*part);
  if (is_scalar(y)) y += combine(ker.front());
  if (is_scalar(y)) throw InvariantViolation("square-one element stayed scalar");
  if (y.square() != d.A->unit()) throw InvariantViolation("y^2 != 1");
  return y;
}

struct MetResult {
  AlgElement y;       // y in S \ F, y^2 = 1
  std::size_t r = 0;  // minimal r with (xy)^r in Sym^+
  AlgElement z;       // (xy)^r + x^r: nonzero, in C_A(x), sigma(z) z = 0
};

inline MetResult met_isotropy_vector(const DecomposedAlgebra& d, const AlgElement& x,
                                     std::size_t cap = 0) {
  if (cap == 0) cap = default_iteration_cap(d);
  if (d.i_invariant_value() == 0) throw NotIsotropic();
  SquareCentralVerdict xv = sym_plus_member(x, d.sigma);
  if (!xv.yes || xv.square->is_zero()) throw BadChoice("x must be a unit in Sym^+");
  if (is_square(*xv.square)) throw SquareInput();
  auto yo = square_one_element(d);
  if (!yo) throw NotIsotropic();
  const AlgElement y = *yo;

  const AlgElement xy = x * y;
  AlgElement z = xy;
  std::size_t r = 0;
  for (std::size_t k = 1; k <= cap; ++k) {
    if (d.sigma.fixes(z) && is_scalar(z.square())) {
      r = k;
      break;
    }
    z = z * xy;
  }
  if (r == 0) throw IterationCapExceeded("no r <= " + std::to_string(cap));
  const AlgElement xr = x.pow(r);
  if (z == xr) throw InvariantViolation("(xy)^r = x^r contradicts minimality");
  AlgElement out = z + xr;
  if (out.is_zero()) throw InvariantViolation("z vanished");
  if (out * x != x * out) throw InvariantViolation("z does not centralize x");
  if (!(d.sigma.apply(out) * out).is_zero()) throw InvariantViolation("sigma(z) z != 0");
  return MetResult{y, r, std::move(out)};
}

// nonzero x with sigma(x) x = 0, present iff the Pfister invariant is isotropic
inline std::optional<AlgElement> isotropy_witness(const DecomposedAlgebra& d) {
  if (d.i_invariant_value() == 0) return std::nullopt;
  auto y = square_one_element(d);
  if (!y) throw InvariantViolation("isotropic but no square-one element");
  AlgElement x = d.A->unit() + *y;
  if (x.is_zero()) throw InvariantViolation("witness vanished");
  if (!(d.sigma.apply(x) * x).is_zero()) throw InvariantViolation("sigma(x) x != 0");
  return x;
}

// ---------------------------------------------------------------------------
// Representation

struct RepresentsResult {
  bool yes = false;
  std::optional<AlgElement> witness;  // x in S with x^2 = alpha, sigma(x) = x
};

inline RepresentsResult represents(const DecomposedAlgebra& d, const RatFunc& alpha) {
  auto w = q_value_membership(d.value_form, alpha);
  if (!w) return RepresentsResult{false, std::nullopt};
  const SubalgebraDesc& s = d.default_insep();
  AlgElement x = d.A->zero();
  for (std::size_t i = 0; i < w->size(); ++i)
    if (!(*w)[i].is_zero()) x += (*w)[i] * s.mask_products[i];
  if (x.is_zero()) throw InvariantViolation("represents: zero witness");
  if (!d.sigma.fixes(x)) throw InvariantViolation("represents: witness not symmetric");
  if (x.square() != d.A->scalar(alpha)) throw InvariantViolation("represents: x^2 != alpha");
  return RepresentsResult{true, std::move(x)};
}

struct CorIaResult {
  std::size_t i_before = 0, i_after = 0;
};

// i-invariant before and after adjoining sqrt(x^2); the jump by one is asserted
inline CorIaResult cor_ia_check(const DecomposedAlgebra& d, const AlgElement& x) {
  SquareCentralVerdict xv = sym_plus_member(x, d.sigma);
  if (!xv.yes) throw BadChoice("x must be in Sym^+");
  if (is_square(*xv.square)) throw SquareInput();
  CorIaResult r;
  r.i_before = d.i_invariant_value();
  r.i_after = i_after_sqrt_extension(d.pf, *xv.square);
  if (r.i_after != r.i_before + 1)
    throw InvariantViolation("i-invariant did not increase by exactly one");
  if (r.i_before >= d.n())
    throw InvariantViolation("i-invariant must stay below the number of factors");
  return r;
}

// ---------------------------------------------------------------------------
// Quaternion subalgebra search

struct QuatEmbedResult {
  AlgElement u;                   // sigma-symmetric, u^2 + u scalar, ux + xu = x0
  std::vector<AlgElement> basis;  // (1, u, x0, u x0) with x0 the pure part of x
  RatFunc u_alpha;                // u^2 + u
  RatFunc x_square;               // x0^2
};

namespace detail {

// full verification of a candidate u for the pure part x0
inline std::optional<QuatEmbedResult> try_quat_candidate(const DecomposedAlgebra& d,
                                                         const AlgElement& x0, const AlgElement& u) {
  if (!d.sigma.fixes(u)) return std::nullopt;
  if (u * x0 + x0 * u != x0) return std::nullopt;
  auto ua = is_scalar(u.square() + u);
  if (!ua) return std::nullopt;
  auto xs = is_scalar(x0.square());
  if (!xs) return std::nullopt;
  std::vector<AlgElement> raw{d.A->unit(), u, x0, u * x0};
  std::vector<std::vector<RatFunc>> rows;
  for (const auto& e : raw) rows.push_back(e.coords());
  if (rank(Matrix::from_rows(d.ctx, rows)) != 4) return std::nullopt;
  // closure under multiplication and sigma, plus the quaternion relations
  for (const auto& a : raw)
    for (const auto& b : raw)
      if (!in_span(raw, a * b)) return std::nullopt;
  for (const auto& a : raw)
    if (!in_span(raw, d.sigma.apply(a))) return std::nullopt;
  if (x0 * u != u * x0 + x0) return std::nullopt;
  return QuatEmbedResult{u, std::move(raw), *ua, *xs};
}

}  // namespace detail

// Search for a sigma-stable quaternion subalgebra span{1, u, x, ux}
// containing x.  Deterministic candidates u = sum of designated factor u's
// first, then the affine solution family of { ux + xu = x, sigma(u) = u },
// then seeded randomized sampling of that family with low-degree
// coefficients.  Every candidate is fully verified before being returned;
// failure is reported as SearchExhausted, never silently.
inline QuatEmbedResult quat_subalgebra_containing(const DecomposedAlgebra& d, const AlgElement& x,
                                                  const SubalgebraDesc& s,
                                                  std::uint64_t seed = 0x5eed0001ULL,
                                                  std::size_t random_trials = 10000) {
  auto sc = in_span(s.basis, x);
  if (!sc) throw NotSubalgebra("x does not lie in S");
  auto xsq = is_scalar(x.square());
  if (!xsq) throw BadChoice("x^2 must be scalar");
  if (xsq->is_zero()) throw BadChoice("x must be a unit");
  if (is_square(*xsq)) throw SquareInput();

  // strip the scalar part; span{1,u,x0,u x0} contains x iff it contains x0
  AlgElement x0 = x;
  if (!s.mask_products.empty()) {
    if (auto mc = in_span(s.mask_products, x)) x0 = x + d.A->scalar((*mc)[0]);
  }
  if (auto direct = is_scalar(x0)) throw BadChoice("x is scalar");

  // wave 0: subsets of the designated factor u's
  for (std::size_t mask = 1; mask < (std::size_t(1) << d.n()); ++mask) {
    AlgElement cand = d.A->zero();
    for (std::size_t i = 0; i < d.n(); ++i)
      if (mask & (std::size_t(1) << i)) cand += d.U[i];
    if (auto r = detail::try_quat_candidate(d, x0, cand)) return *r;
  }

  // wave 1: affine family { u : ux0 + x0u = x0, sigma(u) = u }
  const std::size_t dim = d.A->dim();
  Matrix sys(d.ctx, 2 * dim, dim);
  {
    Matrix ad = left_mult_matrix(x0);
    Matrix rm = right_mult_matrix(x0);
    Matrix mid = d.sigma.minus_id_matrix();
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        sys.at(i, j) = ad.at(i, j) + rm.at(i, j);
        sys.at(dim + i, j) = mid.at(i, j);
      }
  }
  std::vector<RatFunc> rhs(2 * dim, RatFunc::zero(d.ctx));
  for (std::size_t i = 0; i < dim; ++i) rhs[i] = x0.coord(i);
  auto part = solve(sys, rhs);
  if (part) {
    AlgElement u0 = d.A->element(*part);
    auto ker = kernel_basis(sys);
    std::vector<AlgElement> dirs;
    for (auto& v : ker) dirs.push_back(d.A->element(std::move(v)));
    if (auto r = detail::try_quat_candidate(d, x0, u0)) return *r;
    for (const auto& n1 : dirs)
      if (auto r = detail::try_quat_candidate(d, x0, u0 + n1)) return *r;
    for (std::size_t a = 0; a < dirs.size(); ++a)
      for (std::size_t b = a + 1; b < dirs.size(); ++b)
        if (auto r = detail::try_quat_candidate(d, x0, u0 + dirs[a] + dirs[b])) return *r;

    // wave 2: randomized members of the family, coefficients of degree <= 1
    Rng rng(seed);
    for (std::size_t t = 0; t < random_trials; ++t) {
      AlgElement cand = u0;
      for (const auto& dir : dirs)
        if (rng.bit()) cand += random_element(d.ctx, rng, 1, true) * dir;
      if (auto r = detail::try_quat_candidate(d, x0, cand)) return *r;
    }
  }
  throw SearchExhausted("no sigma-stable quaternion subalgebra found for x");
}

// ---------------------------------------------------------------------------
// The isotropic counterexample element

struct CountWitness {
  AlgElement x;
  RatFunc square;  // x^2, equal to the square of the chosen Alt unit
};

// x in Sym^+ with x^2 a nonsquare and x outside Alt + F; the latter is the
// certified necessary condition for membership in any inseparable (hence any
// sigma-stable quaternion) subalgebra
inline CountWitness count_witness(const DecomposedAlgebra& d) {
  if (d.n() < 3) throw WrongShape("need degree >= 8");
  const std::size_t jm = detail::find_m2t(d);
  const std::size_t i_val = d.i_invariant_value();
  if (i_val == 0) throw WrongShape("involution is anisotropic");
  if (i_val >= d.n()) throw WrongShape("transpose type is excluded");
  std::size_t i0 = d.n();
  for (std::size_t k = 0; k < d.n(); ++k)
    if (!is_square(d.disc_values[k])) {
      i0 = k;
      break;
    }
  if (i0 == d.n()) throw WrongShape("no factor with nontrivial discriminant");
  std::size_t i1 = d.n();
  for (std::size_t k = 0; k < d.n(); ++k)
    if (k != i0 && k != jm) {
      i1 = k;
      break;
    }
  if (i1 == d.n()) throw WrongShape("no second factor available");

  const AlgElement& uu = d.V[i0];  // unit in Alt with a nonsquare square
  const AlgElement& w = d.U[i1];   // symmetric, outside Alt + F
  const AlgElement& v3 = d.V[jm];
  AlgElement x = w + (w + uu) * v3;  // the block element [[w, w+u],[w+u, w]]

  if (!d.sigma.fixes(x)) throw InvariantViolation("count witness not symmetric");
  auto sq = is_scalar(x.square());
  if (!sq) throw InvariantViolation("count witness square not scalar");
  if (*sq != d.disc_values[i0]) throw InvariantViolation("x^2 != u^2");
  if (is_square(*sq)) throw InvariantViolation("x^2 is a square");
  if (alt_plus_F_member(x, d.sigma)) throw InvariantViolation("count witness lies in Alt + F");
  return CountWitness{std::move(x), *sq};
}

// ---------------------------------------------------------------------------
// The 256-dimensional isotropic example (partial: computable claims only)

struct Exm1Report {
  FieldCtxPtr ctx;
  AlgebraPtr B;
  Involution rho;
  AlgebraPtr Qprime;
  Involution tau;
  AlgebraPtr A;
  Involution sigma;
  AlgElement one_v;  // 1 (x) v
  RatFunc alpha;
  std::vector<std::string> verified;
  std::vector<std::string> unverified;
};

inline Exm1Report exm1_partial(int degree_budget = 64) {
  Exm1Report r;
  r.ctx = FieldCtx::rational({"t", "X", "Y", "Z"}, degree_budget);
  const RatFunc t = RatFunc::var(r.ctx, 0), X = RatFunc::var(r.ctx, 1), Y = RatFunc::var(r.ctx, 2),
                Z = RatFunc::var(r.ctx, 3);
  r.alpha = t;
  if (is_square(r.alpha)) throw InvariantViolation("alpha must be a nonsquare");
  r.verified.push_back("alpha = t is not a square");

  QuaternionAlgebra q = make_quaternion(X, Y);
  // s = v is gamma-symmetric with s^2 = Y
  const AlgElement s_elem = q.desc.v;
  HermitianAdjoint h = make_adjoint_hermitian(q, {q.alg->unit(), q.alg->scalar(Z), s_elem, s_elem});
  r.B = h.alg;
  r.rho = h.invol;
  r.verified.push_back("adjoint involution contract on the 64-dimensional hermitian component");
  if (r.rho.kind() != InvolKind::orthogonal) throw InvariantViolation("rho must be orthogonal");
  r.verified.push_back("rho is orthogonal");

  QuaternionAlgebra qp = make_quaternion(X, r.alpha);
  r.Qprime = qp.alg;
  r.tau = make_quat_orthogonal(qp);
  r.verified.push_back("tau is orthogonal");
  if (r.tau.apply(qp.desc.w) + qp.desc.w != qp.desc.v)
    throw InvariantViolation("v != tau(uv) - uv");
  r.verified.push_back("v = tau(uv) - uv lies in Alt(Q', tau)");

  r.A = tensor(r.B, r.Qprime);
  r.sigma = tensor_involution(r.A, r.rho, r.tau);
  r.verified.push_back("involution contract on the 256-dimensional tensor product");
  if (r.sigma.kind() != InvolKind::orthogonal) throw InvariantViolation("sigma must be orthogonal");
  r.verified.push_back("sigma is orthogonal");

  r.one_v = tensor_elem(r.A, r.B->unit(), qp.desc.v);
  // Alt membership via the explicit witness 1 (x) w
  AlgElement wit = tensor_elem(r.A, r.B->unit(), qp.desc.w);
  if (r.sigma.apply(wit) + wit != r.one_v)
    throw InvariantViolation("1 (x) v is not an alternating image");
  auto sq = is_scalar(r.one_v.square());
  if (!sq || *sq != r.alpha) throw InvariantViolation("(1 (x) v)^2 != alpha");
  r.verified.push_back("1 (x) v lies in Alt(A, sigma)^+ with square alpha");

  r.unverified.push_back("total decomposability of (A, sigma) and indecomposability of the hermitian component over extensions (not decided algorithmically)");
  r.unverified.push_back("the quaternion component being a division algebra (not decided algorithmically)");
  return r;
}

}  // namespace invol2
