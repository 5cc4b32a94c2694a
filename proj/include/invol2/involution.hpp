#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "invol2/algebra.hpp"

namespace invol2 {

enum class InvolKind { orthogonal, symplectic };

// Involution of the first kind as a verified linear map: basis images are
// stored sparsely, the anti-automorphism contract (sigma(1) = 1,
// sigma^2 = id, sigma(e_i e_j) = sigma(e_j) sigma(e_i) on all basis pairs)
// is checked at construction.  kind / Sym / Alt are derived lazily and
// shared between copies; kind is re-derived from 1 in Alt, never stored
// independently of the map.
class Involution {
 public:
  Involution() = default;

  static Involution create(AlgebraPtr alg, std::vector<SparseVec> images) {
    Involution s;
    s.alg_ = std::move(alg);
    s.images_ = std::move(images);
    s.cache_ = std::make_shared<Cache>();
    if (s.images_.size() != s.alg_->dim()) throw Error("involution image count != dim");
    s.verify_contract_();
    return s;
  }

  const AlgebraPtr& algebra() const { return alg_; }
  const SparseVec& image_of_basis(std::size_t i) const { return images_[i]; }
  bool valid() const { return alg_ != nullptr; }

  AlgElement apply(const AlgElement& x) const {
    if (x.algebra().get() != alg_.get()) throw Error("involution applied to foreign element");
    std::vector<RatFunc> y(alg_->dim(), RatFunc::zero(alg_->ctx()));
    for (std::size_t j = 0; j < alg_->dim(); ++j) {
      if (x.coord(j).is_zero()) continue;
      for (const SparseTerm& t : images_[j]) y[t.idx] += x.coord(j) * t.c;
    }
    return alg_->element(std::move(y));
  }

  bool fixes(const AlgElement& x) const { return apply(x) == x; }

  // sigma - id as a dense matrix (columns indexed by basis)
  Matrix minus_id_matrix() const {
    Matrix m(alg_->ctx(), alg_->dim(), alg_->dim());
    for (std::size_t j = 0; j < alg_->dim(); ++j) {
      for (const SparseTerm& t : images_[j]) m.at(t.idx, j) += t.c;
      m.at(j, j) += RatFunc::one(alg_->ctx());
    }
    return m;
  }

  InvolKind kind() const {
    std::call_once(cache_->once_kind, [&] {
      auto w = solve(minus_id_matrix(), alg_->unit().coords());
      cache_->kind = w ? InvolKind::symplectic : InvolKind::orthogonal;
    });
    return cache_->kind;
  }

  // Sym = ker(sigma - id)
  const std::vector<AlgElement>& sym_basis() const {
    std::call_once(cache_->once_sym, [&] {
      for (auto& v : kernel_basis(minus_id_matrix())) cache_->sym.push_back(alg_->element(std::move(v)));
    });
    return cache_->sym;
  }

  // Alt = im(sigma - id); every basis vector is checked to be sigma-fixed
  // (Alt is contained in Sym in characteristic 2) and dim Sym + dim Alt = dim.
  const std::vector<AlgElement>& alt_basis() const {
    std::call_once(cache_->once_alt, [&] {
      for (auto& v : image_basis(minus_id_matrix())) cache_->alt.push_back(alg_->element(std::move(v)));
      for (const auto& a : cache_->alt)
        if (!fixes(a)) throw InvariantViolation("Alt element not symmetric");
      if (cache_->alt.size() + sym_basis().size() != alg_->dim())
        throw InvariantViolation("dim Sym + dim Alt != dim A");
    });
    return cache_->alt;
  }

  // witness y with sigma(y) - y = x, i.e. a proof that x lies in Alt
  std::optional<AlgElement> alt_witness(const AlgElement& x) const {
    auto y = solve(minus_id_matrix(), x.coords());
    if (!y) return std::nullopt;
    return alg_->element(std::move(*y));
  }

 private:
  struct Cache {
    std::once_flag once_kind, once_sym, once_alt;
    InvolKind kind = InvolKind::orthogonal;
    std::vector<AlgElement> sym, alt;
  };

  AlgebraPtr alg_;
  std::vector<SparseVec> images_;
  std::shared_ptr<Cache> cache_;

  void verify_contract_() const {
    const StructAlgebra& A = *alg_;
    if (apply(A.unit()) != A.unit()) throw InvariantViolation("involution: sigma(1) != 1");
    for (std::size_t i = 0; i < A.dim(); ++i) {
      SparseVec twice;
      for (const SparseTerm& t : images_[i])
        for (const SparseTerm& u : images_[t.idx]) sparse_add_term(twice, u.idx, t.c * u.c);
      if (twice.size() != 1 || twice[0].idx != i || !twice[0].c.is_one())
        throw InvariantViolation("involution: sigma^2 != id at basis " + std::to_string(i));
    }
    for (std::size_t i = 0; i < A.dim(); ++i)
      for (std::size_t j = 0; j < A.dim(); ++j) {
        SparseVec lhs;
        for (const SparseTerm& t : A.product(i, j))
          for (const SparseTerm& u : images_[t.idx]) sparse_add_term(lhs, u.idx, t.c * u.c);
        SparseVec rhs = detail::sparse_basis_product(A, images_[j], images_[i]);
        if (lhs.size() != rhs.size())
          throw InvariantViolation("involution: anti-multiplicativity failed");
        for (std::size_t p = 0; p < lhs.size(); ++p)
          if (lhs[p].idx != rhs[p].idx || lhs[p].c != rhs[p].c)
            throw InvariantViolation("involution: anti-multiplicativity failed");
      }
  }
};

// ---------------------------------------------------------------------------
// Constructors

// validates the matrix-unit law e_ij e_kl = delta_jk e_il on the given basis
inline std::size_t matrix_algebra_order(const AlgebraPtr& alg) {
  std::size_t n = 1;
  while (n * n < alg->dim()) ++n;
  if (n * n != alg->dim()) throw NotMatrixAlgebra();
  const RatFunc one = RatFunc::one(alg->ctx());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          const SparseVec& p = alg->product(i * n + j, k * n + l);
          if (j == k) {
            if (p.size() != 1 || p[0].idx != i * n + l || !p[0].c.is_one()) throw NotMatrixAlgebra();
          } else if (!p.empty()) {
            throw NotMatrixAlgebra();
          }
        }
  (void)one;
  return n;
}

// transpose involution t(e_ij) = e_ji on a full matrix algebra; orthogonal
// on this basis in characteristic 2 (1 has nonzero diagonal, Alt has none)
inline Involution make_transpose(const AlgebraPtr& alg) {
  const std::size_t n = matrix_algebra_order(alg);
  std::vector<SparseVec> im(alg->dim());
  const RatFunc one = RatFunc::one(alg->ctx());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      im[i * n + j] = {SparseTerm{static_cast<std::uint32_t>(j * n + i), one}};
  Involution t = Involution::create(alg, std::move(im));
  if (t.kind() != InvolKind::orthogonal) throw InvariantViolation("transpose must be orthogonal");
  return t;
}

// tau(u) = u, tau(v) = v on a quaternion basis; anti-multiplicativity forces
// tau(w) = w + v.  Orthogonal, with Alt = span{v}; both facts re-verified.
inline Involution make_quat_orthogonal(const QuaternionAlgebra& q) {
  const FieldCtxPtr& ctx = q.alg->ctx();
  const RatFunc one = RatFunc::one(ctx);
  std::vector<SparseVec> im(4);
  im[0] = {SparseTerm{0, one}};
  im[1] = {SparseTerm{1, one}};
  im[2] = {SparseTerm{2, one}};
  im[3] = {SparseTerm{2, one}, SparseTerm{3, one}};
  Involution s = Involution::create(q.alg, std::move(im));
  if (s.kind() != InvolKind::orthogonal) throw InvariantViolation("quaternion tau must be orthogonal");
  const auto& alt = s.alt_basis();
  if (alt.size() != 1 || !in_span(alt, q.desc.v) || !in_span({q.desc.v}, alt[0]))
    throw InvariantViolation("Alt(Q, tau) != span{v}");
  return s;
}

// canonical involution gamma(x) = x + Trd(x) (characteristic 2); symplectic,
// and gamma(x) x is scalar on every basis element
inline Involution make_canonical(const QuaternionAlgebra& q) {
  std::vector<SparseVec> im(4);
  for (std::uint32_t i = 0; i < 4; ++i) {
    AlgElement e = q.alg->basis_element(i);
    AlgElement img = e + q.alg->scalar(reduced_trace_quat(e, q.desc));
    SparseVec col;
    for (std::uint32_t k = 0; k < 4; ++k) sparse_add_term(col, k, img.coord(k));
    im[i] = std::move(col);
  }
  Involution s = Involution::create(q.alg, std::move(im));
  if (s.kind() != InvolKind::symplectic) throw InvariantViolation("canonical gamma must be symplectic");
  for (std::size_t i = 0; i < 4; ++i) {
    AlgElement e = q.alg->basis_element(i);
    if (!is_scalar(s.apply(e) * e)) throw InvariantViolation("gamma(x) x not scalar on basis");
  }
  return s;
}

struct AdjointAlgebra {
  MatrixAlgebra mat;
  Involution invol;
};

// adjoint of the diagonal form diag(entries) on M_n(F): sigma(X) = B^-1 X^t B,
// i.e. sigma(e_ij) = (b_i / b_j) e_ji
inline AdjointAlgebra make_adjoint_diagonal(const std::vector<RatFunc>& entries) {
  if (entries.empty()) throw Error("empty diagonal");
  const FieldCtxPtr ctx = entries.front().ctx();
  const std::size_t n = entries.size();
  for (const auto& b : entries)
    if (b.is_zero()) throw ZeroEntry();
  MatrixAlgebra m = make_matrix_algebra(ctx, n);
  std::vector<SparseVec> im(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      im[i * n + j] = SparseVec{SparseTerm{static_cast<std::uint32_t>(j * n + i), entries[i] / entries[j]}};
  Involution s = Involution::create(m.alg, std::move(im));
  return AdjointAlgebra{std::move(m), std::move(s)};
}

struct HermitianAdjoint {
  AlgebraPtr alg;       // M_n(F) (x) Q as a 4n^2-dimensional algebra
  MatrixAlgebra mat;    // the M_n factor
  Involution invol;     // sigma(X) = H^-1 gamma(X)^t H
  Involution gamma;     // canonical involution of the quaternion factor
};

// adjoint of the diagonal hermitian form <entries>_gamma on Q^n; each entry
// must be a gamma-symmetric unit of Q.  On the basis:
// sigma(e_ij (x) q) = e_ji (x) h_j^-1 gamma(q) h_i.
inline HermitianAdjoint make_adjoint_hermitian(const QuaternionAlgebra& q,
                                               const std::vector<AlgElement>& entries) {
  if (entries.empty()) throw Error("empty hermitian diagonal");
  Involution gamma = make_canonical(q);
  std::vector<AlgElement> inv_entries;
  for (const auto& h : entries) {
    if (h.algebra().get() != q.alg.get()) throw Error("hermitian entry outside Q");
    if (!gamma.fixes(h)) throw NonSymmetricEntry();
    UnitCheck uc = is_unit(h);
    if (!uc.unit) throw NonUnitEntry();
    inv_entries.push_back(*uc.inverse);
  }
  const std::size_t n = entries.size();
  MatrixAlgebra m = make_matrix_algebra(q.alg->ctx(), n);
  AlgebraPtr big = tensor(m.alg, q.alg);
  std::vector<SparseVec> im(big->dim());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < 4; ++k) {
        AlgElement qimg = inv_entries[j] * gamma.apply(q.alg->basis_element(k)) * entries[i];
        SparseVec col;
        for (std::size_t l = 0; l < 4; ++l)
          sparse_add_term(col, static_cast<std::uint32_t>((j * n + i) * 4 + l), qimg.coord(l));
        im[(i * n + j) * 4 + k] = std::move(col);
      }
  Involution s = Involution::create(big, std::move(im));
  return HermitianAdjoint{big, std::move(m), std::move(s), std::move(gamma)};
}

// (sigma1 (x) sigma2)(a (x) b) = sigma1(a) (x) sigma2(b) on the given tensor algebra
inline Involution tensor_involution(const AlgebraPtr& ab, const Involution& s1, const Involution& s2) {
  const std::size_t da = s1.algebra()->dim(), db = s2.algebra()->dim();
  if (ab->dim() != da * db) throw Error("tensor_involution: dimension mismatch");
  std::vector<SparseVec> im(ab->dim());
  for (std::size_t i = 0; i < da; ++i)
    for (std::size_t j = 0; j < db; ++j) {
      SparseVec col;
      for (const SparseTerm& ta : s1.image_of_basis(i))
        for (const SparseTerm& tb : s2.image_of_basis(j))
          sparse_add_term(col, static_cast<std::uint32_t>(ta.idx * db + tb.idx), ta.c * tb.c);
      im[i * db + j] = std::move(col);
    }
  return Involution::create(ab, std::move(im));
}

// ---------------------------------------------------------------------------
// Membership predicates

struct SquareCentralVerdict {
  bool yes = false;
  std::optional<RatFunc> square;  // x^2 when yes
  std::string reason;             // when no
};

// x in Sym(A, sigma)^+ : sigma(x) = x and x^2 scalar
inline SquareCentralVerdict sym_plus_member(const AlgElement& x, const Involution& s) {
  if (!s.fixes(x)) return {false, std::nullopt, "sigma(x) != x"};
  auto sq = is_scalar(x.square());
  if (!sq) return {false, std::nullopt, "x^2 is not scalar"};
  return {true, sq, ""};
}

// x in Alt(A, sigma)^+ : x in Alt and x^2 scalar
inline SquareCentralVerdict alt_plus_member(const AlgElement& x, const Involution& s) {
  if (!s.alt_witness(x)) return {false, std::nullopt, "x not in Alt"};
  auto sq = is_scalar(x.square());
  if (!sq) return {false, std::nullopt, "x^2 is not scalar"};
  return {true, sq, ""};
}

// lambda with x + lambda*1 in Alt(A, sigma), if it exists; absence certifies
// x outside Alt + F (a single solve over the enlarged column space)
inline std::optional<RatFunc> alt_plus_F_member(const AlgElement& x, const Involution& s) {
  const AlgebraPtr& A = s.algebra();
  const std::size_t d = A->dim();
  Matrix m(A->ctx(), d, d + 1);
  Matrix mid = s.minus_id_matrix();
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m.at(i, j) = mid.at(i, j);
  AlgElement one = A->unit();
  for (std::size_t i = 0; i < d; ++i) m.at(i, d) = one.coord(i);
  auto sol = solve(m, x.coords());
  if (!sol) return std::nullopt;
  return (*sol)[d];
}

// discriminant of an orthogonal involution on a quaternion algebra: the
// square class of v^2 for a unit v spanning Alt
inline RatFunc quat_discriminant(const Involution& s);

// best-effort canonical representative of f modulo nonzero squares: fold
// numerator and denominator, strip the square part of the monomial content
// and peel perfect-square polynomial factors (exponent parity per variable).
// Equality of square classes is always decided via is_square of a ratio,
// never via this representative.
inline RatFunc canonical_square_class(const RatFunc& f) {
  if (f.is_zero()) throw Error("square class of zero");
  if (f.ctx()->is_extension()) return f;  // only rendered, never compared
  gf2::Poly g = f.num() * f.den();
  gf2::Mono content = g.t.front();
  for (gf2::Mono m : g.t) content = gf2::mono_gcd(content, m);
  g = gf2::divexact(g, gf2::Poly::mono(content));
  gf2::Mono odd = 0;
  for (int v = 0; v < gf2::kMaxVars; ++v)
    if (gf2::mono_exp(content, v) % 2 == 1) odd = gf2::mono_mul(odd, gf2::mono_var(v));
  gf2::Poly root;
  while (!g.is_one() && g.is_square(&root)) g = root;
  RatFunc rep = RatFunc::from_poly(f.ctx(), gf2::Poly::mono(odd) * g);
  if (!is_square(rep / f)) throw InvariantViolation("square-class representative drifted");
  return rep;
}

inline RatFunc quat_discriminant(const Involution& s) {
  const AlgebraPtr& A = s.algebra();
  if (A->dim() != 4) throw AltNotLine("not a quaternion algebra (dim != 4)");
  if (s.kind() == InvolKind::symplectic) throw AltNotLine("symplectic involution");
  const auto& alt = s.alt_basis();
  if (alt.size() != 1) throw AltNotLine("Alt has dimension " + std::to_string(alt.size()));
  auto sq = is_scalar(alt[0].square());
  if (!sq || sq->is_zero()) throw AltNotLine("Alt spanning element is not a unit");
  return canonical_square_class(*sq);
}

}  // namespace invol2
