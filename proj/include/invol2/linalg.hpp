#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "invol2/field.hpp"

namespace invol2 {

class Matrix {
 public:
  Matrix(FieldCtxPtr ctx, std::size_t rows, std::size_t cols)
      : ctx_(std::move(ctx)), rows_(rows), cols_(cols), e_(rows * cols, RatFunc::zero(ctx_)) {}

  static Matrix from_rows(const FieldCtxPtr& ctx, const std::vector<std::vector<RatFunc>>& rows) {
    std::size_t nc = rows.empty() ? 0 : rows.front().size();
    Matrix m(ctx, rows.size(), nc);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != nc) throw Error("ragged rows");
      for (std::size_t j = 0; j < nc; ++j) m.at(i, j) = rows[i][j];
    }
    return m;
  }

  static Matrix identity(const FieldCtxPtr& ctx, std::size_t n) {
    Matrix m(ctx, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = RatFunc::one(ctx);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const FieldCtxPtr& ctx() const { return ctx_; }

  RatFunc& at(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  const RatFunc& at(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

  std::vector<RatFunc> column(std::size_t j) const {
    std::vector<RatFunc> c;
    c.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c.push_back(at(i, j));
    return c;
  }

  std::vector<RatFunc> apply(const std::vector<RatFunc>& x) const {
    if (x.size() != cols_) throw Error("matrix-vector size mismatch");
    std::vector<RatFunc> y(rows_, RatFunc::zero(ctx_));
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        if (!at(i, j).is_zero() && !x[j].is_zero()) y[i] += at(i, j) * x[j];
    return y;
  }

 private:
  FieldCtxPtr ctx_;
  std::size_t rows_, cols_;
  std::vector<RatFunc> e_;
};

struct Echelon {
  Matrix rref;
  std::vector<std::size_t> pivots;  // pivot column of each echelon row
  std::size_t rank() const { return pivots.size(); }
};

// Fraction-free (Bareiss-style) forward elimination with exact division,
// then normalization to reduced row echelon form.  Pivot choice: the nonzero
// candidate of lowest total degree, lowest row index on ties; this keeps
// intermediate entries small and is deterministic.
inline Echelon echelon_form(Matrix m) {
  const std::size_t R = m.rows(), C = m.cols();
  const FieldCtxPtr& ctx = m.ctx();
  std::vector<std::size_t> pivots;
  RatFunc prev = RatFunc::one(ctx);
  std::size_t r = 0;
  for (std::size_t c = 0; c < C && r < R; ++c) {
    std::size_t best = R;
    int best_deg = 0;
    for (std::size_t i = r; i < R; ++i) {
      const RatFunc& v = m.at(i, c);
      if (v.is_zero()) continue;
      int d = v.pivot_degree();
      if (best == R || d < best_deg) {
        best = i;
        best_deg = d;
      }
    }
    if (best == R) continue;
    if (best != r)
      for (std::size_t j = 0; j < C; ++j) std::swap(m.at(r, j), m.at(best, j));
    const RatFunc pivot = m.at(r, c);
    for (std::size_t i = r + 1; i < R; ++i) {
      const RatFunc factor = m.at(i, c);
      if (factor.is_zero()) continue;  // leaving the row unscaled is a legal row operation
      for (std::size_t j = c + 1; j < C; ++j) {
        const RatFunc& a = m.at(i, j);
        const RatFunc& b = m.at(r, j);
        if (a.is_zero() && b.is_zero()) continue;
        m.at(i, j) = (a * pivot + factor * b) / prev;
      }
      m.at(i, c) = RatFunc::zero(ctx);
    }
    prev = pivot;
    pivots.push_back(c);
    ++r;
  }
  // normalize pivots to 1 and eliminate above
  for (std::size_t k = pivots.size(); k-- > 0;) {
    const std::size_t pc = pivots[k];
    const RatFunc inv = m.at(k, pc).inv();
    for (std::size_t j = pc; j < C; ++j)
      if (!m.at(k, j).is_zero()) m.at(k, j) = m.at(k, j) * inv;
    for (std::size_t i = 0; i < k; ++i) {
      const RatFunc f = m.at(i, pc);
      if (f.is_zero()) continue;
      for (std::size_t j = pc; j < C; ++j)
        if (!m.at(k, j).is_zero()) m.at(i, j) += f * m.at(k, j);
    }
  }
  return Echelon{std::move(m), std::move(pivots)};
}

inline std::size_t rank(const Matrix& a) { return echelon_form(a).rank(); }

// One exact solution of A x = b, or nullopt; the result is re-substituted.
inline std::optional<std::vector<RatFunc>> solve(const Matrix& a, const std::vector<RatFunc>& b) {
  if (b.size() != a.rows()) throw Error("solve: size mismatch");
  const FieldCtxPtr& ctx = a.ctx();
  Matrix aug(ctx, a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug.at(i, j) = a.at(i, j);
    aug.at(i, a.cols()) = b[i];
  }
  Echelon e = echelon_form(std::move(aug));
  for (std::size_t p : e.pivots)
    if (p == a.cols()) return std::nullopt;  // inconsistent
  std::vector<RatFunc> x(a.cols(), RatFunc::zero(ctx));
  for (std::size_t k = 0; k < e.pivots.size(); ++k) x[e.pivots[k]] = e.rref.at(k, a.cols());
  std::vector<RatFunc> chk = a.apply(x);
  for (std::size_t i = 0; i < b.size(); ++i)
    if (chk[i] != b[i]) throw InvariantViolation("solve: re-substitution failed");
  return x;
}

// Exact basis of the null space; every vector is re-verified against A.
inline std::vector<std::vector<RatFunc>> kernel_basis(const Matrix& a) {
  const FieldCtxPtr& ctx = a.ctx();
  Echelon e = echelon_form(a);
  std::vector<bool> is_pivot(a.cols(), false);
  for (std::size_t p : e.pivots) is_pivot[p] = true;
  std::vector<std::vector<RatFunc>> basis;
  for (std::size_t f = 0; f < a.cols(); ++f) {
    if (is_pivot[f]) continue;
    std::vector<RatFunc> v(a.cols(), RatFunc::zero(ctx));
    v[f] = RatFunc::one(ctx);
    for (std::size_t k = 0; k < e.pivots.size(); ++k) v[e.pivots[k]] = e.rref.at(k, f);
    for (const RatFunc& y : a.apply(v))
      if (!y.is_zero()) throw InvariantViolation("kernel_basis: A*v != 0");
    basis.push_back(std::move(v));
  }
  return basis;
}

// Exact column-space basis: the pivot columns of A.
inline std::vector<std::vector<RatFunc>> image_basis(const Matrix& a) {
  Echelon e = echelon_form(a);
  std::vector<std::vector<RatFunc>> basis;
  basis.reserve(e.pivots.size());
  for (std::size_t p : e.pivots) basis.push_back(a.column(p));
  return basis;
}

// Canonical basis of the row space (the nonzero RREF rows); spans compare
// equal iff these coincide entrywise.
inline std::vector<std::vector<RatFunc>> row_space_basis(const Matrix& a) {
  Echelon e = echelon_form(a);
  std::vector<std::vector<RatFunc>> rows;
  rows.reserve(e.rank());
  for (std::size_t k = 0; k < e.rank(); ++k) {
    std::vector<RatFunc> r;
    r.reserve(a.cols());
    for (std::size_t j = 0; j < a.cols(); ++j) r.push_back(e.rref.at(k, j));
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace invol2
