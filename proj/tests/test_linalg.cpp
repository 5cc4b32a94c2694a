#include <catch2/catch_amalgamated.hpp>

#include "invol2/linalg.hpp"

using namespace invol2;

namespace {
Matrix from(const FieldCtxPtr& f, std::vector<std::vector<const char*>> rows) {
  std::vector<std::vector<RatFunc>> rr;
  for (auto& r : rows) {
    std::vector<RatFunc> row;
    for (auto* s : r) row.push_back(parse_ratfunc(f, s));
    rr.push_back(std::move(row));
  }
  return Matrix::from_rows(f, rr);
}
}  // namespace

TEST_CASE("solve") {
  auto F = FieldCtx::rational({"x", "y"});
  auto x = RatFunc::var(F, 0);
  SECTION("identity") {
    Matrix id = Matrix::identity(F, 3);
    std::vector<RatFunc> b{x, x * x, RatFunc::one(F)};
    REQUIRE(solve(id, b).value() == b);
  }
  SECTION("diagonal with division") {
    Matrix a = from(F, {{"x", "0"}, {"0", "x"}});
    auto s = solve(a, {x * x, x});
    REQUIRE(s.has_value());
    REQUIRE((*s)[0] == x);
    REQUIRE((*s)[1].is_one());
  }
  SECTION("inconsistent") {
    Matrix z(F, 1, 1);
    REQUIRE_FALSE(solve(z, {RatFunc::one(F)}).has_value());
  }
}

TEST_CASE("kernel_basis") {
  auto F = FieldCtx::rational({"x"});
  SECTION("zero matrix") { REQUIRE(kernel_basis(Matrix(F, 2, 2)).size() == 2); }
  SECTION("identity") { REQUIRE(kernel_basis(Matrix::identity(F, 3)).empty()); }
  SECTION("[[1,1]] over GF(2)(x)") {
    auto k = kernel_basis(from(F, {{"1", "1"}}));
    REQUIRE(k.size() == 1);
    REQUIRE(k[0][0].is_one());
    REQUIRE(k[0][1].is_one());
  }
}

TEST_CASE("image_basis") {
  auto F = FieldCtx::rational({"x"});
  SECTION("identity") { REQUIRE(image_basis(Matrix::identity(F, 4)).size() == 4); }
  SECTION("zero") { REQUIRE(image_basis(Matrix(F, 3, 3)).empty()); }
  SECTION("rank-1 with proportional columns") {
    REQUIRE(image_basis(from(F, {{"x", "x^2"}, {"1", "x"}})).size() == 1);
  }
}

TEST_CASE("rank-nullity and canonical row spaces on random matrices") {
  auto F = FieldCtx::rational({"x", "y"});
  Rng rng(21);
  for (int t = 0; t < 40; ++t) {
    const std::size_t r = 1 + rng.below(5), c = 1 + rng.below(5);
    Matrix m(F, r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        if (rng.bit()) m.at(i, j) = random_element(F, rng, 1);
    REQUIRE(rank(m) + kernel_basis(m).size() == c);

    // the canonical row-space basis is invariant under row shuffles and scalings
    Matrix m2(F, r, c);
    for (std::size_t i = 0; i < r; ++i) {
      RatFunc s = random_element(F, rng, 1, true);
      for (std::size_t j = 0; j < c; ++j) m2.at((i + 1) % r, j) = m.at(i, j) * s;
    }
    REQUIRE(row_space_basis(m) == row_space_basis(m2));
  }
}

TEST_CASE("solutions are exact over fraction entries") {
  auto F = FieldCtx::rational({"x", "y"});
  auto x = RatFunc::var(F, 0), y = RatFunc::var(F, 1);
  Matrix a = from(F, {{"x", "y", "1"}, {"1", "x*y", "0"}, {"0", "1", "x"}});
  std::vector<RatFunc> b{x / y, y, RatFunc::one(F) + x};
  auto s = solve(a, b);  // re-substitution happens inside solve
  REQUIRE(s.has_value());
}
