#include <catch2/catch_amalgamated.hpp>

#include "invol2/structure.hpp"

using namespace invol2;

namespace {

struct Deg4 {
  FieldCtxPtr F = FieldCtx::rational({"a", "b", "c", "d"});
  RatFunc a = RatFunc::var(F, 0), b = RatFunc::var(F, 1), c = RatFunc::var(F, 2),
          d = RatFunc::var(F, 3);
  DecomposedAlgebra D = build_decomposed(
      F, {FactorSpec{FactorSpec::Kind::quaternion, a, b, false},
          FactorSpec{FactorSpec::Kind::quaternion, c, d, false}});
};

struct Deg8Iso {
  FieldCtxPtr F = FieldCtx::rational({"a", "b", "c", "d"});
  RatFunc a = RatFunc::var(F, 0), b = RatFunc::var(F, 1), c = RatFunc::var(F, 2),
          d = RatFunc::var(F, 3);
  DecomposedAlgebra D = build_decomposed(
      F, {FactorSpec{FactorSpec::Kind::quaternion, a, b, false},
          FactorSpec{FactorSpec::Kind::quaternion, c, d, false},
          FactorSpec{FactorSpec::Kind::m2t, {}, {}, false}});
};

}  // namespace

TEST_CASE("decomposed algebra assembly") {
  Deg4 f;
  REQUIRE(f.D.A->dim() == 16);
  REQUIRE(f.D.sigma.kind() == InvolKind::orthogonal);
  REQUIRE(f.D.pf.gens.size() == 2);
  REQUIRE(f.D.pf.gens[0] == f.b);
  REQUIRE(f.D.pf.gens[1] == f.d);
  REQUIRE(f.D.i_invariant_value() == 0);
  SECTION("embedded designated elements commute across factors") {
    REQUIRE(f.D.U[0] * f.D.V[1] == f.D.V[1] * f.D.U[0]);
    REQUIRE(f.D.V[0] * f.D.V[1] == f.D.V[1] * f.D.V[0]);
  }
  SECTION("gamma factors are rejected as tensor factors") {
    REQUIRE_THROWS_AS(
        build_decomposed(f.F, {FactorSpec{FactorSpec::Kind::quaternion, f.a, f.b, true}}),
        SymplecticFactor);
  }
}

TEST_CASE("build_inseparable and check_inseparable") {
  Deg4 f;
  SECTION("default choices pass all five flags") {
    SubalgebraDesc s = build_inseparable(f.D, default_choices(f.D));
    REQUIRE(s.basis.size() == 4);
    REQUIRE(s.flags.dim_ok);
    REQUIRE(s.flags.self_centralizing);
    REQUIRE(s.flags.in_sym_plus);
    REQUIRE(s.flags.in_alt_plus_F);
    REQUIRE(s.flags.gen_count_ok);
  }
  SECTION("v + lambda spans the same subalgebra") {
    SubalgebraDesc s1 = build_inseparable(f.D, default_choices(f.D));
    auto ch = default_choices(f.D);
    ch[0] = ch[0] + f.D.factors[0].alg->unit();
    SubalgebraDesc s2 = build_inseparable(f.D, ch);
    REQUIRE(same_span(s1.basis, s2.basis));
  }
  SECTION("u is not a legal choice") {
    auto ch = default_choices(f.D);
    ch[0] = f.D.factors[0].quat.u;
    REQUIRE_THROWS_AS(build_inseparable(f.D, ch), BadChoice);
  }
  SECTION("scalars are not legal choices") {
    auto ch = default_choices(f.D);
    ch[1] = f.D.factors[1].alg->unit();
    REQUIRE_THROWS_AS(build_inseparable(f.D, ch), BadChoice);
  }
  SECTION("F[u1, v2] fails the Sym^+ flag") {
    auto g = generated_subalgebra({f.D.U[0], f.D.V[1]});
    SubalgebraDesc s{{f.D.U[0], f.D.V[1]}, g.basis, subset_products(f.D.A, {f.D.U[0], f.D.V[1]}), {}};
    s.flags = check_inseparable(f.D, s);
    REQUIRE_FALSE(s.flags.in_sym_plus);
    REQUIRE_FALSE(s.flags.verdict());
  }
  SECTION("F[1] fails on dimension") {
    auto g = generated_subalgebra({f.D.A->unit()});
    SubalgebraDesc s{{f.D.A->unit()}, g.basis, subset_products(f.D.A, {f.D.A->unit()}), {}};
    s.flags = check_inseparable(f.D, s);
    REQUIRE_FALSE(s.flags.dim_ok);
    REQUIRE_FALSE(s.flags.verdict());
  }
  SECTION("foreign elements are not a subalgebra") {
    Deg8Iso g;
    SubalgebraDesc s{{g.D.V[0]}, {g.D.V[0]}, {}, {}};
    REQUIRE_THROWS_AS(check_inseparable(f.D, s), NotSubalgebra);
  }
}

TEST_CASE("the degree-8 pair of distinct inseparable subalgebras") {
  Deg8Iso f;
  REQUIRE(f.D.i_invariant_value() == 1);
  auto [s1, s2] = lemma3_pair(f.D);
  REQUIRE(s1.flags.verdict());
  REQUIRE(s2.flags.verdict());
  REQUIRE_FALSE(same_span(s1.basis, s2.basis));
  SECTION("the constructed generators are symmetric square-central") {
    for (const auto& g : s2.generators) REQUIRE(sym_plus_member(g, f.D.sigma).yes);
  }
  SECTION("1 (x) v3 is shared") {
    REQUIRE(in_span(s1.basis, f.D.V[2]).has_value());
    REQUIRE(in_span(s2.basis, f.D.V[2]).has_value());
  }
  SECTION("wrong shapes are rejected") {
    Deg4 g;
    REQUIRE_THROWS_AS(lemma3_pair(g.D), WrongShape);
    // three factors but no (M2,t)
    auto F6 = FieldCtx::rational({"a", "b", "c", "d", "e", "f"});
    auto v = [&](int i) { return RatFunc::var(F6, i); };
    auto aniso8 = build_decomposed(F6, {FactorSpec{FactorSpec::Kind::quaternion, v(0), v(1), false},
                                        FactorSpec{FactorSpec::Kind::quaternion, v(2), v(3), false},
                                        FactorSpec{FactorSpec::Kind::quaternion, v(4), v(5), false}});
    REQUIRE_THROWS_AS(lemma3_pair(aniso8), WrongShape);
    REQUIRE_THROWS_AS(nonuniqueness_extend(aniso8), WrongShape);
  }
  SECTION("nonuniqueness_extend delegates at n = 3") {
    auto [t1, t2] = nonuniqueness_extend(f.D);
    REQUIRE(same_span(t1.basis, s1.basis));
    REQUIRE(same_span(t2.basis, s2.basis));
  }
}

TEST_CASE("power iteration into Sym^+") {
  Deg8Iso f;
  auto [s1, s2] = lemma3_pair(f.D);
  SECTION("commuting pairs terminate at k = 1") {
    PosResult r = pos_iterate(f.D, f.D.V[0], f.D.V[0] * f.D.V[2], s1);
    REQUIRE(r.k == 1);
  }
  SECTION("y = 1 gives k = 1") {
    PosResult r = pos_iterate(f.D, f.D.V[0], f.D.A->unit(), s1);
    REQUIRE(r.k == 1);
  }
  SECTION("a non-commuting pair needs an even power") {
    // x = v1' from the second subalgebra, y = v2 from the first
    AlgElement x = s2.generators[s2.generators.size() - 3];
    AlgElement y = f.D.V[1];
    REQUIRE(x * y != y * x);
    PosResult r = pos_iterate(f.D, x, y, s1);
    REQUIRE(r.k > 1);
    REQUIRE(f.D.sigma.fixes(r.power));
    REQUIRE(is_scalar(r.power.square()).has_value());
    REQUIRE(r.power * x == x * r.power);
  }
  SECTION("preconditions") {
    REQUIRE_THROWS_AS(pos_iterate(f.D, f.D.U[0], f.D.V[0], s1), BadChoice);   // u not Sym^+
    REQUIRE_THROWS_AS(pos_iterate(f.D, f.D.V[0], f.D.U[0], s1), BadChoice);   // u not in S
  }
}

TEST_CASE("isotropy vectors in the centralizer") {
  Deg8Iso f;
  SECTION("degree-8 instance") {
    MetResult m = met_isotropy_vector(f.D, f.D.V[0]);
    REQUIRE_FALSE(m.z.is_zero());
    REQUIRE(m.z * f.D.V[0] == f.D.V[0] * m.z);
    REQUIRE((f.D.sigma.apply(m.z) * m.z).is_zero());
    REQUIRE(m.y.square() == f.D.A->unit());
    REQUIRE_FALSE(is_scalar(m.y).has_value());
  }
  SECTION("anisotropic input is rejected") {
    Deg4 g;
    REQUIRE_THROWS_AS(met_isotropy_vector(g.D, g.D.V[0]), NotIsotropic);
  }
  SECTION("square x^2 is rejected") {
    REQUIRE_THROWS_AS(met_isotropy_vector(f.D, f.D.V[2]), SquareInput);  // v3^2 = 1
  }
  SECTION("a generator of the second subalgebra also works") {
    auto [s1, s2] = lemma3_pair(f.D);
    AlgElement v1p = s2.generators[s2.generators.size() - 3];
    MetResult m = met_isotropy_vector(f.D, v1p);
    REQUIRE_FALSE(m.z.is_zero());
    REQUIRE(m.z * v1p == v1p * m.z);
    REQUIRE((f.D.sigma.apply(m.z) * m.z).is_zero());
  }
}

TEST_CASE("isotropy witnesses match the i-invariant") {
  Deg8Iso f;
  auto w = isotropy_witness(f.D);
  REQUIRE(w.has_value());
  REQUIRE_FALSE(w->is_zero());
  REQUIRE((f.D.sigma.apply(*w) * *w).is_zero());
  Deg4 g;
  REQUIRE_FALSE(isotropy_witness(g.D).has_value());
}

TEST_CASE("representation with in-algebra witnesses") {
  Deg4 f;
  SECTION("generator squares and their sums") {
    for (const RatFunc& alpha : {f.b, f.d, f.b * f.d, f.b + f.d, f.b + f.b * f.d}) {
      RepresentsResult r = represents(f.D, alpha);
      REQUIRE(r.yes);
      REQUIRE(r.witness->square() == f.D.A->scalar(alpha));
      REQUIRE(f.D.sigma.fixes(*r.witness));
    }
  }
  SECTION("alpha = 0 on an anisotropic instance") {
    REQUIRE_FALSE(represents(f.D, RatFunc::zero(f.F)).yes);
  }
  SECTION("alpha = 0 on an isotropic instance has a nilpotent witness") {
    Deg8Iso g;
    RepresentsResult r = represents(g.D, RatFunc::zero(g.F));
    REQUIRE(r.yes);
    REQUIRE_FALSE(r.witness->is_zero());
    REQUIRE(r.witness->square() == g.D.A->zero());
  }
  SECTION("values outside Q(Pf)") {
    REQUIRE_FALSE(represents(f.D, f.a).yes);
    REQUIRE_FALSE(represents(f.D, f.a + f.b).yes);
  }
}

TEST_CASE("i-invariant jump checks") {
  Deg4 f;
  CorIaResult r = cor_ia_check(f.D, f.D.V[0]);
  REQUIRE(r.i_before == 0);
  REQUIRE(r.i_after == 1);
  Deg8Iso g;
  CorIaResult r8 = cor_ia_check(g.D, g.D.V[0]);
  REQUIRE(r8.i_before == 1);
  REQUIRE(r8.i_after == 2);
  SECTION("square inputs rejected") {
    REQUIRE_THROWS_AS(cor_ia_check(g.D, g.D.V[2]), SquareInput);
  }
}

TEST_CASE("quaternion subalgebra search") {
  Deg4 f;
  const SubalgebraDesc& s = f.D.default_insep();
  SECTION("designated and composite elements of S") {
    for (const AlgElement& x : {f.D.V[0], f.D.V[1], f.D.V[0] * f.D.V[1], f.D.V[0] + f.D.V[1]}) {
      QuatEmbedResult r = quat_subalgebra_containing(f.D, x, s);
      REQUIRE(r.basis.size() == 4);
      // relations of a quaternion basis (1, u, v, w) with v = pure part of x
      const AlgElement &u = r.basis[1], &x0 = r.basis[2];
      REQUIRE(is_scalar(u.square() + u).value() == r.u_alpha);
      REQUIRE(is_scalar(x0.square()).value() == r.x_square);
      REQUIRE(x0 * u == u * x0 + x0);
      REQUIRE(in_span(r.basis, x).has_value());
    }
  }
  SECTION("elements with scalar parts embed through their pure part") {
    AlgElement x = f.D.V[0] + f.D.A->scalar(f.a);
    QuatEmbedResult r = quat_subalgebra_containing(f.D, x, s);
    REQUIRE(in_span(r.basis, x).has_value());
  }
  SECTION("x = 1 is rejected: its square is a square") {
    REQUIRE_THROWS_AS(quat_subalgebra_containing(f.D, f.D.A->unit(), s), SquareInput);
  }
  SECTION("x outside S is rejected") {
    REQUIRE_THROWS_AS(quat_subalgebra_containing(f.D, f.D.U[0], s), NotSubalgebra);
  }
  SECTION("an element of the second degree-8 subalgebra embeds via the affine family") {
    Deg8Iso g;
    auto [s1, s2] = lemma3_pair(g.D);
    AlgElement v1p = s2.generators[s2.generators.size() - 3];
    QuatEmbedResult r = quat_subalgebra_containing(g.D, v1p, s2);
    REQUIRE(in_span(r.basis, v1p).has_value());
    for (const auto& p : r.basis)
      REQUIRE(in_span(r.basis, g.D.sigma.apply(p)).has_value());
  }
}

TEST_CASE("the isotropic counterexample element") {
  Deg8Iso f;
  CountWitness w = count_witness(f.D);
  REQUIRE(f.D.sigma.fixes(w.x));
  REQUIRE(is_scalar(w.x.square()).value() == w.square);
  REQUIRE(w.square == f.b);  // the square of the chosen Alt unit
  REQUIRE_FALSE(is_square(w.square).has_value());
  REQUIRE_FALSE(alt_plus_F_member(w.x, f.D.sigma).has_value());
  SECTION("wrong shapes") {
    Deg4 g;
    REQUIRE_THROWS_AS(count_witness(g.D), WrongShape);
    // transpose type: all discriminants trivial
    auto F1 = FieldCtx::rational({"a"});
    auto one = RatFunc::one(F1);
    auto tt = build_decomposed(
        F1, {FactorSpec{FactorSpec::Kind::m2t, {}, {}, false},
             FactorSpec{FactorSpec::Kind::m2t, {}, {}, false},
             FactorSpec{FactorSpec::Kind::m2t, {}, {}, false}});
    REQUIRE(tt.i_invariant_value() == 3);
    REQUIRE_THROWS_AS(count_witness(tt), WrongShape);
    (void)one;
  }
}

TEST_CASE("commutative subfield behavior on anisotropic instances") {
  Deg4 f;
  const SubalgebraDesc& s = f.D.default_insep();
  Rng rng(41);
  for (int t = 0; t < 40; ++t) {
    AlgElement x = f.D.A->zero(), y = f.D.A->zero();
    for (const auto& p : s.mask_products) {
      if (rng.bit()) x += RatFunc::from_poly(f.F, random_poly(f.F, rng, 1, true)) * p;
      if (rng.bit()) y += RatFunc::from_poly(f.F, random_poly(f.F, rng, 1, true)) * p;
    }
    REQUIRE(x * y == y * x);
    REQUIRE(sym_plus_member(x + y, f.D.sigma).yes);
    auto prod = sym_plus_member(x * y, f.D.sigma);
    REQUIRE(prod.yes);
    if (!x.is_zero()) {
      // in the anisotropic case every nonzero element of S is a unit
      auto sq = is_scalar(x.square());
      REQUIRE(sq.has_value());
      REQUIRE_FALSE(sq->is_zero());
      REQUIRE(is_unit(x).unit);
    }
  }
}

TEST_CASE("anisotropic uniqueness of the inseparable subalgebra") {
  auto F6 = FieldCtxPtr(FieldCtx::rational({"a", "b", "c", "d", "e", "f"}));
  auto v = [&](int i) { return RatFunc::var(F6, i); };
  auto D = build_decomposed(F6, {FactorSpec{FactorSpec::Kind::quaternion, v(0), v(1), false},
                                 FactorSpec{FactorSpec::Kind::quaternion, v(2), v(3), false},
                                 FactorSpec{FactorSpec::Kind::quaternion, v(4), v(5), false}});
  REQUIRE(D.i_invariant_value() == 0);
  SubalgebraDesc ref = build_inseparable(D, default_choices(D));
  for (std::size_t mask = 1; mask < 8; ++mask) {
    auto ch = default_choices(D);
    for (std::size_t i = 0; i < 3; ++i)
      if (mask & (std::size_t(1) << i)) ch[i] = ch[i] + D.factors[i].alg->unit();
    REQUIRE(same_span(ref.basis, build_inseparable(D, ch).basis));
  }
}

TEST_CASE("the 256-dimensional example runs its computable checks") {
  Exm1Report r = exm1_partial();
  REQUIRE(r.A->dim() == 256);
  REQUIRE(r.B->dim() == 64);
  REQUIRE(r.tau.kind() == InvolKind::orthogonal);
  REQUIRE(r.rho.kind() == InvolKind::orthogonal);
  REQUIRE(r.sigma.kind() == InvolKind::orthogonal);
  REQUIRE(is_scalar(r.one_v.square()).value() == r.alpha);
  REQUIRE(r.sigma.fixes(r.one_v));
  REQUIRE(r.verified.size() >= 6);
  REQUIRE(r.unverified.size() == 2);
}

TEST_CASE("single-factor decompositions") {
  auto F = FieldCtx::rational({"a", "b"});
  SECTION("one quaternion factor") {
    auto D = build_decomposed(
        F, {FactorSpec{FactorSpec::Kind::quaternion, RatFunc::var(F, 0), RatFunc::var(F, 1), false}});
    REQUIRE(D.A->dim() == 4);
    REQUIRE(D.i_invariant_value() == 0);
    const SubalgebraDesc& s = D.default_insep();
    REQUIRE(s.basis.size() == 2);
    REQUIRE(s.flags.verdict());
    REQUIRE_FALSE(isotropy_witness(D).has_value());
    REQUIRE(represents(D, RatFunc::var(F, 1)).yes);
  }
  SECTION("one split factor: Alt unit gives the witness 1 + v") {
    auto D = build_decomposed(F, {FactorSpec{FactorSpec::Kind::m2t, {}, {}, false}});
    REQUIRE(D.i_invariant_value() == 1);
    auto w = isotropy_witness(D);
    REQUIRE(w.has_value());
    REQUIRE(*w == D.A->unit() + D.V[0]);
    REQUIRE((D.sigma.apply(*w) * *w).is_zero());
  }
}

TEST_CASE("representation round trip on random S elements") {
  Deg4 f;
  const SubalgebraDesc& s = f.D.default_insep();
  Rng rng(42);
  int done = 0;
  while (done < 30) {
    AlgElement x = f.D.A->zero();
    for (const auto& p : s.mask_products)
      if (rng.bit()) x += RatFunc::from_poly(f.F, random_poly(f.F, rng, 1, true)) * p;
    if (x.is_zero()) continue;
    RatFunc alpha = is_scalar(x.square()).value();
    if (alpha.is_zero()) continue;
    RepresentsResult r = represents(f.D, alpha);
    REQUIRE(r.yes);
    REQUIRE(r.witness->square() == f.D.A->scalar(alpha));
    ++done;
  }
}
