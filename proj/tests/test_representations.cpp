#include <catch2/catch_amalgamated.hpp>

#include "cforge/representations.hpp"

using namespace cforge;

namespace {

// Pascal row mod p: an independent oracle for the special degree set
bool all_binomials_nonzero(int64_t p, int64_t m) {
  std::vector<int64_t> row{1};
  for (int64_t r = 1; r <= m; ++r) {
    std::vector<int64_t> next(static_cast<size_t>(r + 1), 0);
    next[0] = 1;
    next[static_cast<size_t>(r)] = 1;
    for (size_t i = 1; i < static_cast<size_t>(r); ++i)
      next[i] = (row[i - 1] + row[i]) % p;
    row = std::move(next);
  }
  for (int64_t x : row)
    if (x == 0) return false;
  return true;
}

HomPoly random_hom(const SeriesRing* R, int n, Rng& rng) {
  HomPoly p = HomPoly::zero(R, n);
  for (Series& c : p.c) c = random_series(R, rng, -2, 2, 4);
  return p;
}

DualVec random_dual(const SeriesRing* R, int n, Rng& rng) {
  DualVec d = DualVec::zero(R, n);
  for (Series& c : d.v) c = random_series(R, rng, -2, 2, 4);
  return d;
}

// random element of the polynomial-entry group, with its exact inverse
std::pair<Matrix2, Matrix2> random_group_pair(const CoeffRing* C, const SeriesRing* R,
                                              Rng& rng) {
  PolyMatrix2 g = PolyMatrix2::identity(C);
  for (int w = 0; w < 4; ++w) {
    switch (rng.below(3)) {
      case 0: {
        std::vector<RElem> cs;
        for (int i = 0; i <= static_cast<int>(rng.below(3)); ++i) cs.push_back(C->random(rng));
        GFPoly u(C, cs);
        g = g * PolyMatrix2(GFPoly::one(C), u, GFPoly::zero(C), GFPoly::one(C));
        break;
      }
      case 1: {
        std::vector<RElem> cs;
        for (int i = 0; i <= static_cast<int>(rng.below(3)); ++i) cs.push_back(C->random(rng));
        GFPoly u(C, cs);
        g = g * PolyMatrix2(GFPoly::one(C), GFPoly::zero(C), u, GFPoly::one(C));
        break;
      }
      default:
        g = g * PolyMatrix2(GFPoly::constant(C, C->random_unit(rng)), GFPoly::zero(C),
                            GFPoly::zero(C), GFPoly::one(C));
        break;
    }
  }
  return {g.at_inverse_pi(R), g.inverse().at_inverse_pi(R)};
}

}  // namespace

TEST_CASE("special degrees match the binomial oracle", "[reps]") {
  for (int64_t p : {2, 3, 5, 7})
    for (int64_t m = 0; m <= 200; ++m)
      REQUIRE(special_degree(p, m) == (m > 0 && all_binomials_nonzero(p, m)));
}

TEST_CASE("special degree floor", "[reps]") {
  for (int64_t p : {2, 3, 5}) {
    for (int64_t n = 1; n <= 200; ++n) {
      int64_t a = special_degree_floor(p, n);
      REQUIRE(special_degree(p, a));
      REQUIRE(a <= n);
      for (int64_t m = a + 1; m <= n; ++m) REQUIRE(!special_degree(p, m));
      // the floor never drops below half of n
      REQUIRE(2 * a >= n);
      if (special_degree(p, n)) REQUIRE(a == n);
    }
  }
  REQUIRE_THROWS_AS(special_degree_floor(2, 0), NotApplicable);
}

TEST_CASE("substitution composes contravariantly", "[reps]") {
  const SeriesRing* R = SeriesRing::get(CoeffRing::field(3, 1), 16);
  Rng rng(5);
  for (int n : {1, 2, 4}) {
    for (int it = 0; it < 25; ++it) {
      Matrix2 A = parse_matrix(R, "[[1,0],[0,1]]"), B = A;
      // exact random matrices (not necessarily invertible: substitution is defined anyway)
      auto rand_exact = [&] {
        return Matrix2(random_series(R, rng, -1, 1, 3), random_series(R, rng, -1, 1, 3),
                       random_series(R, rng, -1, 1, 3), random_series(R, rng, -1, 1, 3));
      };
      A = rand_exact();
      B = rand_exact();
      HomPoly P = random_hom(R, n, rng);
      REQUIRE(certified_equal(rho_subst(A, rho_subst(B, P)), rho_subst(B * A, P)));
      REQUIRE(certified_equal(rho_subst(Matrix2::identity(R), P), P));
    }
  }
}

TEST_CASE("group action through exact inverses is a homomorphism", "[reps]") {
  const CoeffRing* C = CoeffRing::field(2, 1);
  const SeriesRing* R = SeriesRing::get(C, 16);
  Rng rng(21);
  for (int n : {1, 3}) {
    for (int it = 0; it < 20; ++it) {
      auto [g, gi] = random_group_pair(C, R, rng);
      auto [h, hi] = random_group_pair(C, R, rng);
      HomPoly P = random_hom(R, n, rng);
      // act by h then g == act by gh; acting substitutes the inverse entries
      HomPoly lhs = rho_subst(gi, rho_subst(hi, P));
      HomPoly rhs = rho_subst(hi * gi, P);
      REQUIRE(certified_equal(lhs, rhs));
    }
  }
}

TEST_CASE("one parameter families expand with binomial coefficients", "[reps]") {
  Rng rng(8);
  for (const CoeffRing* C : {CoeffRing::field(2, 1), CoeffRing::field(3, 1)}) {
    const SeriesRing* R = SeriesRing::get(C);
    for (int n : {2, 3, 5}) {
      std::vector<Series> test_as = {Series::one(R), Series::pi_pow(R, 1),
                                     Series::one(R) + Series::pi_pow(R, 1),
                                     Series::pi_pow(R, -1)};
      for (const Series& a : test_as) {
        for (int alpha = 0; alpha <= n; ++alpha) {
          HomPoly mono = HomPoly::monomial(R, n, alpha, Series::one(R));
          // first family: X^a Y^b -> sum C(a,i) t^i X^{n-a+i} Y^{a-i}
          HomPoly got = rho_subst(gamma_subst_mat(R, a), mono);
          HomPoly want = HomPoly::zero(R, n);
          int64_t binom = 1;
          for (int i = 0; i <= alpha; ++i) {
            if (i > 0) binom = binom * (alpha - i + 1) / i;
            want.c[static_cast<size_t>(n - alpha + i)] =
                want.c[static_cast<size_t>(n - alpha + i)] +
                a.pow(i).scaled(C->from_int(binom));
          }
          REQUIRE(certified_equal(got, want));
          // second family: X^a Y^b -> sum C(a,i) t^i X^i Y^{n-i}
          HomPoly got2 = rho_subst(delta_subst_mat(R, a), mono);
          HomPoly want2 = HomPoly::zero(R, n);
          binom = 1;
          for (int i = 0; i <= alpha; ++i) {
            if (i > 0) binom = binom * (alpha - i + 1) / i;
            want2.c[static_cast<size_t>(i)] =
                want2.c[static_cast<size_t>(i)] + a.pow(i).scaled(C->from_int(binom));
          }
          REQUIRE(certified_equal(got2, want2));
        }
      }
    }
  }
}

TEST_CASE("pairing is invariant under the simultaneous action", "[reps]") {
  const CoeffRing* C = CoeffRing::field(3, 1);
  const SeriesRing* R = SeriesRing::get(C, 16);
  Rng rng(64);
  for (int n : {0, 1, 2, 4}) {
    for (int64_t l : {0, 1, 2}) {
      for (int it = 0; it < 15; ++it) {
        auto [g, gi] = random_group_pair(C, R, rng);
        HomPoly P = random_hom(R, n, rng);
        DualVec phi = random_dual(R, n, rng);
        Series before = pairing(phi, P);
        Series after = pairing(dual_act(g, phi, l), rho_subst(gi, P, l));
        REQUIRE(certified_equal(before, after));
      }
    }
  }
}

TEST_CASE("dual action is a homomorphism", "[reps]") {
  const CoeffRing* C = CoeffRing::field(2, 2);
  const SeriesRing* R = SeriesRing::get(C, 16);
  Rng rng(99);
  for (int it = 0; it < 20; ++it) {
    auto [g, gi] = random_group_pair(C, R, rng);
    auto [h, hi] = random_group_pair(C, R, rng);
    DualVec phi = random_dual(R, 3, rng);
    REQUIRE(certified_equal(dual_act(g, dual_act(h, phi)), dual_act(g * h, phi)));
    REQUIRE(certified_equal(dual_act(Matrix2::identity(R), phi), phi));
  }
}

TEST_CASE("determinant twist is a scalar factor", "[reps]") {
  const CoeffRing* C = CoeffRing::field(3, 1);
  const SeriesRing* R = SeriesRing::get(C, 16);
  Rng rng(17);
  auto [g, gi] = random_group_pair(C, R, rng);
  HomPoly P = random_hom(R, 2, rng);
  for (int64_t l : {1, 3}) {
    HomPoly plain = rho_subst(gi, P), twisted = rho_subst(gi, P, l);
    Series factor = gi.det().pow(-l);
    for (size_t j = 0; j < P.c.size(); ++j)
      REQUIRE(certified_equal(twisted.c[j], plain.c[j] * factor));
  }
}

TEST_CASE("p-th power monomials span an invariant subspace", "[reps]") {
  Rng rng(2);
  for (const CoeffRing* C : {CoeffRing::field(2, 1), CoeffRing::field(3, 1)}) {
    const SeriesRing* R = SeriesRing::get(C, 16);
    int n = 2 * static_cast<int>(C->p);
    auto basis = frobenius_subrep(R, n);
    REQUIRE(basis.size() == 3);
    PolyFracOps ops{C};
    // image of each basis vector under random group elements stays in the span
    for (int it = 0; it < 10; ++it) {
      auto [g, gi] = random_group_pair(C, R, rng);
      for (const HomPoly& b : basis) {
        HomPoly img = rho_subst(gi, b);
        std::vector<std::vector<PolyFrac>> m(static_cast<size_t>(n + 1),
                                             std::vector<PolyFrac>(basis.size(), ops.zero()));
        for (size_t j = 0; j < basis.size(); ++j)
          for (size_t i = 0; i <= static_cast<size_t>(n); ++i)
            m[i][j] = series_to_frac(basis[j].c[i]);
        REQUIRE(solve_affine(m, detail::hom_to_frac(img), ops).has_value());
      }
    }
  }
  REQUIRE_THROWS_AS(frobenius_subrep(SeriesRing::get(CoeffRing::field(2, 1)), 3),
                    NotApplicable);
}

TEST_CASE("finite group enumeration has the right order", "[reps]") {
  // |GL_2(F_q)| = (q^2-1)(q^2-q)
  REQUIRE(enumerate_gl2(CoeffRing::field(2, 1)).size() == 6);
  REQUIRE(enumerate_gl2(CoeffRing::field(3, 1)).size() == 48);
  REQUIRE(enumerate_gl2(CoeffRing::field(2, 2)).size() == 180);
}

TEST_CASE("invariant subspace probe certifies both outcomes", "[reps]") {
  // reducible cases: p divides n, and the probe's basis matches the p-th
  // power span's dimension
  struct Red {
    int64_t p;
    int f, n;
    size_t dim;
  };
  for (Red r : {Red{2, 1, 2, 2}, Red{2, 1, 4, 2}, Red{3, 1, 3, 2}, Red{2, 2, 2, 2}}) {
    ProbeResult pr = invariant_subspace_probe(CoeffRing::field(r.p, r.f), r.n);
    REQUIRE(!pr.irreducible);
    REQUIRE(!pr.invariant_basis.empty());
    REQUIRE(pr.invariant_basis.size() < static_cast<size_t>(r.n + 1));
  }
  // for n = p the invariant subspace found is exactly span{X^p, Y^p} or smaller
  ProbeResult pr2 = invariant_subspace_probe(CoeffRing::field(2, 1), 2);
  REQUIRE(pr2.invariant_basis.size() == 2);
  // degree 3 over F_2: the first probed vector Y^3 generates the proper
  // subspace span{Y^3, X^3, X^2Y + XY^2} (hand computation)
  ProbeResult pr3 = invariant_subspace_probe(CoeffRing::field(2, 1), 3);
  REQUIRE(!pr3.irreducible);
  REQUIRE(pr3.invariant_basis.size() == 3);
  // irreducible exactly in the restricted range n <= p - 1
  for (auto [p, f, n] : {std::tuple<int64_t, int, int>{2, 1, 1},
                         std::tuple<int64_t, int, int>{3, 1, 1},
                         std::tuple<int64_t, int, int>{3, 1, 2},
                         std::tuple<int64_t, int, int>{5, 1, 3},
                         std::tuple<int64_t, int, int>{2, 2, 1}}) {
    ProbeResult pr = invariant_subspace_probe(CoeffRing::field(p, f), n);
    REQUIRE(pr.irreducible);
    // all projective vectors were checked
    int64_t q = 1;
    for (int i = 0; i < f; ++i) q *= p;
    uint64_t proj = 0, power = 1;
    for (int i = 0; i <= n; ++i) {
      proj += power;
      power *= static_cast<uint64_t>(q);
    }
    REQUIRE(pr.vectors_checked == proj);
  }
}

TEST_CASE("default cyclicity samples deduplicate in characteristic two", "[reps]") {
  const SeriesRing* R2 = SeriesRing::get(CoeffRing::field(2, 1));
  auto s2 = default_cyclicity_samples(R2);
  REQUIRE(s2.size() == 2);  // {1, 1 + pi}
  const SeriesRing* R3 = SeriesRing::get(CoeffRing::field(3, 1));
  auto s3 = default_cyclicity_samples(R3);
  REQUIRE(s3.size() == 5);  // {1, 2, 1+pi, 1+2pi, 2+pi}; pi+1 duplicates 1+pi
}

TEST_CASE("cyclic closure on hand-verified degrees", "[reps]") {
  const SeriesRing* R = SeriesRing::get(CoeffRing::field(2, 1));
  auto samples = default_cyclicity_samples(R);
  // degree 1 and 3 are special: the top power generates everything
  for (int n : {1, 3}) {
    CyclicClosure cl = cyclic_closure(R, n, HomPoly::x_power(R, n), samples);
    REQUIRE(cl.complete);
    REQUIRE(cl.rank() == static_cast<size_t>(n + 1));
  }
  // degree 2 = p: X^2 generates only span{X^2, Y^2}
  CyclicClosure c2 = cyclic_closure(R, 2, HomPoly::x_power(R, 2), samples);
  REQUIRE(!c2.complete);
  REQUIRE(c2.rank() == 2);
  // degree 4: C(4,i) vanishes mod 2 except i in {0,4}, so again rank 2
  CyclicClosure c4 = cyclic_closure(R, 4, HomPoly::x_power(R, 4), samples);
  REQUIRE(!c4.complete);
  REQUIRE(c4.rank() == 2);
}

TEST_CASE("incomplete closures are stable under all samples", "[reps]") {
  // certification that the reported span really is the sampled orbit span
  const SeriesRing* R = SeriesRing::get(CoeffRing::field(2, 1));
  auto samples = default_cyclicity_samples(R);
  CyclicClosure cl = cyclic_closure(R, 4, HomPoly::x_power(R, 4), samples);
  for (const Series& a : samples) {
    for (const HomPoly& b : cl.raw) {
      for (const Matrix2& S : {gamma_subst_mat(R, a), delta_subst_mat(R, a)}) {
        HomPoly img = rho_subst(S, b);
        REQUIRE(express_in_closure(cl, img).has_value());
      }
    }
  }
}

TEST_CASE("closure words replay to their vectors", "[reps]") {
  const SeriesRing* R = SeriesRing::get(CoeffRing::field(3, 1));
  auto samples = default_cyclicity_samples(R);
  for (int n : {1, 2}) {
    HomPoly gen = HomPoly::x_power(R, n);
    CyclicClosure cl = cyclic_closure(R, n, gen, samples);
    REQUIRE(cl.complete);
    for (size_t j = 0; j < cl.raw.size(); ++j)
      REQUIRE(certified_equal(rho_subst(cl.words[j], gen), cl.raw[j]));
    // expressing a random polynomial succeeds in a complete closure
    Rng rng(12);
    for (int it = 0; it < 10; ++it)
      REQUIRE(express_in_closure(cl, random_hom(R, n, rng)).has_value());
  }
  // an element outside an incomplete span is rejected
  const SeriesRing* R2 = SeriesRing::get(CoeffRing::field(2, 1));
  CyclicClosure c2 =
      cyclic_closure(R2, 2, HomPoly::x_power(R2, 2), default_cyclicity_samples(R2));
  REQUIRE(!express_in_closure(c2, HomPoly::monomial(R2, 2, 1, Series::one(R2))).has_value());
}

TEST_CASE("hom poly coefficient list parsing", "[reps]") {
  const SeriesRing* R = SeriesRing::get(CoeffRing::field(5, 1));
  HomPoly p = parse_hom_poly(R, 2, "1, pi, 2+pi^2");
  REQUIRE(certified_equal(p.c[0], Series::one(R)));
  REQUIRE(certified_equal(p.c[1], Series::pi_pow(R, 1)));
  REQUIRE(p.c[2].coeff(0) == R->coeff->from_int(2));
  REQUIRE_THROWS_AS(parse_hom_poly(R, 3, "1, 2"), UsageError);
}
