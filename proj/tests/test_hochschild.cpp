#include "doctest.h"
#include "hochdef/errors.hpp"
#include "hochdef/hochschild.hpp"
#include "testkit.hpp"

using namespace hochdef;
using namespace hochdef::testkit;

namespace {

const Field Q = Field::rationals();

// HH^q(k[x]/(x^2)) from the 2-periodic resolution: the cochain complex is
// L -0-> L -2x-> L -0-> L -2x-> ... with L = k[x]/(x^2). Multiplication by
// 2x has rank 1 unless 2 = 0.
std::vector<std::size_t> dual_numbers_oracle(std::uint32_t characteristic, int qmax) {
  const std::size_t rank_2x = characteristic == 2 ? 0 : 1;
  std::vector<std::size_t> out;
  for (int q = 0; q <= qmax; ++q) {
    std::size_t out_rank = (q % 2 == 0) ? 0 : rank_2x;  // d^q
    std::size_t in_rank = (q == 0) ? 0 : (q % 2 == 1 ? 0 : rank_2x);
    out.push_back(2 - out_rank - in_rank);
  }
  return out;
}

Matrix perturbed_section(const ExtensionDatum& e, Rng& rng) {
  Matrix s = e.canonical_section();
  s.set_block(e.dim_a(), 0, random_matrix(e.base().field(), e.dim_m(), e.dim_a(), rng));
  return s;
}

}  // namespace

TEST_CASE("bar complex over the ground field") {
  Algebra k = algebras::ground(Q);
  std::vector<Matrix> id = {Matrix::identity(Q, 2)};
  Bimodule m(k, 2, id, id);
  auto c = bar_cochain_complex(k, m, 4);
  for (int q = 0; q <= 4; ++q) CHECK(c.dim(q) == 2);
  for (int q = 0; q < 4; ++q) {
    if (q % 2 == 0) CHECK(c.differential(q).is_zero());
    else CHECK(c.differential(q).is_identity());
  }
  CHECK(hh(k, m, 0).dim == 2);
  for (int q = 1; q <= 3; ++q) CHECK(hh(k, m, q).dim == 0);
  CHECK(hh(k, regular_bimodule(k), 0).dim == 1);
}

TEST_CASE("dual numbers match the periodic resolution") {
  for (std::uint32_t p : {0u, 2u, 3u}) {
    Field f = p == 0 ? Q : Field::prime(p);
    Algebra lam = algebras::dual_numbers(f);
    Bimodule m = regular_bimodule(lam);
    auto c = bar_cochain_complex(lam, m, 3);
    CHECK(c.dim(0) == 2);
    CHECK(c.dim(1) == 4);
    CHECK(c.dim(2) == 8);
    CHECK(c.dim(3) == 16);
    auto expected = dual_numbers_oracle(p, 3);
    for (int q = 0; q <= 3; ++q) CHECK(hh(lam, m, q).dim == expected[static_cast<std::size_t>(q)]);
  }
  CHECK(dual_numbers_oracle(0, 3) == std::vector<std::size_t>{2, 1, 1, 1});
  CHECK(dual_numbers_oracle(2, 3) == std::vector<std::size_t>{2, 2, 2, 2});
}

TEST_CASE("d squared vanishes on random algebras and bimodules") {
  Rng rng(41);
  for (int trial = 0; trial < 12; ++trial) {
    Field f = trial % 3 == 2 ? Field::prime(5) : Q;
    Algebra a = random_algebra(f, rng, 3);
    Bimodule m = random_bimodule(a, rng, 3);
    auto c = bar_cochain_complex(a, m, 3);
    CHECK(c.d_squared_zero());
  }
}

TEST_CASE("matrix algebras are separable") {
  Algebra m2 = algebras::matrix_algebra(Q, 2);
  Bimodule r = regular_bimodule(m2);
  CHECK(hh(m2, r, 0).dim == 1);
  CHECK(hh(m2, r, 1).dim == 0);
  CHECK(hh(m2, r, 2).dim == 0);
}

TEST_CASE("size cap") {
  Algebra m2 = algebras::matrix_algebra(Q, 2);
  CHECK(cochain_dim(4, 4, 3) == 256);
  CHECK_THROWS_AS(cochain_dim(4, 4, 3, 100), CapExceeded);
  CHECK_THROWS_AS(bar_cochain_complex(m2, regular_bimodule(m2), 3, 200), CapExceeded);
  CHECK_THROWS_AS(cochain_dim(1000, 1000, 40), CapExceeded);
}

TEST_CASE("center") {
  Algebra t2 = algebras::upper_triangular(Q);
  auto z = center(regular_bimodule(t2));
  REQUIRE(z.size() == 1);
  CHECK(z[0][0] == z[0][1]);
  CHECK(z[0][2].is_zero());
  CHECK(center(Bimodule::zero(t2)).empty());
  CHECK(center(regular_bimodule(algebras::dual_numbers(Q))).size() == 2);

  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    Algebra a = random_algebra(Q, rng);
    Bimodule m = random_bimodule(a, rng);
    CHECK(center(m).size() == hh(a, m, 0).dim);
    if (is_symmetric(m)) CHECK(center(m).size() == m.dim());
  }
}

TEST_CASE("derivations") {
  auto dk = derivations(regular_bimodule(algebras::ground(Q)));
  CHECK(dk.der.empty());

  Algebra lam = algebras::dual_numbers(Q);
  auto dl = derivations(regular_bimodule(lam));
  REQUIRE(dl.der.size() == 1);
  CHECK(dl.inner.empty());
  CHECK(dl.outer_dim == 1);
  // d(1) = 0, d(x) = c x.
  CHECK(is_zero(dl.der[0].column(0)));
  CHECK(dl.der[0](0, 1).is_zero());

  Algebra t2 = algebras::upper_triangular(Q);
  auto dt = derivations(regular_bimodule(t2));
  CHECK(dt.outer_dim == 0);
  CHECK(dt.outer_dim == hh(t2, regular_bimodule(t2), 1).dim);

  Rng rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    Algebra a = random_algebra(Q, rng);
    Bimodule m = random_bimodule(a, rng);
    CHECK(derivations(m).outer_dim == hh(a, m, 1).dim);
  }
}

TEST_CASE("extension and cocycle conversions") {
  Rng rng(53);
  for (int trial = 0; trial < 12; ++trial) {
    Field f = trial % 4 == 3 ? Field::prime(3) : Q;
    Algebra a = trial < 4 ? algebras::dual_numbers(f) : random_algebra(f, rng);
    Bimodule m = trial < 4 ? regular_bimodule(a) : random_bimodule(a, rng);
    auto space = hh_space(a, m, 2, true);
    Matrix d1 = bar_differential(a, m, 1);
    Vector z = random_cocycle(f, space, &d1, rng);
    ExtensionDatum e = cocycle_to_extension(m, z);
    CHECK(!e.check());
    CHECK(extension_to_cocycle(e, e.canonical_section()) == z);

    // Another section changes Z by a coboundary.
    Matrix s = perturbed_section(e, rng);
    Vector z2 = extension_to_cocycle(e, s);
    CHECK(space.is_cocycle(z2));
    CHECK(space.is_coboundary(z2 - z));

    SplitResult r = is_split(e);
    CHECK(r.split == is_zero(space.classify(z)));
    if (r.split) {
      REQUIRE(r.section);
      CHECK(is_multiplicative_section(e, *r.section));
    }
  }
}

TEST_CASE("split and non-split examples") {
  Algebra lam = algebras::dual_numbers(Q);
  Bimodule m = regular_bimodule(lam);
  ExtensionDatum triv = split_extension(m);
  CHECK(is_zero(extension_to_cocycle(triv, triv.canonical_section())));
  SplitResult r0 = is_split(triv);
  CHECK(r0.split);
  CHECK(*r0.section == triv.canonical_section());

  auto space = hh_space(lam, m, 2, true);
  REQUIRE(space.dim() == 1);
  ExtensionDatum e = cocycle_to_extension(m, space.representatives()[0]);
  SplitResult r1 = is_split(e);
  CHECK(!r1.split);
  CHECK(!r1.section);
  CHECK(r1.hh2_class == Vector{Scalar::one(Q)});

  // Coboundary extension splits, and its section is found.
  Rng rng(59);
  Vector h = random_vector(Q, 4, rng);
  ExtensionDatum eb = cocycle_to_extension(m, bar_differential(lam, m, 1).apply(h));
  SplitResult r2 = is_split(eb);
  CHECK(r2.split);
  REQUIRE(r2.section);
  CHECK(is_multiplicative_section(eb, *r2.section));

  // Cohomologous cocycles give isomorphic extensions: (a, m) -> (a, m - h(a)) maps
  // the extension of z + dh onto the extension of z.
  Vector z = space.representatives()[0];
  Vector zb = z + bar_differential(lam, m, 1).apply(h);
  ExtensionDatum e1 = cocycle_to_extension(m, z), e2 = cocycle_to_extension(m, zb);
  Matrix phi = split_automorphism(m, -Matrix::unvectorize(h, 2, 2));
  const Algebra& b1 = e1.total();
  const Algebra& b2 = e2.total();
  bool iso = phi.apply(b2.unit()) == b1.unit();
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t y = 0; y < 4; ++y)
      if (!(phi.apply(b2.product(x, y)) == b1.multiply(phi.column(x), phi.column(y)))) iso = false;
  CHECK(iso);

  Vector bad = zero_vector(Q, 8);
  bad[2] = Scalar::one(Q);  // Z(1, x) = 1 alone is not a cocycle.
  CHECK_THROWS_AS(cocycle_to_extension(m, bad), PreconditionFailed);
  Matrix not_section = triv.canonical_section();
  not_section(0, 0) = Scalar(Q, 2);
  CHECK_THROWS_AS(extension_to_cocycle(triv, not_section), PreconditionFailed);
}

TEST_CASE("extension validation") {
  Algebra lam = algebras::dual_numbers(Q);
  Bimodule m = regular_bimodule(lam);
  ExtensionDatum e = split_extension(m);
  // Replace the bimodule by the zero action on a 2-dimensional space.
  std::vector<Matrix> z(2, Matrix(Q, 2, 2));
  z[0] = Matrix::identity(Q, 2);
  Bimodule other(lam, 2, z, z);
  CHECK_THROWS_AS(ExtensionDatum(lam, other, e.total()), InvariantViolation);
}

TEST_CASE("automorphisms of the split extension") {
  auto sk = split_automorphisms(regular_bimodule(algebras::ground(Q)));
  CHECK(sk.automorphisms.empty());
  CHECK(sk.verified);

  Bimodule m = regular_bimodule(algebras::dual_numbers(Q));
  auto sl = split_automorphisms(m);
  CHECK(sl.automorphisms.size() == 1);
  CHECK(sl.verified);
  const Matrix& d = sl.derivations.der[0];
  Matrix d2 = Scalar(Q, 3) * d;
  CHECK(split_automorphism(m, d) * split_automorphism(m, d2) == split_automorphism(m, d + d2));

  auto st = split_automorphisms(regular_bimodule(algebras::upper_triangular(Q)));
  CHECK(st.verified);
  CHECK(st.automorphisms.size() == 2);
}

TEST_CASE("k_n algebras") {
  Algebra lam = algebras::dual_numbers(Q);
  KnAlgebra t = KnAlgebra::trivial(lam, 2);
  CHECK(t.total().dim() == 6);
  CHECK(!t.check());
  Matrix s = t.shift();
  CHECK((s * s * s).is_zero());
  CHECK(t.truncation(1).total().dim() == 4);

  // mu_1 must be a cocycle for associativity at order 1.
  Vector bad = zero_vector(Q, 8);
  bad[1] = Scalar::one(Q);
  Vector unit = zero_vector(Q, 4);
  unit[0] = Scalar::one(Q);
  CHECK_THROWS_AS(KnAlgebra::from_cochains(lam, 1, {bad}, unit), InvariantViolation);
}

TEST_CASE("def^n reduction and lift") {
  Algebra lam = algebras::dual_numbers(Q);
  Bimodule m = regular_bimodule(lam);
  auto space = hh_space(lam, m, 2, true);
  Rng rng(61);
  Matrix d1 = bar_differential(lam, m, 1);

  SUBCASE("order one is the extension itself") {
    ExtensionDatum e = cocycle_to_extension(m, random_cocycle(Q, space, &d1, rng));
    KnAlgebra b = defn_lift(e, 1);
    CHECK(b.total().constants() == e.total().constants());
    CHECK(defn_reduce(b).total().constants() == e.total().constants());
  }
  SUBCASE("round trip preserves the class") {
    for (std::size_t n = 1; n <= 3; ++n) {
      Vector z = random_cocycle(Q, space, &d1, rng);
      ExtensionDatum e = cocycle_to_extension(m, z);
      KnAlgebra b = defn_lift(e, n);
      CHECK(!b.check());
      ExtensionDatum back = defn_reduce(b);
      Matrix sec = perturbed_section(back, rng);
      CHECK(space.classify(extension_to_cocycle(back, sec)) == space.classify(z));
    }
  }
  SUBCASE("nontrivial class at order two") {
    ExtensionDatum e = cocycle_to_extension(m, space.representatives()[0]);
    KnAlgebra b = defn_lift(e, 2);
    Triviality tr = kn_triviality(b);
    CHECK(tr.decided);
    CHECK(!tr.trivial);
    CHECK(is_split(defn_reduce(b)).hh2_class == Vector{Scalar::one(Q)});
  }
  SUBCASE("split extensions lift to trivial algebras") {
    ExtensionDatum e = cocycle_to_extension(m, d1.apply(random_vector(Q, 4, rng)));
    for (std::size_t n = 1; n <= 3; ++n) {
      Triviality tr = kn_triviality(defn_lift(e, n));
      CHECK(tr.decided);
      CHECK(tr.trivial);
      CHECK(tr.method == "reduction");
      CHECK(tr.section.has_value());
    }
  }
  SUBCASE("reduction needs a trivial truncation") {
    // Transport the trivial deformation along id + t g; mu_1 becomes a nonzero coboundary.
    KnAlgebra t = KnAlgebra::trivial(lam, 2);
    Matrix phi = Matrix::identity(Q, 6);
    Matrix g = random_matrix(Q, 2, 2, rng);
    g(0, 0) = Scalar::one(Q);
    for (std::size_t j = 0; j < 2; ++j) phi.set_block((j + 1) * 2, j * 2, g);
    KnAlgebra moved(lam, 2, change_basis(t.total(), phi));
    CHECK(!is_zero(moved.cochain(1)));
    CHECK_THROWS_AS(defn_reduce(moved), PreconditionFailed);
    Triviality tr = kn_triviality(moved);
    CHECK(!tr.decided);
    CHECK(tr.method == "undecided");
  }
}

TEST_CASE("deformations of a separable algebra are trivial") {
  Algebra m2 = algebras::matrix_algebra(Q, 2);
  Bimodule m = regular_bimodule(m2);
  Rng rng(67);
  Matrix d1 = bar_differential(m2, m, 1);
  ExtensionDatum e = cocycle_to_extension(m, d1.apply(random_vector(Q, 16, rng)));
  CHECK(is_split(e).split);
  Triviality tr = kn_triviality(defn_lift(e, 2));
  CHECK(tr.trivial);
  CHECK(tr.section.has_value());

  KnAlgebra t = KnAlgebra::trivial(m2, 2);
  Matrix phi = Matrix::identity(Q, 12);
  Matrix g = random_matrix(Q, 4, 4, rng);
  for (std::size_t j = 0; j < 2; ++j) phi.set_block((j + 1) * 4, j * 4, g);
  KnAlgebra moved(m2, 2, change_basis(t.total(), phi));
  Triviality tm = kn_triviality(moved);
  if (!is_zero(moved.cochain(1))) {
    CHECK(tm.method == "hh2_vanishes");
  }
  CHECK(tm.decided);
  CHECK(tm.trivial);
}
