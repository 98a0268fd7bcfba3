#include "doctest.h"
#include "hochdef/errors.hpp"
#include "hochdef/site.hpp"
#include "testkit.hpp"

using namespace hochdef;
using namespace hochdef::testkit;

namespace {

const Field Q = Field::rationals();

FiniteSite vee() { return FiniteSite({"U", "V", "W"}, {{2, 0}, {2, 1}}); }

LinearPresheaf skyscraper(const FiniteSite& s, std::size_t at) {
  std::vector<std::size_t> dims(s.size(), 0);
  dims[at] = 1;
  std::map<std::pair<std::size_t, std::size_t>, Matrix> given;
  for (std::size_t u = 0; u < s.size(); ++u)
    for (std::size_t v = 0; v < s.size(); ++v)
      if (s.less(v, u)) given[{u, v}] = Matrix(Q, dims[v], dims[u]);
  return LinearPresheaf(s, Q, dims, given);
}

LinearPresheaf constant(const FiniteSite& s, std::size_t d) {
  std::map<std::pair<std::size_t, std::size_t>, Matrix> given;
  for (std::size_t u = 0; u < s.size(); ++u)
    for (std::size_t v : s.maximal_below(u)) given[{u, v}] = Matrix::identity(Q, d);
  return LinearPresheaf(s, Q, std::vector<std::size_t>(s.size(), d), given);
}

// F(U) = k^d / span(e_1..e_{c_U}) with c_U = number of objects strictly above
// U, in a random basis; quotient maps from k^d are returned in `from_top`.
LinearPresheaf random_quotient_presheaf(const FiniteSite& s, std::size_t d, Rng& rng, std::vector<Matrix>* from_top) {
  std::vector<std::size_t> dims;
  std::vector<Matrix> q;
  for (std::size_t u = 0; u < s.size(); ++u) {
    std::size_t above = 0;
    for (std::size_t w = 0; w < s.size(); ++w) above += s.less(u, w);
    const std::size_t c = std::min(above, d), du = d - c;
    Matrix proj(Q, du, d);
    for (std::size_t i = 0; i < du; ++i) proj(i, c + i) = Scalar::one(Q);
    q.push_back(random_invertible(Q, du, rng) * proj);
    dims.push_back(du);
  }
  std::map<std::pair<std::size_t, std::size_t>, Matrix> given;
  for (std::size_t u = 0; u < s.size(); ++u)
    for (std::size_t v = 0; v < s.size(); ++v) {
      if (!s.less(v, u)) continue;
      // r Q_U = Q_V; Q_U has full row rank so a solution exists.
      Matrix r(Q, dims[v], dims[u]);
      Matrix qt = q[u].transpose();
      for (std::size_t i = 0; i < dims[v]; ++i) {
        auto x = solve(qt, q[v].row(i));
        REQUIRE(x);
        for (std::size_t j = 0; j < dims[u]; ++j) r(i, j) = (*x)[j];
      }
      given[{u, v}] = r;
    }
  if (from_top) *from_top = q;
  return LinearPresheaf(s, Q, dims, given);
}

}  // namespace

TEST_CASE("site order") {
  FiniteSite s = vee();
  CHECK(s.leq(2, 0));
  CHECK(s.less(2, 1));
  CHECK(!s.leq(0, 1));
  CHECK(s.meet({0, 1}) == std::optional<std::size_t>(2));
  CHECK(s.meet({0}) == std::optional<std::size_t>(0));
  FiniteSite chain({"a", "b", "c"}, {{1, 0}, {2, 1}});
  CHECK(chain.leq(2, 0));
  CHECK_THROWS_AS(FiniteSite({"a", "b"}, {{0, 1}, {1, 0}}), InvariantViolation);
  FiniteSite two_min({"U", "V", "A", "B"}, {{2, 0}, {2, 1}, {3, 0}, {3, 1}});
  CHECK(!two_min.meet({0, 1}));
  CHECK_THROWS_AS(two_min.require_meet({0, 1}), PreconditionFailed);
}

TEST_CASE("strict chains") {
  FiniteSite one({"U"}, {});
  CHECK(strict_chains(one, 0).size() == 1);
  CHECK(strict_chains(one, 1).empty());
  CHECK(strict_chains(vee(), 1).size() == 2);
  FiniteSite chain({"a", "b", "c"}, {{1, 0}, {2, 1}});
  auto c2 = strict_chains(chain, 2);
  REQUIRE(c2.size() == 1);
  CHECK(c2[0] == Chain{0, 1, 2});
  CHECK(strict_chains(chain, 1).size() == 3);
  CHECK(ChainIndex(chain).max_length() == 2);
}

TEST_CASE("nerve cohomology examples") {
  FiniteSite vu({"U", "V"}, {{1, 0}});
  auto c = nerve_complex(constant(vu, 1));
  CHECK(cohomology_dim(c, 0) == 1);
  CHECK(cohomology_dim(c, 1) == 0);

  auto sk = nerve_complex(skyscraper(vee(), 2));
  CHECK(sk.dim(0) == 1);
  CHECK(sk.dim(1) == 2);
  CHECK(cohomology_dim(sk, 0) == 0);
  CHECK(cohomology_dim(sk, 1) == 1);

  auto z = nerve_complex(constant(vee(), 0));
  CHECK(cohomology_dim(z, 0) == 0);
  CHECK(cohomology_dim(z, 1) == 0);
}

TEST_CASE("nerve complexes square to zero and vanish above degree 0 with a final object") {
  Rng rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const bool top = trial % 2 == 0;
    FiniteSite s = random_site(3 + rng() % 3, rng, top);
    LinearPresheaf f = random_quotient_presheaf(s, 3, rng, nullptr);
    auto c = nerve_complex(f);
    CHECK(c.d_squared_zero());
    if (top)
      for (int i = 1; i <= c.highest(); ++i) CHECK(cohomology_dim(c, i) == 0);
  }
}

TEST_CASE("nerve complex is functorial") {
  Rng rng(73);
  for (int trial = 0; trial < 10; ++trial) {
    FiniteSite s = random_site(4, rng, false);
    std::vector<Matrix> q;
    LinearPresheaf f = random_quotient_presheaf(s, 3, rng, &q);
    LinearPresheaf g = constant(s, 3);
    auto cg = nerve_complex(g), cf = nerve_complex(f);
    auto phi = nerve_chain_map(g, f, q);
    for (int p = 0; p < cg.highest(); ++p) {
      const std::size_t up = static_cast<std::size_t>(p);
      CHECK(cf.differential(p) * phi[up] == phi[up + 1] * cg.differential(p));
    }
  }
}

TEST_CASE("cech complexes") {
  FiniteSite s = vee();
  LinearPresheaf k = constant(s, 1);
  auto single = cech_complex(k, {0});
  CHECK(single.highest() == 0);
  CHECK(single.dim(0) == 1);

  auto two = cech_complex(k, {0, 1});
  CHECK(cohomology_dim(two, 0) == 1);
  CHECK(cohomology_dim(two, 1) == 0);

  auto sky = cech_complex(skyscraper(s, 2), {0, 1});
  CHECK(cohomology_dim(sky, 1) == 1);
  CHECK(cohomology_dim(sky, 1) == cohomology_dim(nerve_complex(skyscraper(s, 2)), 1));
  CHECK(cohomology_dim(two, 0) == cohomology_dim(nerve_complex(k), 0));
  CHECK(cohomology_dim(two, 1) == cohomology_dim(nerve_complex(k), 1));

  FiniteSite two_min({"U", "V", "A", "B"}, {{2, 0}, {2, 1}, {3, 0}, {3, 1}});
  CHECK_THROWS_AS(cech_complex(constant(two_min, 1), {0, 1}), PreconditionFailed);

  FiniteSite tri({"U0", "U1", "U2", "U01", "U02", "U12", "U012"},
                 {{3, 0}, {3, 1}, {4, 0}, {4, 2}, {5, 1}, {5, 2}, {6, 3}, {6, 4}, {6, 5}});
  auto c3 = cech_complex(constant(tri, 2), {0, 1, 2});
  CHECK(c3.d_squared_zero());
  CHECK(c3.dim(2) == 2);
  CHECK(cohomology_dim(c3, 1) == 0);
  CHECK(cech_tuples(4, 1).size() == 6);
  CHECK(cech_complex(constant(tri, 2), {0, 1, 2}, 1).highest() == 1);
}

TEST_CASE("presheaf validation") {
  FiniteSite s = vee();
  Algebra t2 = algebras::upper_triangular(Q);
  Algebra k2 = algebras::diagonal(Q, 2);
  // U, V carry T2; W carries k x k through the quotient killing x.
  Matrix q = Matrix::from_rows(Q, {{1, 0, 0}, {0, 1, 0}});
  AlgebraPresheaf a(s, {t2, t2, k2}, {{{0, 2}, q}, {{1, 2}, q}});
  CHECK(a.hom(0, 2).matrix() == q);
  CHECK_THROWS_AS(AlgebraPresheaf(s, {t2, t2, k2}, {{{0, 2}, Matrix::from_rows(Q, {{1, 0, 0}, {0, 1, 1}})}, {{1, 2}, q}}),
                  InvariantViolation);
  CHECK_THROWS_AS(AlgebraPresheaf(s, {t2, t2, k2}, {{{0, 2}, q}}), PreconditionFailed);

  BimodulePresheaf m = BimodulePresheaf::regular(a);
  CHECK(m.restriction(1, 2) == q);
  std::vector<Bimodule> mods = {regular_bimodule(t2), regular_bimodule(t2), regular_bimodule(k2)};
  Matrix bad = Matrix::from_rows(Q, {{0, 1, 0}, {1, 0, 0}});
  CHECK_THROWS_AS(BimodulePresheaf(a, mods, {{{0, 2}, bad}, {{1, 2}, q}}), InvariantViolation);

  FiniteSite chain({"a", "b", "c"}, {{1, 0}, {2, 1}, {2, 0}});
  Matrix two = Matrix::identity(Q, 1);
  two(0, 0) = Scalar(Q, 2);
  CHECK_THROWS_AS(LinearPresheaf(chain, Q, {1, 1, 1}, {{{0, 1}, two}, {{1, 2}, two}, {{0, 2}, two}}), InvariantViolation);
}

TEST_CASE("center presheaf") {
  FiniteSite s = vee();
  Algebra t2 = algebras::upper_triangular(Q);
  auto z = center_presheaf(BimodulePresheaf::regular(AlgebraPresheaf::constant(s, t2)));
  for (std::size_t u = 0; u < 3; ++u) CHECK(z.presheaf.dim(u) == 1);
  CHECK(z.presheaf.restriction(0, 2).is_identity());

  // Restriction to a commutative quotient: central elements of k x k at W
  // do not all come from the center upstairs.
  Algebra k2 = algebras::diagonal(Q, 2);
  Matrix q = Matrix::from_rows(Q, {{1, 0, 0}, {0, 1, 0}});
  AlgebraPresheaf a(s, {t2, t2, k2}, {{{0, 2}, q}, {{1, 2}, q}});
  auto zq = center_presheaf(BimodulePresheaf::regular(a));
  CHECK(zq.presheaf.dim(0) == 1);
  CHECK(zq.presheaf.dim(2) == 2);
}
