#include <algorithm>

#include "doctest.h"
#include "hochdef/errors.hpp"
#include "hochdef/obstruction.hpp"
#include "testkit.hpp"

using namespace hochdef;
using namespace hochdef::testkit;

namespace {

const Field Q = Field::rationals();

FiniteSite vee() { return FiniteSite({"U", "V", "W"}, {{2, 0}, {2, 1}}); }

FiniteSite triangle() {
  return FiniteSite({"U0", "U1", "U2", "U01", "U02", "U12", "U012"},
                    {{3, 0}, {3, 1}, {4, 0}, {4, 2}, {5, 1}, {5, 2}, {6, 3}, {6, 4}, {6, 5}});
}

// Face poset of the boundary of a tetrahedron: vertices 0..3, edges 4..9, triangles 10..13.
FiniteSite hollow_tetrahedron() {
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> faces;
  for (std::size_t i = 0; i < 4; ++i) faces.push_back({i});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) faces.push_back({i, j});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      for (std::size_t k = j + 1; k < 4; ++k) faces.push_back({i, j, k});
  std::vector<std::pair<std::size_t, std::size_t>> rel;
  for (std::size_t a = 0; a < faces.size(); ++a) {
    std::string n = "U";
    for (std::size_t i : faces[a]) n += std::to_string(i);
    names.push_back(n);
    for (std::size_t b = 0; b < faces.size(); ++b)
      if (faces[b].size() + 1 == faces[a].size() && std::includes(faces[a].begin(), faces[a].end(), faces[b].begin(), faces[b].end()))
        rel.push_back({a, b});
  }
  return FiniteSite(names, rel);
}

const std::vector<std::size_t> kPairCover = {0, 1};
const std::vector<std::size_t> kTripleCover = {0, 1, 2};

BimodulePresheaf constant_regular(const FiniteSite& s, const Algebra& a) {
  return BimodulePresheaf::regular(AlgebraPresheaf::constant(s, a));
}

// Random element of ker(d^1) in the Cech complex of M, as pair values.
std::map<MemberPair, Vector> random_cech_cocycle(const BimodulePresheaf& m, const std::vector<std::size_t>& cover, Rng& rng) {
  CochainComplex c = cech_complex(m.linear(), cover, 2);
  Vector v = zero_vector(Q, c.dim(1));
  for (const Vector& k : kernel_basis(c.differential(1))) axpy(v, Scalar(Q, static_cast<int>(rng() % 5) - 2), k);
  std::map<MemberPair, Vector> out;
  std::size_t off = 0;
  for (const auto& t : cech_tuples(cover.size(), 1)) {
    std::vector<std::size_t> objs = {cover[t[0]], cover[t[1]]};
    const std::size_t d = m.at(m.site().require_meet(objs)).dim();
    out[{t[0], t[1]}] = slice(v, off, d);
    off += d;
  }
  return out;
}

// Constant T2 on the triangle site with M = T2 except M(U012) = 0: the Cech
// complex of M is that of a circle.
BimodulePresheaf hollow_triangle_t2() {
  FiniteSite s = triangle();
  Algebra t2 = algebras::upper_triangular(Q);
  AlgebraPresheaf a = AlgebraPresheaf::constant(s, t2);
  std::vector<Bimodule> mods(6, regular_bimodule(t2));
  mods.push_back(Bimodule::zero(t2));
  std::map<std::pair<std::size_t, std::size_t>, Matrix> given;
  for (auto [v, u] : std::vector<std::pair<std::size_t, std::size_t>>{{3, 0}, {3, 1}, {4, 0}, {4, 2}, {5, 1}, {5, 2}})
    given[{u, v}] = Matrix::identity(Q, 3);
  for (std::size_t u : {3, 4, 5}) given[{u, 6}] = Matrix(Q, 0, 3);
  return BimodulePresheaf(a, mods, given);
}

Vector ha_class(const PresheafExtension& b) { return rho(b).ha_class; }

// Site U, V > W with constant T2; M vanishes on U, V and is J = span{x} at W.
// r^B_{V,W} is twisted by the outer derivation d(x) = x.
PresheafExtension outer_twist() {
  FiniteSite s = vee();
  Algebra t2 = algebras::upper_triangular(Q);
  AlgebraPresheaf a = AlgebraPresheaf::constant(s, t2);
  Matrix one = Matrix::identity(Q, 1), zero = Matrix(Q, 1, 1);
  Bimodule j(t2, 1, {one, zero, zero}, {zero, one, zero});
  BimodulePresheaf m(a, {Bimodule::zero(t2), Bimodule::zero(t2), j}, {{{0, 2}, Matrix(Q, 1, 0)}, {{1, 2}, Matrix(Q, 1, 0)}});
  PresheafExtension split = split_presheaf_extension(m);
  Matrix twisted = split.restriction(1, 2);
  twisted(3, 2) = Scalar::one(Q);
  return PresheafExtension(m, {split.at(0), split.at(1), split.at(2)}, {{{0, 2}, split.restriction(0, 2)}, {{1, 2}, twisted}});
}

// Triangle site with T2 everywhere except k x k at U012 (x killed), regular
// M, glued by m_01 = e1. The coboundary (1, 0) is central at U012 but not in
// the image of the centers above.
PresheafExtension central_obstruction() {
  FiniteSite s = triangle();
  Algebra t2 = algebras::upper_triangular(Q), k2 = algebras::diagonal(Q, 2);
  Matrix q = Matrix::from_rows(Q, {{1, 0, 0}, {0, 1, 0}});
  std::map<std::pair<std::size_t, std::size_t>, Matrix> given;
  for (auto [v, u] : std::vector<std::pair<std::size_t, std::size_t>>{{3, 0}, {3, 1}, {4, 0}, {4, 2}, {5, 1}, {5, 2}})
    given[{u, v}] = Matrix::identity(Q, 3);
  for (std::size_t u : {3, 4, 5}) given[{u, 6}] = q;
  AlgebraPresheaf a(s, {t2, t2, t2, t2, t2, t2, k2}, given);
  BimodulePresheaf m = BimodulePresheaf::regular(a);
  return glue_inner(m, kTripleCover, {{{0, 1}, Vector{Scalar::one(Q), Scalar::zero(Q), Scalar::zero(Q)}}});
}

}  // namespace

TEST_CASE("Cech cocycle validation") {
  BimodulePresheaf m = constant_regular(triangle(), algebras::dual_numbers(Q));
  const Vector x = {Scalar::zero(Q), Scalar::one(Q)};
  CHECK_THROWS_AS(CechCocycleM(m, kTripleCover, {{{0, 1}, x}}), InvariantViolation);
  CechCocycleM c(m, kTripleCover, {{{0, 1}, x}, {{1, 2}, x}, {{2, 0}, -Scalar::one(Q) * (x + x)}});
  CHECK(c.at(1, 0) == -Scalar::one(Q) * x);
  CHECK(c.at(0, 2) == x + x);
  CHECK(is_zero(c.at(2, 2)));
  CHECK_THROWS_AS(CechCocycleM(m, kTripleCover, {{{0, 1}, x}, {{1, 0}, x}}), InvariantViolation);
  FiniteSite two_min({"U", "V", "A", "B"}, {{2, 0}, {2, 1}, {3, 0}, {3, 1}});
  CHECK_THROWS_AS(CechCocycleM(constant_regular(two_min, algebras::ground(Q)), kPairCover, {}), PreconditionFailed);
}

TEST_CASE("epsilon of trivial data is split") {
  BimodulePresheaf t2 = constant_regular(vee(), algebras::upper_triangular(Q));
  PresheafExtension b0 = epsilon(t2, CechCocycleM(t2, kPairCover, {}));
  CHECK(is_zero(ha_class(b0)));
  CHECK(obstruction_cascade(b0, kPairCover).stage == "split");

  // Commutators vanish for a commutative algebra.
  BimodulePresheaf lam = constant_regular(vee(), algebras::dual_numbers(Q));
  PresheafExtension b = epsilon(lam, CechCocycleM(lam, kPairCover, {{{0, 1}, Vector{Scalar(Q, 3), Scalar::one(Q)}}}));
  CHECK(is_zero(ha_class(b)));

  // Gluing by a Cech coboundary m_ij = c_j - c_i is isomorphic to the split one.
  BimodulePresheaf tri = constant_regular(triangle(), algebras::upper_triangular(Q));
  Rng rng(211);
  std::vector<Vector> c;
  for (int i = 0; i < 3; ++i) c.push_back(random_vector(Q, 3, rng));
  std::map<MemberPair, Vector> d;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) d[{i, j}] = c[j] - c[i];
  CHECK(is_zero(ha_class(epsilon(tri, CechCocycleM(tri, kTripleCover, d)))));
}

TEST_CASE("epsilon follows the connecting map of the five-term sequence") {
  Rng rng(223);
  std::size_t nonzero = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const bool three = trial % 2 == 0;
    FiniteSite s = three ? triangle() : vee();
    const auto& cover = three ? kTripleCover : kPairCover;
    // Trial 0: the hollow triangle glued by the non-central idempotent e1.
    BimodulePresheaf m = trial == 0 ? hollow_triangle_t2() : random_presheaf(Q, s, rng, 3);
    auto values = trial == 0 ? std::map<MemberPair, Vector>{{{0, 1}, Vector{Scalar::one(Q), Scalar::zero(Q), Scalar::zero(Q)}}}
                             : random_cech_cocycle(m, cover, rng);
    PresheafExtension b = epsilon(m, CechCocycleM(m, cover, values));

    GSComplex t(m, 3);
    GSSequence seq(t, 2);
    const Vector g = gluing_nerve_cocycle(m, cover, values);
    const Vector expected = seq.ha(2).classify(seq.connecting_cocycle(1, g));
    RhoReport r = rho(b);
    CHECK(r.ha_class == expected);
    CHECK(r.in_connecting_image);
    CHECK(r.ext_zero());
    CHECK(is_zero(r.nerve_image));
    nonzero += !is_zero(r.ha_class);

    for (const Alpha1Member& a : alpha1(b, cover)) CHECK(a.zero());
    Alpha2Result a2 = alpha2(b, cover);
    CHECK(a2.zero());
    CHECK(alpha3(b, a2).zero());
    CHECK(obstruction_cascade(b, cover).stage == (is_zero(r.ha_class) ? "split" : "nerve"));
  }
  CHECK(nonzero > 0);
}

TEST_CASE("epsilon is linear in the cocycle") {
  Rng rng(227);
  for (int trial = 0; trial < 6; ++trial) {
    FiniteSite s = trial % 2 ? triangle() : vee();
    const auto& cover = trial % 2 ? kTripleCover : kPairCover;
    BimodulePresheaf m = random_presheaf(Q, s, rng, 3);
    auto c1 = random_cech_cocycle(m, cover, rng), c2 = random_cech_cocycle(m, cover, rng);
    std::map<MemberPair, Vector> sum;
    for (const auto& [k, v] : c1) sum[k] = v + c2.at(k);
    CHECK(ha_class(epsilon(m, CechCocycleM(m, cover, sum))) ==
          ha_class(epsilon(m, CechCocycleM(m, cover, c1))) + ha_class(epsilon(m, CechCocycleM(m, cover, c2))));
  }
  BimodulePresheaf t2 = hollow_triangle_t2();
  const Vector e1 = {Scalar::one(Q), Scalar::zero(Q), Scalar::zero(Q)}, x = {Scalar::zero(Q), Scalar::zero(Q), Scalar::one(Q)};
  const Vector c1 = ha_class(epsilon(t2, CechCocycleM(t2, kTripleCover, {{{0, 1}, e1}})));
  const Vector c2 = ha_class(epsilon(t2, CechCocycleM(t2, kTripleCover, {{{0, 1}, x}})));
  CHECK(!is_zero(c1));
  CHECK(c1 + c2 == ha_class(epsilon(t2, CechCocycleM(t2, kTripleCover, {{{0, 1}, e1 + x}}))));
}

TEST_CASE("alpha1 sees local Hochschild classes") {
  // Dual numbers on a point: HH^2 = k, the class of B itself.
  FiniteSite point({"U"}, {});
  BimodulePresheaf m = constant_regular(point, algebras::dual_numbers(Q));
  GSComplex t(m, 3);
  CohomologySpace h2(t.ta(), 2);
  REQUIRE(h2.dim() == 1);
  PresheafExtension b = cocycle_to_presheaf_extension(m, {t.component(t.from_ta(2, h2.representatives()[0]), 0, 2),
                                                         t.component(t.from_ta(2, h2.representatives()[0]), 1, 1)});
  auto a1 = alpha1(b, {0});
  REQUIRE(a1.size() == 1);
  CHECK(!a1[0].zero());
  CHECK(!is_zero(a1[0].hh2_class));
  ObstructionReport rep = obstruction_cascade(b, {0});
  CHECK(rep.stage == "alpha1");
  CHECK(!rep.rho.ext_zero());

  // With a largest object and the one-member cover, alpha1 is a complete invariant.
  Rng rng(229);
  std::size_t nonzero = 0;
  for (int trial = 0; trial < 8; ++trial) {
    FiniteSite s = random_site(3, rng, true);
    BimodulePresheaf mp = random_presheaf(Q, s, rng, 2);
    GSComplex tp(mp, 3);
    CochainComplex ta = tp.ta();
    CohomologySpace hs(ta, 2);
    Matrix prev = ta.differential(1);
    Vector z = tp.from_ta(2, random_cocycle(Q, hs, &prev, rng));
    PresheafExtension bp = cocycle_to_presheaf_extension(mp, {tp.component(z, 0, 2), tp.component(z, 1, 1)});
    auto local = alpha1(bp, {0});
    CHECK(local[0].zero() == is_zero(hs.classify(tp.to_ta(2, z))));
    CHECK(local_splittings(bp, {0}).has_value() == local[0].zero());
    nonzero += !local[0].zero();
  }
  CHECK(nonzero > 0);
}

TEST_CASE("alpha2 detects an outer-derivation twist") {
  PresheafExtension b = outer_twist();
  for (const Alpha1Member& a : alpha1(b, kPairCover)) CHECK(a.zero());
  Alpha2Result a2 = alpha2(b, kPairCover);
  CHECK(a2.derivations);
  CHECK(a2.compatible);
  REQUIRE(a2.delta.size() == 1);
  // The difference at W is d itself: e1, e2 -> 0, x -> x.
  LocalCohomology e1 = local_cohomology(b.coefficients(), 1);
  const GSComplex& tw = e1.complexes[2];
  CHECK(tw.component(a2.delta[0], 0, 1).values == Vector{Scalar::zero(Q), Scalar::zero(Q), Scalar::one(Q)});
  CHECK(e1.presheaf.dim(2) == 1);
  CHECK(!a2.zero());
  CHECK_THROWS_AS(alpha3(b, a2), PreconditionFailed);
  ObstructionReport rep = obstruction_cascade(b, kPairCover);
  CHECK(rep.stage == "alpha2");
  CHECK(!is_zero(rep.rho.ha_class));
}

TEST_CASE("alpha2 does not depend on the local sections") {
  Rng rng(233);
  std::vector<std::pair<PresheafExtension, std::vector<std::size_t>>> cases = {{outer_twist(), kPairCover}};
  for (int trial = 0; trial < 4; ++trial) {
    BimodulePresheaf m = random_presheaf(Q, triangle(), rng, 2);
    cases.push_back({epsilon(m, CechCocycleM(m, kTripleCover, random_cech_cocycle(m, kTripleCover, rng))), kTripleCover});
  }
  for (const auto& [b, cover] : cases) {
    Alpha2Result base = alpha2(b, cover);
    std::vector<Vector> moved = base.splittings;
    for (std::size_t i = 0; i < cover.size(); ++i) {
      // Add a random compatible derivation family on the slice.
      const std::vector<bool> mask = b.site().down_set(cover[i]);
      GSComplex ts(b.coefficients(), 3, &mask);
      CochainComplex ta = ts.ta();
      CohomologySpace h1(ta, 1);
      Matrix prev = ta.differential(0);
      moved[i] = moved[i] + ts.from_ta(1, random_cocycle(Q, h1, &prev, rng));
    }
    Alpha2Result other = alpha2(b, cover, &moved);
    CHECK(other.cech_class == base.cech_class);
    std::vector<Vector> broken = base.splittings;
    if (!broken[0].empty()) {
      broken[0][broken[0].size() - 1] += Scalar::one(Q);
      CHECK_THROWS_AS(alpha2(b, cover, &broken), PreconditionFailed);
    }
  }
}

TEST_CASE("alpha3 detects a central Cech class") {
  PresheafExtension b = central_obstruction();
  for (const Alpha1Member& a : alpha1(b, kTripleCover)) CHECK(a.zero());
  Alpha2Result a2 = alpha2(b, kTripleCover);
  CHECK(a2.zero());
  Alpha3Result a3 = alpha3(b, a2);
  REQUIRE(a3.m_triples.size() == 1);
  // m_012 commutes with k x k and is a Cech cocycle trivially (one triple).
  const Bimodule& bottom = b.coefficients().at(6);
  for (std::size_t i = 0; i < 2; ++i) CHECK(is_zero((bottom.left(i) - bottom.right(i)).apply(a3.m_triples[0])));
  // Cech H^2 of the center presheaf: k^2 / span(1, 1).
  CenterPresheaf z = center_presheaf(b.coefficients());
  CHECK(cohomology_dim(cech_complex(z.presheaf, kTripleCover, 2), 2) == 1);
  CHECK(a3.cech_class.size() == 1);
  CHECK(!a3.zero());
  // Independent of the pair representatives: m_012 is (1, 0) up to adding (c, c).
  CHECK(a3.m_triples[0][0] != a3.m_triples[0][1]);
  ObstructionReport rep = obstruction_cascade(b, kTripleCover);
  CHECK(rep.stage == "alpha3");
  CHECK(!is_zero(rep.rho.ha_class));
  CHECK(!rep.rho.ext_zero());

  // A non-central coboundary cannot be glued.
  BimodulePresheaf tri = constant_regular(triangle(), algebras::upper_triangular(Q));
  CHECK_THROWS_AS(glue_inner(tri, kTripleCover, {{{0, 1}, Vector{Scalar::one(Q), Scalar::zero(Q), Scalar::zero(Q)}}}),
                  PreconditionFailed);
}

TEST_CASE("commutative constant presheaf: the center is everything") {
  FiniteSite s = hollow_tetrahedron();
  const std::vector<std::size_t> cover = {0, 1, 2, 3};
  BimodulePresheaf m = constant_regular(s, algebras::dual_numbers(Q));
  CenterPresheaf z = center_presheaf(m);
  for (std::size_t u = 0; u < s.size(); ++u) CHECK(z.presheaf.dim(u) == 2);
  // Cech H^2 of the cover agrees with nerve H^2 of the sphere: one copy of M.
  CochainComplex c = cech_complex(z.presheaf, cover, 2);
  CHECK(cohomology_dim(c, 2) == 2);
  CHECK(cohomology_dim(nerve_complex(m.linear()), 2) == 2);
  Rng rng(239);
  PresheafExtension b = epsilon(m, CechCocycleM(m, cover, random_cech_cocycle(m, cover, rng)));
  CHECK(is_zero(ha_class(b)));
}
