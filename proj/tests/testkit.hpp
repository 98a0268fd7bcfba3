#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "hochdef/algebra.hpp"
#include "hochdef/complex.hpp"
#include "hochdef/site.hpp"

namespace hochdef::testkit {

using Rng = std::mt19937;

Matrix random_matrix(Field f, std::size_t rows, std::size_t cols, Rng& rng, int lo = -2, int hi = 2);
Vector random_vector(Field f, std::size_t n, Rng& rng, int lo = -2, int hi = 2);
Matrix random_invertible(Field f, std::size_t n, Rng& rng);

// One of k, dual numbers, k[x]/(x^3), k x k, upper triangular, dual numbers x k,
// of dimension at most max_dim, in a random basis.
Algebra random_algebra(Field f, Rng& rng, std::size_t max_dim = 3);
// Regular, zero, or a direct sum of regular copies, in a random basis of M.
Bimodule random_bimodule(const Algebra& a, Rng& rng, std::size_t max_dim = 3);

// Random element of the cocycle space of `space`: a combination of
// representatives plus d(h) for random h.
Vector random_cocycle(Field f, const CohomologySpace& space, const Matrix* previous_differential, Rng& rng);

// Objects O0..O{n-1}; each relation Oj <= Oi (i < j) is present with
// probability 1/2, plus Oj <= O0 for all j when with_top.
FiniteSite random_site(std::size_t n, Rng& rng, bool with_top);

// A(U) is B on a random up-set and a quotient S of B elsewhere (or B
// everywhere), M is the regular presheaf, possibly supported on a nonempty
// up-set or down-set, or zero; every object gets its own random basis. With
// symmetric set, B is commutative and M is regular or zero.
BimodulePresheaf random_presheaf(Field f, const FiniteSite& s, Rng& rng, std::size_t max_dim = 3, bool symmetric = false);

}  // namespace hochdef::testkit
