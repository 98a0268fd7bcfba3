#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hochdef/algebra.hpp"
#include "hochdef/complex.hpp"

namespace hochdef {

inline constexpr std::size_t kDefaultSizeCap = 1000000;

// dim(A)^q * dim(M), throwing CapExceeded above `cap`.
std::size_t cochain_dim(std::size_t dim_a, std::size_t dim_m, int q, std::size_t cap = kDefaultSizeCap);

// Coordinates of Hom(A^{(x)q}, M): tuple index (lexicographic, first factor
// most significant) times dim(M) plus the M coordinate.
std::size_t tuple_index(const std::vector<std::size_t>& t, std::size_t n);

// Matrix of d^q : Hom(A^{(x)q}, M) -> Hom(A^{(x)q+1}, M).
Matrix bar_differential(const Algebra& a, const Bimodule& m, int q, std::size_t cap = kDefaultSizeCap);
// Degrees 0..qmax.
CochainComplex bar_cochain_complex(const Algebra& a, const Bimodule& m, int qmax, std::size_t cap = kDefaultSizeCap);

Cohomology hh(const Algebra& a, const Bimodule& m, int q, std::size_t cap = kDefaultSizeCap);
// HH^q with classification of cocycles; preimages optional.
CohomologySpace hh_space(const Algebra& a, const Bimodule& m, int q, bool track_preimages = false,
                         std::size_t cap = kDefaultSizeCap);

// {v in M : e_i v = v e_i for all i}
std::vector<Vector> center(const Bimodule& m);

struct Derivations {
  std::vector<Matrix> der;    // dim(M) x dim(A), column i = d(e_i)
  std::vector<Matrix> inner;  // basis of {[., v]}
  std::size_t outer_dim = 0;
};
Derivations derivations(const Bimodule& m);
Matrix inner_derivation(const Bimodule& m, const Vector& v);

// B = A (+) M as a vector space, the A coordinates first.
class ExtensionDatum {
 public:
  ExtensionDatum() = default;
  // Throws InvariantViolation unless B is an algebra extension of A by M.
  ExtensionDatum(Algebra a, Bimodule m, Algebra b);

  const Algebra& base() const { return m_.algebra(); }
  const Bimodule& module() const { return m_; }
  const Algebra& total() const { return b_; }
  std::size_t dim_a() const { return m_.algebra().dim(); }
  std::size_t dim_m() const { return m_.dim(); }
  Vector pair(const Vector& a, const Vector& m) const { return concat(a, m); }
  // s(a) = (a, 0).
  Matrix canonical_section() const;
  // M-part of (a, 0)(b, 0) on basis pairs, as a Hochschild 2-cochain.
  Vector twist() const;

  std::optional<std::string> check() const;

 private:
  Bimodule m_;
  Algebra b_;
};

// Z_s(a, b) = s(ab) - s(a) s(b). s is (dim A + dim M) x dim A with identity top block.
Vector extension_to_cocycle(const ExtensionDatum& e, const Matrix& s);
// (a, m)(a', m') = (aa', am' + ma' - Z(a, a')), unit (1, Z(1, 1)), so that the
// canonical section returns z.
ExtensionDatum cocycle_to_extension(const Bimodule& m, const Vector& z);
ExtensionDatum split_extension(const Bimodule& m);

struct SplitResult {
  bool split = false;
  Vector hh2_class;               // coordinates in the HH^2 representative basis
  std::optional<Matrix> section;  // multiplicative section when split
};
SplitResult is_split(const ExtensionDatum& e);
// True when s is a unital algebra map A -> B.
bool is_multiplicative_section(const ExtensionDatum& e, const Matrix& s);

struct SplitAutomorphisms {
  Derivations derivations;
  std::vector<Matrix> automorphisms;  // (a, m) -> (a, m + d(a)) on the split extension
  bool verified = false;
};
SplitAutomorphisms split_automorphisms(const Bimodule& m);
Matrix split_automorphism(const Bimodule& m, const Matrix& d);

// Flat algebra over k_n = k[t]/(t^{n+1}) in an adapted basis e_i t^j with
// index j * dim(A) + i. t acts as the block shift; the identification of
// the associated graded with A (x) k_n is the one given by the basis.
class KnAlgebra {
 public:
  KnAlgebra() = default;
  // Throws InvariantViolation unless the product is k_n-bilinear for the
  // shift and reduces to A's product and unit modulo t.
  KnAlgebra(Algebra reference, std::size_t order, Algebra total);
  static KnAlgebra trivial(const Algebra& a, std::size_t order);
  // Product (a t^i)(b t^j) = sum_l mu_l(a, b) t^{i+j+l} with mu_0 = product of a
  // and mu[l-1] given as Hochschild 2-cochains with values in A.
  static KnAlgebra from_cochains(const Algebra& a, std::size_t order, const std::vector<Vector>& mu, const Vector& unit);

  const Algebra& reference() const { return ref_; }
  std::size_t order() const { return n_; }
  const Algebra& total() const { return b_; }
  std::size_t block() const { return ref_.dim(); }
  Matrix shift() const;
  // B / t^{m+1} B for m <= order.
  KnAlgebra truncation(std::size_t m) const;
  // mu_l on basis pairs, read off from products of block-0 elements.
  Vector cochain(std::size_t l) const;

  std::optional<std::string> check() const;

 private:
  Algebra ref_;
  std::size_t n_ = 0;
  Algebra b_;
};

// Requires mu_l = 0 for 0 < l < n (B / t^n B is literally A (x) k_{n-1}) and
// returns the first-order extension of A by A spanned by blocks 0 and n.
ExtensionDatum defn_reduce(const KnAlgebra& b);
// Extension of A by the regular bimodule -> order-n algebra with mu_n = twist.
KnAlgebra defn_lift(const ExtensionDatum& e, std::size_t order);

struct Triviality {
  bool decided = false;
  bool trivial = false;
  std::string method;             // "order0", "reduction", "hh2_vanishes" or "undecided"
  std::optional<Matrix> section;  // algebra map A -> B lifting the identity, when constructed
};
Triviality kn_triviality(const KnAlgebra& b);

}  // namespace hochdef
