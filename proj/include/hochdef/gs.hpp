#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hochdef/complex.hpp"
#include "hochdef/hochschild.hpp"
#include "hochdef/site.hpp"

namespace hochdef {

// Cochain of bidegree (p, q): for each strict chain U_0 > ... > U_p (in
// ChainIndex order) a Hochschild q-cochain Hom(A(U_0)^q, M(U_p)), concatenated.
struct GSCochain {
  std::size_t p = 0, q = 0;
  Vector values;
};

// The Gerstenhaber-Schack double complex T^{pq}(M) on the objects of an
// optional mask, truncated at q <= caps and p <= min(caps, longest chain).
// Tot^n is exact for n <= caps, so H^n is reliable for n < caps.
//
// d_v on a chain block is the Hochschild differential of A(U_0) acting on
// M(U_p) through r_{U_0,U_p}. d_h uses the nerve signs: dropping U_{p+1}
// postcomposes with r^M, dropping U_i (1 <= i <= p) has sign (-1)^{p+1-i},
// dropping U_0 has sign (-1)^{p+1} and precomposes with (r^A_{U_0,U_1})^q.
class GSComplex {
 public:
  GSComplex(const BimodulePresheaf& m, std::size_t caps, const std::vector<bool>* mask = nullptr,
            std::size_t size_cap = kDefaultSizeCap);

  const BimodulePresheaf& coefficients() const { return m_; }
  const std::vector<bool>& mask() const { return mask_; }
  const ChainIndex& chains() const { return chains_; }
  std::size_t caps() const { return caps_; }
  std::size_t pmax() const { return bicomplex_.pmax(); }
  const DoubleComplex& bicomplex() const { return bicomplex_; }
  const TotalLayout& layout() const { return layout_; }
  const CochainComplex& total() const { return total_; }

  // Throws PreconditionFailed unless H^n of the truncation is the true H^n.
  void require_degree(int n) const;

  // Size of the block of one chain in C^{p,q} and its offset there.
  std::size_t block_size(std::size_t p, std::size_t q, std::size_t chain) const;
  std::size_t block_offset(std::size_t p, std::size_t q, std::size_t chain) const;
  // Offset of C^{p,q} inside Tot^{p+q}; nullopt when that summand is empty or truncated.
  std::optional<std::size_t> summand_offset(std::size_t p, std::size_t q) const;

  // Coordinates of Tot^n in rows q >= 1 (T_a) and in row 0.
  std::vector<std::size_t> ta_coordinates(int n) const;
  std::vector<std::size_t> bottom_coordinates(int n) const;
  CochainComplex ta() const;
  CochainComplex bottom() const;

  Vector to_total(const std::vector<GSCochain>& parts) const;
  GSCochain component(const Vector& total, std::size_t p, std::size_t q) const;
  // Tot^n vector to the T_a^n coordinates and back.
  Vector to_ta(int n, const Vector& total) const;
  Vector from_ta(int n, const Vector& ta) const;

  // Projection onto the complex of a smaller mask (a chain map when the
  // smaller mask is a down-set of this one).
  Vector restrict_to(const GSComplex& sub, int n, const Vector& v) const;

 private:
  BimodulePresheaf m_;
  std::vector<bool> mask_;
  ChainIndex chains_;
  std::size_t caps_;
  DoubleComplex bicomplex_;
  TotalLayout layout_;
  CochainComplex total_;
  // offsets_[p][q][chain]
  std::vector<std::vector<std::vector<std::size_t>>> offsets_;
};

DoubleComplex gs_double_complex(const BimodulePresheaf& m, std::size_t qmax, std::size_t pmax,
                                const std::vector<bool>* mask = nullptr, std::size_t size_cap = kDefaultSizeCap);

// Ext^n_{A^e}(A, M) = H^n(Tot T), H_a^n = H^n(Tot T_a), H^n(U, M) from row 0.
Cohomology gs_ext(const BimodulePresheaf& m, int n, std::size_t size_cap = kDefaultSizeCap);
Cohomology h_a(const BimodulePresheaf& m, int n, std::size_t size_cap = kDefaultSizeCap);
Cohomology gs_nerve(const BimodulePresheaf& m, int n, std::size_t size_cap = kDefaultSizeCap);

// H_a -> Ext -> H(U, M) -> H_a[1] with the maps i_n, j_n and the connecting
// map delta_n, built from one GS complex with caps >= nmax + 1.
class GSSequence {
 public:
  GSSequence(const GSComplex& t, int nmax);

  int nmax() const { return nmax_; }
  const CohomologySpace& ha(int n) const { return ha_.at(static_cast<std::size_t>(n)); }
  const CohomologySpace& ext(int n) const { return ext_.at(static_cast<std::size_t>(n)); }
  const CohomologySpace& nerve(int n) const { return nerve_.at(static_cast<std::size_t>(n)); }
  // H_a^n -> Ext^n
  const Matrix& inclusion(int n) const { return i_.at(static_cast<std::size_t>(n)); }
  // Ext^n -> H^n(U, M)
  const Matrix& projection(int n) const { return j_.at(static_cast<std::size_t>(n)); }
  // H^n(U, M) -> H_a^{n+1}. For n = nmax the columns are connecting cocycles
  // reduced modulo coboundaries in T_a^{n+1}: same kernel, no class basis.
  const Matrix& connecting(int n) const { return delta_.at(static_cast<std::size_t>(n)); }
  // Image of a nerve-complex cocycle of degree n in T_a^{n+1}.
  Vector connecting_cocycle(int n, const Vector& nerve_cocycle) const;

 private:
  const GSComplex* t_;
  int nmax_;
  CochainComplex ta_, bottom_;
  std::vector<CohomologySpace> ha_, ext_, nerve_;
  std::vector<Matrix> i_, j_, delta_;
};

struct LesNode {
  std::string space;  // "H_a", "Ext" or "H"
  int degree = 0;
  std::size_t dim = 0;
  std::size_t kernel = 0;  // dim ker of the outgoing map
  std::size_t image = 0;   // rank of the incoming map
  bool composite_zero = true;
  bool exact() const { return kernel == image && composite_zero; }
};

struct LesReport {
  std::vector<LesNode> nodes;
  std::vector<std::size_t> ha, ext, nerve;  // dimensions, degrees 0..nmax
  bool exact() const;
  // dim Ext^n = dim H_a^n + dim H^n for every n.
  bool splits() const;
};

LesReport les_check(const BimodulePresheaf& m, int nmax, std::size_t size_cap = kDefaultSizeCap);
// Ext^1 -> H^1 -> exal = H_a^2 -> Ext^2 -> H^2, exactness at H^1, H_a^2, Ext^2.
LesReport five_term_check(const BimodulePresheaf& m, std::size_t size_cap = kDefaultSizeCap);

// Presheaf of extensions 0 -> M -> B -> A -> 0; B(U) = A(U) (+) M(U).
class PresheafExtension {
 public:
  PresheafExtension() = default;
  // given[(u, v)] : B(U) -> B(V) for V < U; closed under composition.
  // Throws InvariantViolation unless every r^B is an algebra map compatible
  // with r^A and r^M, and the maps are functorial.
  PresheafExtension(BimodulePresheaf m, std::vector<ExtensionDatum> local,
                    const std::map<std::pair<std::size_t, std::size_t>, Matrix>& given);

  const BimodulePresheaf& coefficients() const { return m_; }
  const FiniteSite& site() const { return m_.site(); }
  const ExtensionDatum& at(std::size_t u) const { return local_[u]; }
  const Matrix& restriction(std::size_t u, std::size_t v) const { return maps_(u, v); }
  std::vector<Matrix> canonical_sections() const;

 private:
  BimodulePresheaf m_;
  std::vector<ExtensionDatum> local_;
  RestrictionMaps maps_;
};

struct GSCocycle2 {
  GSCochain z02;  // Z^{0,2}_U(a, b) = s_U(ab) - s_U(a) s_U(b)
  GSCochain z11;  // Z^{1,1}_{U>V}(a) = s_V r(a) - r^B s_U(a)
};

GSCocycle2 presheaf_extension_to_cocycle(const PresheafExtension& b, const std::vector<Matrix>& sections);
// (a, m)(a', m') = (aa', am' + ma' - Z^{0,2}(a, a')), r^B(a, m) = (ra, rm - Z^{1,1}(a)),
// so that the canonical sections return z. Throws PreconditionFailed when dz != 0.
PresheafExtension cocycle_to_presheaf_extension(const BimodulePresheaf& m, const GSCocycle2& z);
PresheafExtension split_presheaf_extension(const BimodulePresheaf& m);
// The pair as a vector of Tot^2 of T (row 0 entries zero).
Vector gs_total_cocycle(const GSComplex& t, const GSCocycle2& z);

std::size_t exal_presheaf(const BimodulePresheaf& m, std::size_t size_cap = kDefaultSizeCap);

}  // namespace hochdef
