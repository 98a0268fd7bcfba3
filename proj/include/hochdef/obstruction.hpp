#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hochdef/gs.hpp"

namespace hochdef {

using MemberPair = std::pair<std::size_t, std::size_t>;

// Alternating Cech 1-cocycle of a cover with values m_ij in M(U_i ^ U_j);
// i, j index the cover. Pairs missing from the map are zero.
class CechCocycleM {
 public:
  CechCocycleM() = default;
  // values[(i, j)] with i != j; a pair given in both orders must alternate.
  // Throws InvariantViolation unless r(m_jk) - r(m_ik) + r(m_ij) = 0 on
  // every triple meet, PreconditionFailed when a meet is missing.
  CechCocycleM(const BimodulePresheaf& m, std::vector<std::size_t> cover, const std::map<MemberPair, Vector>& values);

  const std::vector<std::size_t>& cover() const { return cover_; }
  // m_ij; m_ji = -m_ij and m_ii = 0.
  Vector at(std::size_t i, std::size_t j) const;
  // Entries with i < j.
  const std::map<MemberPair, Vector>& values() const { return values_; }

 private:
  Field field_;
  std::vector<std::size_t> cover_;
  std::vector<std::size_t> pair_dims_;  // dim M(U_i ^ U_j), row-major over i, j
  std::map<MemberPair, Vector> values_;
};

// Cech 1-cochain in C^1(cover, M) -> its coboundary in C^2, one vector per
// increasing triple (cech_tuples order).
std::vector<Vector> cech_coboundary(const BimodulePresheaf& m, const std::vector<std::size_t>& cover,
                                    const std::map<MemberPair, Vector>& values);

// Split local extensions glued by (a, m) -> (a, m + [a, m_ij]). Object X uses
// the first member containing it; r^B_{X,Y}(a, m) = (ra, rm + [ra, g]) with g
// the restriction of m_{i(X) i(Y)} to Y. Needs only a centrally closing
// coboundary: throws PreconditionFailed when r(m_jk) - r(m_ik) + r(m_ij) is
// not central below some triple meet, or an object lies under no member.
PresheafExtension glue_inner(const BimodulePresheaf& m, const std::vector<std::size_t>& cover,
                             const std::map<MemberPair, Vector>& values);
PresheafExtension epsilon(const BimodulePresheaf& m, const CechCocycleM& c);
// Nerve 1-cocycle g_{X>Y} of the gluing; the H_a^2 class of epsilon(c) is its
// image under the connecting map. Ordered as the 1-chains of the site.
Vector gluing_nerve_cocycle(const BimodulePresheaf& m, const std::vector<std::size_t>& cover,
                            const std::map<MemberPair, Vector>& values);

// Slice cohomology E^q(X) = H^q(T(slice X)) as a presheaf, with the slice
// complexes and chosen class bases (preimages tracked).
struct LocalCohomology {
  int degree = 0;
  LinearPresheaf presheaf;
  std::vector<GSComplex> complexes;
  std::vector<CohomologySpace> spaces;
};
LocalCohomology local_cohomology(const BimodulePresheaf& m, int q, std::size_t size_cap = kDefaultSizeCap);

struct RhoReport {
  Vector ha_class;           // exal = H_a^2
  Vector ext_class;          // Ext^2
  Vector nerve_image;        // Ext^2 -> H^2(U, M) of ext_class
  bool in_connecting_image;  // H_a^2 class lies in delta(H^1(U, M))
  bool ext_zero() const { return is_zero(ext_class); }
};
RhoReport rho(const PresheafExtension& b, std::size_t size_cap = kDefaultSizeCap);

struct Alpha1Member {
  std::size_t member = 0;  // object index
  Vector hh2_class;        // class of B(U) in HH^2(A(U), M(U))
  Vector slice_class;      // class in Ext^2 of the slice below U
  bool zero() const { return is_zero(slice_class); }
};
std::vector<Alpha1Member> alpha1(const PresheafExtension& b, const std::vector<std::size_t>& cover,
                                 std::size_t size_cap = kDefaultSizeCap);

// Per member a Tot^1 vector h of T(slice U_i) (row q = 1 only) with D(h) the
// restricted cocycle of b: s + h is multiplicative and compatible on the slice.
// nullopt when b is not split on some slice.
std::optional<std::vector<Vector>> local_splittings(const PresheafExtension& b, const std::vector<std::size_t>& cover,
                                                    std::size_t size_cap = kDefaultSizeCap);

struct Alpha2Result {
  std::vector<std::size_t> cover;
  std::vector<Vector> splittings;       // as from local_splittings
  std::vector<MemberPair> pairs;        // i < j
  std::vector<Vector> delta;            // sigma^j - sigma^i on the slice of U_i ^ U_j (Tot^1)
  std::vector<Vector> local_classes;    // in E^1(U_i ^ U_j)
  Vector cech_cochain;                  // concatenated local classes
  Vector cech_class;                    // in H^1(cover, E^1)
  bool derivations = true;              // every component satisfies the derivation identity
  bool compatible = true;               // components commute with restriction
  bool zero() const { return is_zero(cech_class); }
};
// Throws PreconditionFailed when b is not locally split or the supplied
// splittings are not splittings.
Alpha2Result alpha2(const PresheafExtension& b, const std::vector<std::size_t>& cover,
                    const std::vector<Vector>* splittings = nullptr, std::size_t size_cap = kDefaultSizeCap);

struct Alpha3Result {
  std::vector<Vector> local_change;  // chosen E^1(U_i) coordinates removed from sigma^i
  std::vector<MemberPair> pairs;
  std::vector<Vector> m_pairs;       // m_ij in M(U_i ^ U_j), delta'_ij = [., m_ij]
  std::vector<std::vector<std::size_t>> triples;
  std::vector<Vector> m_triples;     // m_ijk in M(U_i ^ U_j ^ U_k)
  Vector cech_class;                 // in H^2(cover, center presheaf)
  bool zero() const { return is_zero(cech_class); }
};
// The local change is the preimage picked by elimination (first basis
// solution). Throws PreconditionFailed unless a2 has zero class.
Alpha3Result alpha3(const PresheafExtension& b, const Alpha2Result& a2, std::size_t size_cap = kDefaultSizeCap);

struct ObstructionReport {
  // "split", "alpha1", "alpha2", "alpha3", "nerve" (all alphas vanish and
  // the Ext^2 class is zero) or "undetected".
  std::string stage;
  RhoReport rho;
  std::vector<Alpha1Member> alpha1;
  std::optional<Alpha2Result> alpha2;
  std::optional<Alpha3Result> alpha3;
};
ObstructionReport obstruction_cascade(const PresheafExtension& b, const std::vector<std::size_t>& cover,
                                      std::size_t size_cap = kDefaultSizeCap);

}  // namespace hochdef
