#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hochdef/algebra.hpp"
#include "hochdef/complex.hpp"

namespace hochdef {

// Finite poset of opens. leq(v, u) means V is contained in U.
class FiniteSite {
 public:
  FiniteSite() = default;
  // relations: pairs (v, u) with V <= U; the order is their reflexive
  // transitive closure. Throws InvariantViolation on cycles.
  FiniteSite(std::vector<std::string> names, const std::vector<std::pair<std::size_t, std::size_t>>& relations);

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t u) const { return names_[u]; }
  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;  // throws PreconditionFailed

  bool leq(std::size_t v, std::size_t u) const { return leq_[v * size() + u]; }
  bool less(std::size_t v, std::size_t u) const { return v != u && leq(v, u); }
  // Greatest lower bound, or nullopt when the lower bounds have no maximum.
  std::optional<std::size_t> meet(const std::vector<std::size_t>& objects) const;
  std::size_t require_meet(const std::vector<std::size_t>& objects) const;
  // Mask of the objects V <= u.
  std::vector<bool> down_set(std::size_t u) const;
  // Objects strictly below u with nothing in between.
  std::vector<std::size_t> maximal_below(std::size_t u) const;

  const std::vector<std::size_t>& cover() const { return cover_; }
  void set_cover(std::vector<std::size_t> members);

 private:
  std::vector<std::string> names_;
  std::vector<bool> leq_;
  std::vector<std::size_t> cover_;
};

// U_0 > U_1 > ... > U_p stored in that order; p = size() - 1.
using Chain = std::vector<std::size_t>;

// Strict chains of length p inside the optional object mask, in DFS order
// (U_0 ascending, then U_1 ascending, ...).
std::vector<Chain> strict_chains(const FiniteSite& s, std::size_t p, const std::vector<bool>* mask = nullptr);

class ChainIndex {
 public:
  ChainIndex(const FiniteSite& s, const std::vector<bool>* mask = nullptr);
  // Largest p with a chain of length p; -1 when the mask is empty.
  int max_length() const { return static_cast<int>(chains_.size()) - 1; }
  const std::vector<Chain>& chains(std::size_t p) const;
  std::optional<std::size_t> find(const Chain& c) const;

 private:
  std::vector<std::vector<Chain>> chains_;
  std::map<Chain, std::size_t> index_;
};

// Restriction maps for every pair V <= U, closed under composition from the
// given ones and checked for functoriality.
class RestrictionMaps {
 public:
  RestrictionMaps() = default;
  // given[(u, v)] : F(U) -> F(V) for V < U.
  RestrictionMaps(const FiniteSite& s, Field f, const std::vector<std::size_t>& dims,
                  const std::map<std::pair<std::size_t, std::size_t>, Matrix>& given, const std::string& what);
  const Matrix& operator()(std::size_t u, std::size_t v) const;

 private:
  std::size_t n_ = 0;
  std::vector<std::optional<Matrix>> maps_;
};

// Presheaf of finite-dimensional vector spaces.
class LinearPresheaf {
 public:
  LinearPresheaf() = default;
  LinearPresheaf(FiniteSite s, Field f, std::vector<std::size_t> dims,
                 const std::map<std::pair<std::size_t, std::size_t>, Matrix>& given);
  LinearPresheaf(FiniteSite s, Field f, std::vector<std::size_t> dims, RestrictionMaps maps);

  const FiniteSite& site() const { return site_; }
  Field field() const { return field_; }
  std::size_t dim(std::size_t u) const { return dims_[u]; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  const Matrix& restriction(std::size_t u, std::size_t v) const { return maps_(u, v); }

 private:
  FiniteSite site_;
  Field field_;
  std::vector<std::size_t> dims_;
  RestrictionMaps maps_;
};

class AlgebraPresheaf {
 public:
  AlgebraPresheaf() = default;
  // Throws InvariantViolation when a map is not an algebra homomorphism or
  // composites disagree, PreconditionFailed when a restriction is missing.
  AlgebraPresheaf(FiniteSite s, std::vector<Algebra> algebras,
                  const std::map<std::pair<std::size_t, std::size_t>, Matrix>& given);
  static AlgebraPresheaf constant(const FiniteSite& s, const Algebra& a);

  const FiniteSite& site() const { return site_; }
  Field field() const { return algebras_.empty() ? Field() : algebras_[0].field(); }
  const Algebra& at(std::size_t u) const { return algebras_[u]; }
  const Matrix& restriction(std::size_t u, std::size_t v) const { return maps_(u, v); }
  AlgebraHom hom(std::size_t u, std::size_t v) const;

 private:
  FiniteSite site_;
  std::vector<Algebra> algebras_;
  RestrictionMaps maps_;
};

class BimodulePresheaf {
 public:
  BimodulePresheaf() = default;
  BimodulePresheaf(AlgebraPresheaf a, std::vector<Bimodule> modules,
                   const std::map<std::pair<std::size_t, std::size_t>, Matrix>& given);
  static BimodulePresheaf regular(const AlgebraPresheaf& a);
  static BimodulePresheaf zero(const AlgebraPresheaf& a);

  const AlgebraPresheaf& algebras() const { return a_; }
  const FiniteSite& site() const { return a_.site(); }
  Field field() const { return a_.field(); }
  const Bimodule& at(std::size_t u) const { return modules_[u]; }
  const Matrix& restriction(std::size_t u, std::size_t v) const { return maps_(u, v); }
  LinearPresheaf linear() const;

 private:
  AlgebraPresheaf a_;
  std::vector<Bimodule> modules_;
  RestrictionMaps maps_;
};

// C^p = sum over strict chains U_0 > ... > U_p in the mask of F(U_p). The
// differential drops U_{p+1} after restricting, U_i with sign (-1)^{p+1-i}
// for 1 <= i <= p, and U_0 with sign (-1)^{p+1}.
CochainComplex nerve_complex(const LinearPresheaf& f, const std::vector<bool>* mask = nullptr);
// Degreewise chain map induced by a morphism of presheaves (components[u] : F(U) -> G(U)).
std::vector<Matrix> nerve_chain_map(const LinearPresheaf& f, const LinearPresheaf& g, const std::vector<Matrix>& components);

// Alternating Cech complex of the cover with values F(U_{i_0} ^ ... ^ U_{i_p}),
// degrees 0..min(size-1, max_degree). Throws PreconditionFailed for a missing meet.
CochainComplex cech_complex(const LinearPresheaf& f, const std::vector<std::size_t>& cover, int max_degree = -1);
// Increasing index tuples of the cover for each Cech degree, matching cech_complex.
std::vector<std::vector<std::size_t>> cech_tuples(std::size_t members, std::size_t p);

// Sub-presheaf U -> {m in M(U) : r_{U,V}(m) is central in M(V) for all V <= U}.
struct CenterPresheaf {
  LinearPresheaf presheaf;
  std::vector<Matrix> inclusion;  // columns: basis of the subspace in M(U)
};
CenterPresheaf center_presheaf(const BimodulePresheaf& m);

}  // namespace hochdef
