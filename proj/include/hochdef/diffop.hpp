#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "hochdef/hochschild.hpp"

namespace hochdef {

// D^0 <= D^1 <= ... inside Hom(M, N), computed order by order from
//   D^m = {d : [e_i, d] in D^{m-1} for every basis element e_i of C},
// which is the iterated-commutator definition because f -> [f, d] is linear.
struct DiffOpFiltration {
  Field field;
  std::size_t dim_source = 0, dim_target = 0;
  std::vector<std::vector<Matrix>> orders;  // basis of D^m, m = 0 .. orders.size() - 1
  bool stabilized = false;                  // D^{m+1} = D^m for the last m
  std::size_t ambient = 0;                  // dim of the Hom space searched

  std::size_t top_order() const { return orders.size() - 1; }
  // dim D^m; orders past the last computed one repeat it.
  std::size_t dim(std::size_t m) const;
  std::vector<std::size_t> dims() const;
  const std::vector<Matrix>& stable() const { return orders.back(); }
  bool contains(std::size_t m, const Matrix& d) const;
};

// act_m[i], act_n[i]: e_i acting on M and N. Hom is restricted to maps
// commuting with each pair (X on M, Y on N) in linear_over: d X = Y d.
DiffOpFiltration diffops(Field f, const std::vector<Matrix>& act_m, const std::vector<Matrix>& act_n, std::size_t order_cap,
                         const std::vector<std::pair<Matrix, Matrix>>& linear_over = {});
// M = N = C by left multiplication; cap 0 means 2 dim(C)^2.
DiffOpFiltration diffops(const Algebra& c, std::size_t order_cap = 0);
// k_n-linear operators on B.
DiffOpFiltration diffops(const KnAlgebra& b, std::size_t order_cap = 0);
std::size_t default_order_cap(std::size_t dim);

struct KnCompatRow {
  std::size_t order = 0;
  std::size_t lhs = 0;  // dim D^m(A (x) k_n)
  std::size_t rhs = 0;  // (n + 1) dim D^m(A)
  bool pass() const { return lhs == rhs; }
};
struct KnCompatReport {
  std::vector<KnCompatRow> rows;
  bool stabilized = false;
  bool pass() const;
};
KnCompatReport kn_compat_check(const Algebra& a, std::size_t n, std::size_t order_cap = 0);

// gamma : gr D(B) -> D(gr B) = D(A) (x) k_n. The degree-p piece of gr D(B)
// is t^p D(B) / t^{p+1} D(B); [t^p d] goes to the leading block d_0 in D(A) t^p.
struct GradedDiffMap {
  std::size_t order = 0;          // n
  DiffOpFiltration source;        // D(B)
  DiffOpFiltration target;        // D(A)
  std::vector<Matrix> degree_maps;  // dim D(A) x dim gr_p, coordinates in target.stable()
  std::vector<std::size_t> source_dims, ranks;
  std::size_t target_dim = 0;     // dim D(A), the size of every degree of D(gr B)
  bool lands_in_target = true;    // d_0 in D^m(A) for every d in D^m(B)
};
GradedDiffMap gamma(const KnAlgebra& b, std::size_t order_cap = 0);

struct GammaCheck {
  std::string outcome;  // "iso", "neither" or "inconclusive"
  bool injective = false, surjective = false;
};
// Throws InvariantViolation on a one-sided outcome.
GammaCheck gamma_iso_check(const GradedDiffMap& g);

struct InducedDeformation {
  KnAlgebra algebra;                  // D(B) over D(A), basis t^j d_i
  std::vector<Matrix> reference_ops;  // basis d_i of D(A) as operators on A
  std::vector<Matrix> operators;      // t^j d_i as operators on B, index j * dim D(A) + i
};
// Throws PreconditionFailed unless gamma is an isomorphism.
InducedDeformation induced_deformation(const KnAlgebra& b, std::size_t order_cap = 0);
// section: algebra map D(A) -> D(B) in the coordinates of d.algebra.
std::vector<Matrix> splitting_operators(const InducedDeformation& d, const Matrix& section);

struct FreenessReport {
  bool section_multiplicative = false;
  bool beta_linear = false;  // beta(s(a) b) = a beta(b)
  Matrix freeness;           // A (x) k_n -> B, e_i t^j -> t^j s(e_i) 1
  bool invertible = false;
  bool module_iso = false;   // freeness intertwines the A (x) k_n actions
  bool pass() const { return section_multiplicative && beta_linear && invertible && module_iso; }
};
FreenessReport freeness_check(const KnAlgebra& b, const InducedDeformation& d, const Matrix& section);

struct RingComparison {
  std::size_t dim_b = 0;        // dim D(_B B)
  std::size_t dim_tilde = 0;    // dim D(_{A (x) k_n} B)
  std::size_t dim_sum = 0;
  bool stabilized = false;
  bool equal() const { return dim_b == dim_tilde && dim_sum == dim_b; }
};
RingComparison diffop_ring_comparison(const KnAlgebra& b, const InducedDeformation& d, const Matrix& section,
                                      std::size_t order_cap = 0);

}  // namespace hochdef
