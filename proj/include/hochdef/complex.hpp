#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "hochdef/matrix.hpp"

namespace hochdef {

// Cochain complex C^lo -> ... -> C^hi. Differentials outside the declared
// range are zero maps.
class CochainComplex {
 public:
  CochainComplex() = default;
  // differentials[i] maps degree lo+i to lo+i+1; size must be dims.size()-1.
  CochainComplex(Field f, int lo, std::vector<std::size_t> dims, std::vector<Matrix> differentials);

  Field field() const { return field_; }
  int lowest() const { return lo_; }
  int highest() const { return lo_ + static_cast<int>(dims_.size()) - 1; }
  bool in_range(int n) const { return n >= lo_ && n <= highest(); }
  std::size_t dim(int n) const;
  // d^n : C^n -> C^{n+1}; a zero matrix of the right shape when absent.
  Matrix differential(int n) const;
  const Matrix* differential_ptr(int n) const;

  // First degree n with d^{n+1} d^n != 0, or nullopt.
  std::optional<int> d_squared_failure() const;
  bool d_squared_zero() const { return !d_squared_failure(); }

 private:
  Field field_;
  int lo_ = 0;
  std::vector<std::size_t> dims_;
  std::vector<Matrix> d_;
};

// H^n of a complex with a chosen basis of representatives. Classification
// of cocycles and (optionally) coboundary preimages are answered from one
// semi-echelon basis of im d^{n-1} + span(representatives).
class CohomologySpace {
 public:
  CohomologySpace(const CochainComplex& c, int n, bool track_preimages = false);

  int degree() const { return degree_; }
  std::size_t dim() const { return reps_.size(); }
  std::size_t ambient() const { return ambient_; }
  const std::vector<Vector>& representatives() const { return reps_; }

  bool is_cocycle(const Vector& v) const;
  bool is_coboundary(const Vector& v) const;
  // Coordinates of the class of a cocycle in the representative basis.
  Vector classify(const Vector& cocycle) const;
  // Some x with d^{n-1} x = v; requires track_preimages.
  std::optional<Vector> coboundary_preimage(const Vector& v) const;

 private:
  Field field_;
  int degree_;
  std::size_t ambient_;
  std::size_t source_dim_;  // dim C^{n-1}
  bool track_;
  Matrix next_;             // d^n
  std::vector<Vector> reps_;
  SubspaceBasis span_;
};

struct Cohomology {
  std::size_t dim = 0;
  std::vector<Vector> representatives;
};

// dim = nullity(d^n) - rank(d^{n-1}). Degrees adjacent to the declared range
// are rejected when the neighbouring space is nonzero.
Cohomology cohomology(const CochainComplex& c, int n);
std::size_t cohomology_dim(const CochainComplex& c, int n);

// Matrix of the map H(src) -> H(tgt) induced by a degreewise chain map.
Matrix induced_map(const CohomologySpace& src, const CohomologySpace& tgt, const Matrix& chain_map);

// Keeps the listed coordinates in each degree. This is the subcomplex when
// the kept coordinates span a d-stable subspace, and the quotient complex
// when the dropped ones do.
CochainComplex select_coordinates(const CochainComplex& c, const std::vector<std::vector<std::size_t>>& keep);

// Matrix of the coordinate inclusion k^{keep} -> k^{ambient}.
Matrix coordinate_inclusion(Field f, std::size_t ambient, const std::vector<std::size_t>& keep);
// Matrix of the coordinate projection k^{ambient} -> k^{keep}.
Matrix coordinate_projection(Field f, std::size_t ambient, const std::vector<std::size_t>& keep);

// Bigraded complex with commuting differentials on the rectangle
// 0 <= p <= pmax, 0 <= q <= qmax.
class DoubleComplex {
 public:
  DoubleComplex() = default;
  DoubleComplex(Field f, std::size_t pmax, std::size_t qmax);

  Field field() const { return field_; }
  std::size_t pmax() const { return pmax_; }
  std::size_t qmax() const { return qmax_; }
  std::size_t dim(std::size_t p, std::size_t q) const;
  void set_dim(std::size_t p, std::size_t q, std::size_t n);
  // d_h : (p,q) -> (p+1,q)
  void set_horizontal(std::size_t p, std::size_t q, Matrix m);
  // d_v : (p,q) -> (p,q+1)
  void set_vertical(std::size_t p, std::size_t q, Matrix m);
  Matrix horizontal(std::size_t p, std::size_t q) const;
  Matrix vertical(std::size_t p, std::size_t q) const;

  struct Check {
    bool horizontal_square_zero = true;
    bool vertical_square_zero = true;
    bool commute = true;
    bool ok() const { return horizontal_square_zero && vertical_square_zero && commute; }
  };
  Check check() const;

 private:
  std::size_t index(std::size_t p, std::size_t q) const { return p * (qmax_ + 1) + q; }
  Field field_;
  std::size_t pmax_ = 0, qmax_ = 0;
  std::vector<std::size_t> dims_;
  std::vector<std::optional<Matrix>> dh_, dv_;
};

// Offsets of the (p, n-p) summands inside Tot^n, ordered by p.
struct TotalLayout {
  struct Block {
    std::size_t p, q, offset, size;
  };
  std::vector<std::vector<Block>> degrees;
  const Block* find(std::size_t p, std::size_t q) const;
};

// Tot^n = sum_{p+q=n} C^{p,q}, D = d_h + (-1)^p d_v on the (p,q) summand.
CochainComplex totalize(const DoubleComplex& dc, TotalLayout* layout = nullptr);

}  // namespace hochdef
