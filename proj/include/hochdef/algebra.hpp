#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hochdef/matrix.hpp"

namespace hochdef {

// Finite-dimensional unital associative algebra given by structure constants
// e_i e_j = sum_k c_{ij}^k e_k.
class Algebra {
 public:
  struct Term {
    std::size_t x, y;
    Scalar c;
  };

  Algebra() = default;
  // constants[(i*n + j)*n + k] = c_{ij}^k. Throws InvariantViolation when
  // the table is not associative or `unit` is not a two-sided unit.
  Algebra(Field f, std::vector<std::string> labels, std::vector<Scalar> constants, Vector unit);
  // Same, without validating the algebra axioms (shapes are still checked).
  static Algebra unchecked(Field f, std::vector<std::string> labels, std::vector<Scalar> constants, Vector unit);
  // products[i][j] = coordinates of e_i e_j.
  static Algebra from_products(Field f, std::vector<std::string> labels, const std::vector<std::vector<Vector>>& products,
                               Vector unit);

  Field field() const { return field_; }
  std::size_t dim() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Scalar& constant(std::size_t i, std::size_t j, std::size_t k) const { return c_[(i * dim() + j) * dim() + k]; }
  const std::vector<Scalar>& constants() const { return c_; }
  const Vector& unit() const { return unit_; }
  Vector basis_vector(std::size_t i) const { return unit_vector(field_, dim(), i); }

  Vector product(std::size_t i, std::size_t j) const;
  Vector multiply(const Vector& x, const Vector& y) const;
  // L(e_i): column j holds e_i e_j. R(e_i): column j holds e_j e_i.
  const Matrix& left(std::size_t i) const { return left_[i]; }
  const Matrix& right(std::size_t i) const { return right_[i]; }
  Matrix left_of(const Vector& a) const;
  Matrix right_of(const Vector& a) const;
  // Pairs (x, y) with c_{xy}^k != 0.
  const std::vector<Term>& terms_into(std::size_t k) const { return terms_[k]; }
  bool is_commutative() const;

  // Human readable description of the first violated axiom, if any.
  std::optional<std::string> check() const;
  struct Triple {
    std::size_t i, j, k;
  };
  std::optional<Triple> associativity_failure() const;

  friend bool operator==(const Algebra& a, const Algebra& b);

 private:
  void build_caches();
  Field field_;
  std::vector<std::string> labels_;
  std::vector<Scalar> c_;
  Vector unit_;
  std::vector<Matrix> left_, right_;
  std::vector<std::vector<Term>> terms_;
};

class AlgebraHom {
 public:
  AlgebraHom() = default;
  // map is dim(target) x dim(source). Throws InvariantViolation unless the map
  // is multiplicative on basis pairs and unital.
  AlgebraHom(Algebra source, Algebra target, Matrix map);
  static AlgebraHom identity(const Algebra& a);
  // Shapes are checked, the homomorphism axioms are not.
  static AlgebraHom unchecked(Algebra source, Algebra target, Matrix map);

  const Algebra& source() const { return source_; }
  const Algebra& target() const { return target_; }
  const Matrix& matrix() const { return map_; }
  Vector apply(const Vector& v) const { return map_.apply(v); }
  std::optional<std::string> check() const;

  // (*this) after `first`.
  AlgebraHom after(const AlgebraHom& first) const;

 private:
  Algebra source_, target_;
  Matrix map_;
};

// Bimodule over an algebra given by left and right action matrices of the
// basis elements.
class Bimodule {
 public:
  Bimodule() = default;
  Bimodule(Algebra a, std::size_t dim, std::vector<Matrix> left, std::vector<Matrix> right);
  static Bimodule unchecked(Algebra a, std::size_t dim, std::vector<Matrix> left, std::vector<Matrix> right);
  static Bimodule zero(const Algebra& a);

  const Algebra& algebra() const { return algebra_; }
  Field field() const { return algebra_.field(); }
  std::size_t dim() const { return dim_; }
  const Matrix& left(std::size_t i) const { return left_[i]; }
  const Matrix& right(std::size_t i) const { return right_[i]; }
  Matrix left_of(const Vector& a) const;
  Matrix right_of(const Vector& a) const;
  Vector act_left(const Vector& a, const Vector& m) const { return left_of(a).apply(m); }
  Vector act_right(const Vector& m, const Vector& a) const { return right_of(a).apply(m); }

  // The same space viewed as a bimodule over f.source() acting through f.
  Bimodule pullback(const AlgebraHom& f) const;

  std::optional<std::string> check() const;
  friend bool operator==(const Bimodule& a, const Bimodule& b);

 private:
  Algebra algebra_;
  std::size_t dim_ = 0;
  std::vector<Matrix> left_, right_;
};

Algebra opposite(const Algebra& a);
Algebra tensor(const Algebra& a, const Algebra& b);
Algebra enveloping(const Algebra& a);
Bimodule regular_bimodule(const Algebra& a);
bool is_symmetric(const Bimodule& m);
Bimodule direct_sum(const Bimodule& m, const Bimodule& n);

// New basis f_j = sum_i p(i,j) e_i (columns of p); p must be invertible.
Algebra change_basis(const Algebra& a, const Matrix& p);
// Bimodule over change_basis(m.algebra(), pa) with module basis given by the
// columns of pm.
Bimodule change_basis(const Bimodule& m, const Matrix& pa, const Matrix& pm);

// Standard algebras.
namespace algebras {

Algebra ground(Field f);                            // k
Algebra dual_numbers(Field f);                      // k[x]/(x^2), basis 1, x
Algebra truncated_polynomial(Field f, std::size_t n);  // k[x]/(x^n)
Algebra upper_triangular(Field f);                  // 2x2 upper triangular, basis e1, e2, x
Algebra matrix_algebra(Field f, std::size_t n);     // M_n(k), basis E_ij row-major
Algebra diagonal(Field f, std::size_t n);           // k^n
Algebra product(const Algebra& a, const Algebra& b);  // a x b

}  // namespace algebras

}  // namespace hochdef
