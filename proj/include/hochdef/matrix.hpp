#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hochdef/scalar.hpp"

namespace hochdef {

using Vector = std::vector<Scalar>;

Vector zero_vector(Field f, std::size_t n);
Vector unit_vector(Field f, std::size_t n, std::size_t i);
bool is_zero(const Vector& v);
Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(const Scalar& s, const Vector& v);
// y += a * x
void axpy(Vector& y, const Scalar& a, const Vector& x);
Vector concat(const Vector& a, const Vector& b);
Vector slice(const Vector& v, std::size_t offset, std::size_t length);
std::vector<std::string> to_strings(const Vector& v);

// Dense row-major matrix over a Field.
class Matrix {
 public:
  Matrix() = default;
  Matrix(Field f, std::size_t rows, std::size_t cols);

  static Matrix identity(Field f, std::size_t n);
  static Matrix from_rows(Field f, const std::vector<std::vector<std::int64_t>>& rows);
  static Matrix from_columns(Field f, std::size_t rows, const std::vector<Vector>& cols);
  static Matrix hstack(const Matrix& a, const Matrix& b);
  static Matrix vstack(const Matrix& a, const Matrix& b);
  // Block diagonal sum.
  static Matrix direct_sum(const Matrix& a, const Matrix& b);

  Field field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Scalar& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Scalar& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  Vector column(std::size_t c) const;
  Vector row(std::size_t r) const;
  void set_column(std::size_t c, const Vector& v);
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Matrix& m);
  // Adds s * m into the block at (r0, c0).
  void add_block(std::size_t r0, std::size_t c0, const Matrix& m, const Scalar& s);
  Matrix select(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const;

  Matrix transpose() const;
  Vector apply(const Vector& v) const;
  bool is_zero() const;
  bool is_identity() const;

  Matrix operator-() const;
  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(const Matrix& a, const Matrix& b);
  friend Matrix operator*(const Scalar& s, const Matrix& m);
  friend bool operator==(const Matrix& a, const Matrix& b);

  // Column-major flattening, the coordinate convention used for Hom spaces.
  Vector vectorize() const;
  static Matrix unvectorize(const Vector& v, std::size_t rows, std::size_t cols);

  std::string to_string() const;

 private:
  void check_shape(const Matrix& o, const char* op) const;
  Field field_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

// Kronecker product; index (i, j) of a (x) b is i * b.size + j.
Matrix kronecker(const Matrix& a, const Matrix& b);

struct RowEchelon {
  Matrix reduced;                   // reduced row echelon form
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

RowEchelon rref(Matrix m);
std::size_t rank(const Matrix& m);
// Basis of ker(m); one vector per free column, with a 1 in that column.
std::vector<Vector> kernel_basis(const Matrix& m);
Matrix kernel_matrix(const Matrix& m);
// Some x with m x = b, or nullopt when inconsistent.
std::optional<Vector> solve(const Matrix& m, const Vector& b);
// Independent columns spanning the column space (a subset of the columns).
std::vector<Vector> column_space_basis(const Matrix& m);
bool is_invertible(const Matrix& m);
Matrix inverse(const Matrix& m);

// Incrementally built basis of a subspace of k^n in semi-echelon form. Each
// stored vector carries a tag vector that is transformed by the same row
// operations, so reduce() reports how a vector decomposes in terms of the
// tags of the inserted generators.
class SubspaceBasis {
 public:
  SubspaceBasis(Field f, std::size_t ambient, std::size_t tag_size = 0);

  // Inserts v with the given tag; returns false (and stores nothing) when v
  // already lies in the span.
  bool add(Vector v, Vector tag = {});

  struct Reduction {
    Vector remainder;  // v minus its projection onto the span along pivots
    Vector tag;        // tag of v - remainder
  };
  Reduction reduce(Vector v) const;
  bool contains(const Vector& v) const;

  std::size_t dim() const { return vectors_.size(); }
  std::size_t ambient() const { return ambient_; }
  Field field() const { return field_; }
  const std::vector<Vector>& vectors() const { return vectors_; }

 private:
  Field field_;
  std::size_t ambient_;
  std::size_t tag_size_;
  std::vector<Vector> vectors_;
  std::vector<Vector> tags_;
  std::vector<std::size_t> pivots_;
};

}  // namespace hochdef
