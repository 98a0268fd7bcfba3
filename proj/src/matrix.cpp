#include "hochdef/matrix.hpp"

#include <sstream>
#include <utility>

#include "hochdef/errors.hpp"

namespace hochdef {

namespace {

void check_len(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("vector lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
}

}  // namespace

Vector zero_vector(Field f, std::size_t n) { return Vector(n, Scalar::zero(f)); }

Vector unit_vector(Field f, std::size_t n, std::size_t i) {
  Vector v = zero_vector(f, n);
  v.at(i) = Scalar::one(f);
  return v;
}

bool is_zero(const Vector& v) {
  for (const auto& s : v)
    if (!s.is_zero()) return false;
  return true;
}

Vector operator+(const Vector& a, const Vector& b) {
  check_len(a, b);
  Vector r = a;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!b[i].is_zero()) r[i] += b[i];
  return r;
}

Vector operator-(const Vector& a, const Vector& b) {
  check_len(a, b);
  Vector r = a;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!b[i].is_zero()) r[i] -= b[i];
  return r;
}

Vector operator*(const Scalar& s, const Vector& v) {
  Vector r = v;
  for (auto& x : r)
    if (!x.is_zero()) x *= s;
  return r;
}

void axpy(Vector& y, const Scalar& a, const Vector& x) {
  check_len(y, x);
  if (a.is_zero()) return;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (!x[i].is_zero()) y[i] += a * x[i];
}

Vector concat(const Vector& a, const Vector& b) {
  Vector r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

Vector slice(const Vector& v, std::size_t offset, std::size_t length) {
  if (offset + length > v.size()) throw DimensionMismatch("vector slice out of range");
  return Vector(v.begin() + static_cast<std::ptrdiff_t>(offset),
                v.begin() + static_cast<std::ptrdiff_t>(offset + length));
}

std::vector<std::string> to_strings(const Vector& v) {
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(s.to_string());
  return out;
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(Field f, std::size_t rows, std::size_t cols)
    : field_(f), rows_(rows), cols_(cols), data_(rows * cols, Scalar::zero(f)) {}

Matrix Matrix::identity(Field f, std::size_t n) {
  Matrix m(f, n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar::one(f);
  return m;
}

Matrix Matrix::from_rows(Field f, const std::vector<std::vector<std::int64_t>>& rows) {
  std::size_t nc = rows.empty() ? 0 : rows.front().size();
  Matrix m(f, rows.size(), nc);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != nc) throw DimensionMismatch("ragged matrix rows");
    for (std::size_t c = 0; c < nc; ++c) m(r, c) = Scalar(f, rows[r][c]);
  }
  return m;
}

Matrix Matrix::from_columns(Field f, std::size_t rows, const std::vector<Vector>& cols) {
  Matrix m(f, rows, cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) m.set_column(c, cols[c]);
  return m;
}

Matrix Matrix::hstack(const Matrix& a, const Matrix& b) {
  if (a.rows_ != b.rows_) throw DimensionMismatch("hstack row mismatch");
  Matrix m(a.field_, a.rows_, a.cols_ + b.cols_);
  m.set_block(0, 0, a);
  m.set_block(0, a.cols_, b);
  return m;
}

Matrix Matrix::vstack(const Matrix& a, const Matrix& b) {
  if (a.cols_ != b.cols_) throw DimensionMismatch("vstack column mismatch");
  Matrix m(a.field_, a.rows_ + b.rows_, a.cols_);
  m.set_block(0, 0, a);
  m.set_block(a.rows_, 0, b);
  return m;
}

Matrix Matrix::direct_sum(const Matrix& a, const Matrix& b) {
  Matrix m(a.field_, a.rows_ + b.rows_, a.cols_ + b.cols_);
  m.set_block(0, 0, a);
  m.set_block(a.rows_, a.cols_, b);
  return m;
}

Vector Matrix::column(std::size_t c) const {
  Vector v;
  v.reserve(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v.push_back((*this)(r, c));
  return v;
}

Vector Matrix::row(std::size_t r) const {
  return Vector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

void Matrix::set_column(std::size_t c, const Vector& v) {
  if (v.size() != rows_) throw DimensionMismatch("column length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionMismatch("block out of range");
  Matrix m(field_, nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) m(r, c) = (*this)(r0 + r, c0 + c);
  return m;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& m) {
  if (r0 + m.rows_ > rows_ || c0 + m.cols_ > cols_) throw DimensionMismatch("set_block out of range");
  for (std::size_t r = 0; r < m.rows_; ++r)
    for (std::size_t c = 0; c < m.cols_; ++c) (*this)(r0 + r, c0 + c) = m(r, c);
}

void Matrix::add_block(std::size_t r0, std::size_t c0, const Matrix& m, const Scalar& s) {
  if (r0 + m.rows_ > rows_ || c0 + m.cols_ > cols_) throw DimensionMismatch("add_block out of range");
  if (s.is_zero()) return;
  bool unit = s.is_one();
  for (std::size_t r = 0; r < m.rows_; ++r)
    for (std::size_t c = 0; c < m.cols_; ++c) {
      const Scalar& x = m(r, c);
      if (x.is_zero()) continue;
      if (unit)
        (*this)(r0 + r, c0 + c) += x;
      else
        (*this)(r0 + r, c0 + c) += s * x;
    }
}

Matrix Matrix::select(const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols) const {
  Matrix m(field_, rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) m(r, c) = (*this)(rows[r], cols[c]);
  return m;
}

Matrix Matrix::transpose() const {
  Matrix m(field_, cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) m(c, r) = (*this)(r, c);
  return m;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  if (!(a.field() == b.field())) throw FieldMismatch("kronecker: operands over different fields");
  Matrix m(a.field(), a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j).is_zero()) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) m(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
    }
  return m;
}

Vector Matrix::apply(const Vector& v) const {
  if (v.size() != cols_) throw DimensionMismatch("apply: vector length " + std::to_string(v.size()) +
                                                 " vs " + std::to_string(cols_) + " columns");
  Vector out = zero_vector(field_, rows_);
  for (std::size_t c = 0; c < cols_; ++c) {
    if (v[c].is_zero()) continue;
    for (std::size_t r = 0; r < rows_; ++r) {
      const Scalar& x = (*this)(r, c);
      if (!x.is_zero()) out[r] += x * v[c];
    }
  }
  return out;
}

bool Matrix::is_zero() const {
  for (const auto& s : data_)
    if (!s.is_zero()) return false;
  return true;
}

bool Matrix::is_identity() const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) {
      const Scalar& x = (*this)(r, c);
      if (r == c ? !x.is_one() : !x.is_zero()) return false;
    }
  return true;
}

void Matrix::check_shape(const Matrix& o, const char* op) const {
  if (!(field_ == o.field_)) throw FieldMismatch(std::string(op) + ": field mismatch");
  if (rows_ != o.rows_ || cols_ != o.cols_)
    throw DimensionMismatch(std::string(op) + ": shapes " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                            " and " + std::to_string(o.rows_) + "x" + std::to_string(o.cols_));
}

Matrix Matrix::operator-() const {
  Matrix m = *this;
  for (auto& s : m.data_)
    if (!s.is_zero()) s = -s;
  return m;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  check_shape(o, "matrix +");
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (!o.data_[i].is_zero()) data_[i] += o.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  check_shape(o, "matrix -");
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (!o.data_[i].is_zero()) data_[i] -= o.data_[i];
  return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (!(a.field_ == b.field_)) throw FieldMismatch("matrix *: field mismatch");
  if (a.cols_ != b.rows_)
    throw DimensionMismatch("matrix *: " + std::to_string(a.rows_) + "x" + std::to_string(a.cols_) + " times " +
                            std::to_string(b.rows_) + "x" + std::to_string(b.cols_));
  Matrix m(a.field_, a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Scalar& x = a(i, k);
      if (x.is_zero()) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) {
        const Scalar& y = b(k, j);
        if (!y.is_zero()) m(i, j) += x * y;
      }
    }
  return m;
}

Matrix operator*(const Scalar& s, const Matrix& m) {
  Matrix r = m;
  for (auto& x : r.data_)
    if (!x.is_zero()) x *= s;
  return r;
}

bool operator==(const Matrix& a, const Matrix& b) {
  if (!(a.field_ == b.field_) || a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  return a.data_ == b.data_;
}

Vector Matrix::vectorize() const {
  Vector v;
  v.reserve(rows_ * cols_);
  for (std::size_t c = 0; c < cols_; ++c)
    for (std::size_t r = 0; r < rows_; ++r) v.push_back((*this)(r, c));
  return v;
}

Matrix Matrix::unvectorize(const Vector& v, std::size_t rows, std::size_t cols) {
  if (v.size() != rows * cols) throw DimensionMismatch("unvectorize: wrong length");
  if (v.empty()) return Matrix(Field::rationals(), rows, cols);
  Matrix m(v.front().field(), rows, cols);
  for (std::size_t c = 0; c < cols; ++c)
    for (std::size_t r = 0; r < rows; ++r) m(r, c) = v[c * rows + r];
  return m;
}

std::string Matrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (std::size_t r = 0; r < rows_; ++r) {
    if (r) os << "; ";
    for (std::size_t c = 0; c < cols_; ++c) {
      if (c) os << " ";
      os << (*this)(r, c);
    }
  }
  os << "]";
  return os.str();
}

// ---------------------------------------------------------------- elimination

namespace {

std::vector<std::size_t> row_counts(const Matrix& m) {
  std::vector<std::size_t> nnz(m.rows(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) nnz[r] += !m(r, c).is_zero();
  return nnz;
}

// Row with a nonzero in column c (at or below `from`) and the fewest nonzero
// entries, preferring entries equal to one; rows() when there is none.
std::size_t choose_pivot(const Matrix& m, std::size_t c, std::size_t from, const std::vector<std::size_t>& nnz) {
  std::size_t best = m.rows(), best_cost = 0;
  for (std::size_t r = from; r < m.rows(); ++r) {
    if (m(r, c).is_zero()) continue;
    const std::size_t cost = 2 * nnz[r] + (m(r, c).is_one() ? 0 : 1);
    if (best == m.rows() || cost < best_cost) {
      best = r;
      best_cost = cost;
    }
  }
  return best;
}

void swap_rows(Matrix& m, std::size_t a, std::size_t b, std::size_t from_col, std::vector<std::size_t>& nnz) {
  if (a == b) return;
  for (std::size_t k = from_col; k < m.cols(); ++k) std::swap(m(a, k), m(b, k));
  std::swap(nnz[a], nnz[b]);
}

// row r -= f * row p on the listed columns, keeping nnz[r] current.
void eliminate(Matrix& m, std::size_t r, std::size_t p, const Scalar& f, const std::vector<std::size_t>& cols,
               std::vector<std::size_t>& nnz) {
  for (std::size_t k : cols) {
    const bool was_zero = m(r, k).is_zero();
    m(r, k) -= f * m(p, k);
    const bool now_zero = m(r, k).is_zero();
    if (was_zero && !now_zero) ++nnz[r];
    if (!was_zero && now_zero) --nnz[r];
  }
}

}  // namespace

RowEchelon rref(Matrix m) {
  RowEchelon out;
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<std::size_t> nnz = row_counts(m);
  std::size_t pivot_row = 0;
  for (std::size_t c = 0; c < cols && pivot_row < rows; ++c) {
    const std::size_t sel = choose_pivot(m, c, pivot_row, nnz);
    if (sel == rows) continue;
    swap_rows(m, sel, pivot_row, 0, nnz);
    Scalar inv = m(pivot_row, c).inverse();
    if (!inv.is_one())
      for (std::size_t k = c; k < cols; ++k)
        if (!m(pivot_row, k).is_zero()) m(pivot_row, k) *= inv;
    std::vector<std::size_t> nz;
    for (std::size_t k = c; k < cols; ++k)
      if (!m(pivot_row, k).is_zero()) nz.push_back(k);
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == pivot_row || m(r, c).is_zero()) continue;
      const Scalar f = m(r, c);
      eliminate(m, r, pivot_row, f, nz, nnz);
    }
    out.pivots.push_back(c);
    ++pivot_row;
  }
  out.reduced = std::move(m);
  return out;
}

std::size_t rank(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  // Forward elimination only.
  Matrix a = m;
  const std::size_t rows = a.rows(), cols = a.cols();
  std::vector<std::size_t> nnz = row_counts(a);
  std::size_t pivot_row = 0;
  for (std::size_t c = 0; c < cols && pivot_row < rows; ++c) {
    const std::size_t sel = choose_pivot(a, c, pivot_row, nnz);
    if (sel == rows) continue;
    swap_rows(a, sel, pivot_row, c, nnz);
    const Scalar inv = a(pivot_row, c).inverse();
    std::vector<std::size_t> nz;
    for (std::size_t k = c; k < cols; ++k)
      if (!a(pivot_row, k).is_zero()) nz.push_back(k);
    for (std::size_t r = pivot_row + 1; r < rows; ++r) {
      if (a(r, c).is_zero()) continue;
      eliminate(a, r, pivot_row, a(r, c) * inv, nz, nnz);
    }
    ++pivot_row;
  }
  return pivot_row;
}

std::vector<Vector> kernel_basis(const Matrix& m) {
  RowEchelon e = rref(m);
  const std::size_t cols = m.cols();
  std::vector<bool> is_pivot(cols, false);
  for (auto p : e.pivots) is_pivot[p] = true;
  std::vector<Vector> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    Vector v = zero_vector(m.field(), cols);
    v[f] = Scalar::one(m.field());
    for (std::size_t i = 0; i < e.pivots.size(); ++i) {
      const Scalar& x = e.reduced(i, f);
      if (!x.is_zero()) v[e.pivots[i]] = -x;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

Matrix kernel_matrix(const Matrix& m) { return Matrix::from_columns(m.field(), m.cols(), kernel_basis(m)); }

std::optional<Vector> solve(const Matrix& m, const Vector& b) {
  if (b.size() != m.rows()) throw DimensionMismatch("solve: right-hand side length");
  Matrix aug(m.field(), m.rows(), m.cols() + 1);
  aug.set_block(0, 0, m);
  for (std::size_t r = 0; r < m.rows(); ++r) aug(r, m.cols()) = b[r];
  RowEchelon e = rref(std::move(aug));
  if (!e.pivots.empty() && e.pivots.back() == m.cols()) return std::nullopt;
  Vector x = zero_vector(m.field(), m.cols());
  for (std::size_t i = 0; i < e.pivots.size(); ++i) x[e.pivots[i]] = e.reduced(i, m.cols());
  return x;
}

std::vector<Vector> column_space_basis(const Matrix& m) {
  RowEchelon e = rref(m);
  std::vector<Vector> basis;
  for (auto p : e.pivots) basis.push_back(m.column(p));
  return basis;
}

bool is_invertible(const Matrix& m) { return m.rows() == m.cols() && rank(m) == m.rows(); }

Matrix inverse(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("inverse of non-square matrix");
  const std::size_t n = m.rows();
  RowEchelon e = rref(Matrix::hstack(m, Matrix::identity(m.field(), n)));
  if (e.pivots.size() < n || (n > 0 && e.pivots[n - 1] != n - 1)) throw PreconditionFailed("matrix is singular");
  return e.reduced.block(0, n, n, n);
}

// ---------------------------------------------------------------- SubspaceBasis

SubspaceBasis::SubspaceBasis(Field f, std::size_t ambient, std::size_t tag_size)
    : field_(f), ambient_(ambient), tag_size_(tag_size) {}

SubspaceBasis::Reduction SubspaceBasis::reduce(Vector v) const {
  if (v.size() != ambient_) throw DimensionMismatch("SubspaceBasis::reduce: wrong ambient dimension");
  Vector tag = zero_vector(field_, tag_size_);
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    const Scalar c = v[pivots_[i]];
    if (c.is_zero()) continue;
    const Vector& s = vectors_[i];
    for (std::size_t k = pivots_[i]; k < ambient_; ++k)
      if (!s[k].is_zero()) v[k] -= c * s[k];
    if (tag_size_) axpy(tag, c, tags_[i]);
  }
  return {std::move(v), std::move(tag)};
}

bool SubspaceBasis::contains(const Vector& v) const { return is_zero(reduce(v).remainder); }

bool SubspaceBasis::add(Vector v, Vector tag) {
  if (tag.empty()) tag = zero_vector(field_, tag_size_);
  if (tag.size() != tag_size_) throw DimensionMismatch("SubspaceBasis::add: wrong tag length");
  Reduction red = reduce(std::move(v));
  std::size_t pivot = ambient_;
  for (std::size_t k = 0; k < ambient_; ++k)
    if (!red.remainder[k].is_zero()) {
      pivot = k;
      break;
    }
  if (pivot == ambient_) return false;
  // remainder = v - sum c_i s_i, so its tag is tag(v) - red.tag.
  Vector t = tag - red.tag;
  Scalar inv = red.remainder[pivot].inverse();
  Vector s = inv * red.remainder;
  t = inv * t;
  vectors_.push_back(std::move(s));
  tags_.push_back(std::move(t));
  pivots_.push_back(pivot);
  return true;
}

}  // namespace hochdef
