#include "hochdef/complex.hpp"

#include <string>
#include <utility>

#include "hochdef/errors.hpp"

namespace hochdef {

CochainComplex::CochainComplex(Field f, int lo, std::vector<std::size_t> dims, std::vector<Matrix> differentials)
    : field_(f), lo_(lo), dims_(std::move(dims)), d_(std::move(differentials)) {
  if (dims_.empty()) throw DimensionMismatch("cochain complex needs at least one degree");
  if (d_.size() + 1 != dims_.size()) throw DimensionMismatch("cochain complex: wrong number of differentials");
  for (std::size_t i = 0; i < d_.size(); ++i) {
    if (d_[i].rows() != dims_[i + 1] || d_[i].cols() != dims_[i])
      throw DimensionMismatch("cochain complex: differential d^" + std::to_string(lo + static_cast<int>(i)) +
                              " has shape " + std::to_string(d_[i].rows()) + "x" + std::to_string(d_[i].cols()));
    if (!(d_[i].field() == f) && d_[i].rows() * d_[i].cols() > 0)
      throw FieldMismatch("cochain complex: differential over the wrong field");
  }
}

std::size_t CochainComplex::dim(int n) const { return in_range(n) ? dims_[static_cast<std::size_t>(n - lo_)] : 0; }

const Matrix* CochainComplex::differential_ptr(int n) const {
  if (n < lo_ || n >= highest()) return nullptr;
  return &d_[static_cast<std::size_t>(n - lo_)];
}

Matrix CochainComplex::differential(int n) const {
  if (const Matrix* m = differential_ptr(n)) return *m;
  return Matrix(field_, dim(n + 1), dim(n));
}

std::optional<int> CochainComplex::d_squared_failure() const {
  for (int n = lo_; n + 1 < highest(); ++n)
    if (!(differential(n + 1) * differential(n)).is_zero()) return n;
  return std::nullopt;
}

// ---------------------------------------------------------------- cohomology

namespace {

void check_degree(const CochainComplex& c, int n) {
  if (c.in_range(n)) return;
  if ((n == c.lowest() - 1 && c.dim(c.lowest()) > 0) || (n == c.highest() + 1 && c.dim(c.highest()) > 0))
    throw PreconditionFailed("cohomology degree " + std::to_string(n) + " lies outside the complex next to a nonzero space");
}

}  // namespace

CohomologySpace::CohomologySpace(const CochainComplex& c, int n, bool track_preimages)
    : field_(c.field()),
      degree_(n),
      ambient_(c.dim(n)),
      source_dim_(c.dim(n - 1)),
      track_(track_preimages),
      next_(c.differential(n)),
      span_(c.field(), c.dim(n), 0) {
  check_degree(c, n);
  std::vector<Vector> kernel = kernel_basis(next_);
  const std::size_t prefix = track_ ? source_dim_ : 0;
  // Tags: [preimage coordinates | representative coordinates]; sized once the
  // number of representatives is known, so collect first.
  std::vector<Vector> image_cols;
  if (const Matrix* prev = c.differential_ptr(n - 1))
    for (std::size_t j = 0; j < prev->cols(); ++j) image_cols.push_back(prev->column(j));

  SubspaceBasis probe(field_, ambient_);
  for (const auto& v : image_cols) probe.add(v);
  for (auto& k : kernel)
    if (probe.add(k)) reps_.push_back(std::move(k));

  const std::size_t tag_size = prefix + reps_.size();
  span_ = SubspaceBasis(field_, ambient_, tag_size);
  for (std::size_t j = 0; j < image_cols.size(); ++j) {
    Vector tag = zero_vector(field_, tag_size);
    if (track_) tag[j] = Scalar::one(field_);
    span_.add(image_cols[j], std::move(tag));
  }
  for (std::size_t k = 0; k < reps_.size(); ++k) span_.add(reps_[k], unit_vector(field_, tag_size, prefix + k));
}

bool CohomologySpace::is_cocycle(const Vector& v) const { return is_zero(next_.apply(v)); }

bool CohomologySpace::is_coboundary(const Vector& v) const {
  if (!is_cocycle(v)) return false;
  return is_zero(classify(v));
}

Vector CohomologySpace::classify(const Vector& cocycle) const {
  if (!is_cocycle(cocycle)) throw PreconditionFailed("classify: vector is not a cocycle");
  auto red = span_.reduce(cocycle);
  if (!is_zero(red.remainder)) throw InvariantViolation("classify: cocycle outside image + representatives");
  const std::size_t prefix = track_ ? source_dim_ : 0;
  return slice(red.tag, prefix, reps_.size());
}

std::optional<Vector> CohomologySpace::coboundary_preimage(const Vector& v) const {
  if (!track_) throw PreconditionFailed("coboundary_preimage needs a space built with preimage tracking");
  if (!is_cocycle(v)) return std::nullopt;
  auto red = span_.reduce(v);
  if (!is_zero(red.remainder)) return std::nullopt;
  for (std::size_t k = 0; k < reps_.size(); ++k)
    if (!red.tag[source_dim_ + k].is_zero()) return std::nullopt;
  return slice(red.tag, 0, source_dim_);
}

Cohomology cohomology(const CochainComplex& c, int n) {
  check_degree(c, n);
  if (!c.in_range(n)) return {};
  CohomologySpace h(c, n);
  return {h.dim(), h.representatives()};
}

std::size_t cohomology_dim(const CochainComplex& c, int n) {
  check_degree(c, n);
  if (!c.in_range(n)) return 0;
  std::size_t nullity = c.dim(n) - rank(c.differential(n));
  return nullity - rank(c.differential(n - 1));
}

Matrix induced_map(const CohomologySpace& src, const CohomologySpace& tgt, const Matrix& chain_map) {
  if (chain_map.cols() != src.ambient() || chain_map.rows() != tgt.ambient())
    throw DimensionMismatch("induced_map: chain map shape does not match the cohomology spaces");
  std::vector<Vector> cols;
  for (const auto& r : src.representatives()) cols.push_back(tgt.classify(chain_map.apply(r)));
  return Matrix::from_columns(chain_map.field(), tgt.dim(), cols);
}

CochainComplex select_coordinates(const CochainComplex& c, const std::vector<std::vector<std::size_t>>& keep) {
  const int lo = c.lowest();
  const std::size_t count = static_cast<std::size_t>(c.highest() - lo + 1);
  if (keep.size() != count) throw DimensionMismatch("select_coordinates: one index list per degree required");
  std::vector<std::size_t> dims;
  std::vector<Matrix> ds;
  for (std::size_t i = 0; i < count; ++i) dims.push_back(keep[i].size());
  for (std::size_t i = 0; i + 1 < count; ++i) ds.push_back(c.differential(lo + static_cast<int>(i)).select(keep[i + 1], keep[i]));
  return CochainComplex(c.field(), lo, std::move(dims), std::move(ds));
}

Matrix coordinate_inclusion(Field f, std::size_t ambient, const std::vector<std::size_t>& keep) {
  Matrix m(f, ambient, keep.size());
  for (std::size_t j = 0; j < keep.size(); ++j) m(keep[j], j) = Scalar::one(f);
  return m;
}

Matrix coordinate_projection(Field f, std::size_t ambient, const std::vector<std::size_t>& keep) {
  return coordinate_inclusion(f, ambient, keep).transpose();
}

// ---------------------------------------------------------------- double complexes

DoubleComplex::DoubleComplex(Field f, std::size_t pmax, std::size_t qmax)
    : field_(f),
      pmax_(pmax),
      qmax_(qmax),
      dims_((pmax + 1) * (qmax + 1), 0),
      dh_((pmax + 1) * (qmax + 1)),
      dv_((pmax + 1) * (qmax + 1)) {}

std::size_t DoubleComplex::dim(std::size_t p, std::size_t q) const {
  if (p > pmax_ || q > qmax_) return 0;
  return dims_[index(p, q)];
}

void DoubleComplex::set_dim(std::size_t p, std::size_t q, std::size_t n) {
  if (p > pmax_ || q > qmax_) throw DimensionMismatch("double complex: bidegree out of range");
  dims_[index(p, q)] = n;
}

void DoubleComplex::set_horizontal(std::size_t p, std::size_t q, Matrix m) {
  if (p >= pmax_ || q > qmax_) throw DimensionMismatch("double complex: horizontal map out of range");
  if (m.cols() != dim(p, q) || m.rows() != dim(p + 1, q)) throw DimensionMismatch("double complex: d_h shape");
  dh_[index(p, q)] = std::move(m);
}

void DoubleComplex::set_vertical(std::size_t p, std::size_t q, Matrix m) {
  if (p > pmax_ || q >= qmax_) throw DimensionMismatch("double complex: vertical map out of range");
  if (m.cols() != dim(p, q) || m.rows() != dim(p, q + 1)) throw DimensionMismatch("double complex: d_v shape");
  dv_[index(p, q)] = std::move(m);
}

Matrix DoubleComplex::horizontal(std::size_t p, std::size_t q) const {
  if (p < pmax_ && q <= qmax_ && dh_[index(p, q)]) return *dh_[index(p, q)];
  return Matrix(field_, dim(p + 1, q), dim(p, q));
}

Matrix DoubleComplex::vertical(std::size_t p, std::size_t q) const {
  if (p <= pmax_ && q < qmax_ && dv_[index(p, q)]) return *dv_[index(p, q)];
  return Matrix(field_, dim(p, q + 1), dim(p, q));
}

DoubleComplex::Check DoubleComplex::check() const {
  Check c;
  for (std::size_t p = 0; p <= pmax_; ++p)
    for (std::size_t q = 0; q <= qmax_; ++q) {
      if (p + 2 <= pmax_ && !(horizontal(p + 1, q) * horizontal(p, q)).is_zero()) c.horizontal_square_zero = false;
      if (q + 2 <= qmax_ && !(vertical(p, q + 1) * vertical(p, q)).is_zero()) c.vertical_square_zero = false;
      if (p + 1 <= pmax_ && q + 1 <= qmax_ &&
          !(horizontal(p, q + 1) * vertical(p, q) == vertical(p + 1, q) * horizontal(p, q)))
        c.commute = false;
    }
  return c;
}

const TotalLayout::Block* TotalLayout::find(std::size_t p, std::size_t q) const {
  if (p + q >= degrees.size()) return nullptr;
  for (const auto& b : degrees[p + q])
    if (b.p == p) return &b;
  return nullptr;
}

CochainComplex totalize(const DoubleComplex& dc, TotalLayout* layout) {
  const Field f = dc.field();
  const std::size_t top = dc.pmax() + dc.qmax();
  TotalLayout lay;
  lay.degrees.resize(top + 1);
  std::vector<std::size_t> dims(top + 1, 0);
  for (std::size_t n = 0; n <= top; ++n) {
    std::size_t offset = 0;
    for (std::size_t p = 0; p <= n && p <= dc.pmax(); ++p) {
      std::size_t q = n - p;
      if (q > dc.qmax()) continue;
      std::size_t sz = dc.dim(p, q);
      lay.degrees[n].push_back({p, q, offset, sz});
      offset += sz;
    }
    dims[n] = offset;
  }
  std::vector<Matrix> ds;
  const Scalar one = Scalar::one(f), minus_one = -Scalar::one(f);
  for (std::size_t n = 0; n < top; ++n) {
    Matrix d(f, dims[n + 1], dims[n]);
    for (const auto& b : lay.degrees[n]) {
      if (b.size == 0) continue;
      if (const auto* h = lay.find(b.p + 1, b.q); h && h->size > 0)
        d.add_block(h->offset, b.offset, dc.horizontal(b.p, b.q), one);
      if (const auto* v = lay.find(b.p, b.q + 1); v && v->size > 0)
        d.add_block(v->offset, b.offset, dc.vertical(b.p, b.q), b.p % 2 == 0 ? one : minus_one);
    }
    ds.push_back(std::move(d));
  }
  if (layout) *layout = std::move(lay);
  return CochainComplex(f, 0, std::move(dims), std::move(ds));
}

}  // namespace hochdef
