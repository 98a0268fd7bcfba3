#include "hochdef/algebra.hpp"

#include <sstream>
#include <tuple>
#include <utility>

#include "hochdef/errors.hpp"

namespace hochdef {

namespace {

std::string vec_str(const Vector& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  os << ")";
  return os.str();
}

void require_size(bool ok, const std::string& what) {
  if (!ok) throw DimensionMismatch(what);
}

}  // namespace

// ---------------------------------------------------------------- Algebra

Algebra Algebra::unchecked(Field f, std::vector<std::string> labels, std::vector<Scalar> constants, Vector unit) {
  Algebra a;
  a.field_ = f;
  a.labels_ = std::move(labels);
  a.c_ = std::move(constants);
  a.unit_ = std::move(unit);
  const std::size_t n = a.labels_.size();
  require_size(a.c_.size() == n * n * n, "algebra: structure constant table must have dim^3 entries");
  require_size(a.unit_.size() == n, "algebra: unit vector has the wrong length");
  for (const auto& s : a.c_)
    if (!(s.field() == f)) throw FieldMismatch("algebra: structure constant over the wrong field");
  for (const auto& s : a.unit_)
    if (!(s.field() == f)) throw FieldMismatch("algebra: unit over the wrong field");
  a.build_caches();
  return a;
}

Algebra::Algebra(Field f, std::vector<std::string> labels, std::vector<Scalar> constants, Vector unit) {
  *this = unchecked(f, std::move(labels), std::move(constants), std::move(unit));
  if (auto err = check()) throw InvariantViolation("algebra: " + *err);
}

Algebra Algebra::from_products(Field f, std::vector<std::string> labels, const std::vector<std::vector<Vector>>& products,
                               Vector unit) {
  const std::size_t n = labels.size();
  require_size(products.size() == n, "algebra: product table has the wrong number of rows");
  std::vector<Scalar> c;
  c.reserve(n * n * n);
  for (std::size_t i = 0; i < n; ++i) {
    require_size(products[i].size() == n, "algebra: product table row has the wrong length");
    for (std::size_t j = 0; j < n; ++j) {
      require_size(products[i][j].size() == n, "algebra: product vector has the wrong length");
      for (std::size_t k = 0; k < n; ++k) c.push_back(products[i][j][k]);
    }
  }
  return Algebra(f, std::move(labels), std::move(c), std::move(unit));
}

void Algebra::build_caches() {
  const std::size_t n = dim();
  left_.assign(n, Matrix(field_, n, n));
  right_.assign(n, Matrix(field_, n, n));
  terms_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const Scalar& c = constant(i, j, k);
        if (c.is_zero()) continue;
        left_[i](k, j) = c;
        right_[j](k, i) = c;
        terms_[k].push_back({i, j, c});
      }
}

Vector Algebra::product(std::size_t i, std::size_t j) const {
  Vector v = zero_vector(field_, dim());
  for (std::size_t k = 0; k < dim(); ++k) v[k] = constant(i, j, k);
  return v;
}

Vector Algebra::multiply(const Vector& x, const Vector& y) const {
  require_size(x.size() == dim() && y.size() == dim(), "algebra: multiply with vectors of the wrong length");
  Vector out = zero_vector(field_, dim());
  for (std::size_t i = 0; i < dim(); ++i) {
    if (x[i].is_zero()) continue;
    for (std::size_t j = 0; j < dim(); ++j) {
      if (y[j].is_zero()) continue;
      Scalar xy = x[i] * y[j];
      for (std::size_t k = 0; k < dim(); ++k) {
        const Scalar& c = constant(i, j, k);
        if (!c.is_zero()) out[k] += xy * c;
      }
    }
  }
  return out;
}

Matrix Algebra::left_of(const Vector& a) const {
  Matrix m(field_, dim(), dim());
  for (std::size_t i = 0; i < dim(); ++i)
    if (!a[i].is_zero()) m.add_block(0, 0, left_[i], a[i]);
  return m;
}

Matrix Algebra::right_of(const Vector& a) const {
  Matrix m(field_, dim(), dim());
  for (std::size_t i = 0; i < dim(); ++i)
    if (!a[i].is_zero()) m.add_block(0, 0, right_[i], a[i]);
  return m;
}

bool Algebra::is_commutative() const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (!(left_[i] == right_[i])) return false;
  return true;
}

std::optional<Algebra::Triple> Algebra::associativity_failure() const {
  // (e_i e_j) e_k = e_i (e_j e_k)  <=>  R(e_k) L(e_i) = L(e_i) R(e_k) column j.
  for (std::size_t i = 0; i < dim(); ++i)
    for (std::size_t j = 0; j < dim(); ++j) {
      Vector ij = product(i, j);
      for (std::size_t k = 0; k < dim(); ++k) {
        Vector lhs = right_[k].apply(ij);
        Vector rhs = left_[i].apply(product(j, k));
        if (!(lhs == rhs)) return Triple{i, j, k};
      }
    }
  return std::nullopt;
}

std::optional<std::string> Algebra::check() const {
  if (auto t = associativity_failure()) {
    std::ostringstream os;
    os << "not associative at basis triple (" << t->i << "," << t->j << "," << t->k << ") = (" << labels_[t->i] << ","
       << labels_[t->j] << "," << labels_[t->k] << ")";
    return os.str();
  }
  for (std::size_t i = 0; i < dim(); ++i) {
    Vector e = basis_vector(i);
    if (!(multiply(unit_, e) == e) || !(multiply(e, unit_) == e))
      return "unit " + vec_str(unit_) + " does not act as identity on basis element " + labels_[i];
  }
  return std::nullopt;
}

bool operator==(const Algebra& a, const Algebra& b) {
  return a.field_ == b.field_ && a.labels_ == b.labels_ && a.c_ == b.c_ && a.unit_ == b.unit_;
}

// ---------------------------------------------------------------- AlgebraHom

AlgebraHom::AlgebraHom(Algebra source, Algebra target, Matrix map)
    : source_(std::move(source)), target_(std::move(target)), map_(std::move(map)) {
  require_size(map_.rows() == target_.dim() && map_.cols() == source_.dim(), "algebra hom: matrix shape");
  if (auto err = check()) throw InvariantViolation("algebra hom: " + *err);
}

AlgebraHom AlgebraHom::unchecked(Algebra source, Algebra target, Matrix map) {
  require_size(map.rows() == target.dim() && map.cols() == source.dim(), "algebra hom: matrix shape");
  AlgebraHom h;
  h.source_ = std::move(source);
  h.target_ = std::move(target);
  h.map_ = std::move(map);
  return h;
}

AlgebraHom AlgebraHom::identity(const Algebra& a) { return AlgebraHom(a, a, Matrix::identity(a.field(), a.dim())); }

std::optional<std::string> AlgebraHom::check() const {
  for (std::size_t i = 0; i < source_.dim(); ++i)
    for (std::size_t j = 0; j < source_.dim(); ++j) {
      Vector lhs = map_.apply(source_.product(i, j));
      Vector rhs = target_.multiply(map_.column(i), map_.column(j));
      if (!(lhs == rhs))
        return "not multiplicative on basis pair (" + source_.labels()[i] + "," + source_.labels()[j] + ")";
    }
  if (!(map_.apply(source_.unit()) == target_.unit())) return "does not send unit to unit";
  return std::nullopt;
}

AlgebraHom AlgebraHom::after(const AlgebraHom& first) const {
  if (!(first.target_ == source_)) throw PreconditionFailed("algebra hom composition: algebras do not match");
  return AlgebraHom(first.source_, target_, map_ * first.map_);
}

// ---------------------------------------------------------------- Bimodule

Bimodule Bimodule::unchecked(Algebra a, std::size_t dim, std::vector<Matrix> left, std::vector<Matrix> right) {
  Bimodule m;
  require_size(left.size() == a.dim() && right.size() == a.dim(), "bimodule: one action matrix per basis element");
  for (std::size_t i = 0; i < a.dim(); ++i)
    require_size(left[i].rows() == dim && left[i].cols() == dim && right[i].rows() == dim && right[i].cols() == dim,
                 "bimodule: action matrices must be dim x dim");
  m.algebra_ = std::move(a);
  m.dim_ = dim;
  m.left_ = std::move(left);
  m.right_ = std::move(right);
  return m;
}

Bimodule::Bimodule(Algebra a, std::size_t dim, std::vector<Matrix> left, std::vector<Matrix> right) {
  *this = unchecked(std::move(a), dim, std::move(left), std::move(right));
  if (auto err = check()) throw InvariantViolation("bimodule: " + *err);
}

Bimodule Bimodule::zero(const Algebra& a) {
  std::vector<Matrix> z(a.dim(), Matrix(a.field(), 0, 0));
  return unchecked(a, 0, z, z);
}

Matrix Bimodule::left_of(const Vector& a) const {
  Matrix m(field(), dim_, dim_);
  for (std::size_t i = 0; i < algebra_.dim(); ++i)
    if (!a[i].is_zero()) m.add_block(0, 0, left_[i], a[i]);
  return m;
}

Matrix Bimodule::right_of(const Vector& a) const {
  Matrix m(field(), dim_, dim_);
  for (std::size_t i = 0; i < algebra_.dim(); ++i)
    if (!a[i].is_zero()) m.add_block(0, 0, right_[i], a[i]);
  return m;
}

Bimodule Bimodule::pullback(const AlgebraHom& f) const {
  if (!(f.target() == algebra_)) throw PreconditionFailed("bimodule pullback: hom target is not the base algebra");
  std::vector<Matrix> l, r;
  for (std::size_t i = 0; i < f.source().dim(); ++i) {
    Vector img = f.matrix().column(i);
    l.push_back(left_of(img));
    r.push_back(right_of(img));
  }
  return unchecked(f.source(), dim_, std::move(l), std::move(r));
}

std::optional<std::string> Bimodule::check() const {
  const Algebra& a = algebra_;
  const auto& lab = a.labels();
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) {
      Vector ij = a.product(i, j), ji = a.product(j, i);
      if (!(left_[i] * left_[j] == left_of(ij))) return "left action not multiplicative at (" + lab[i] + "," + lab[j] + ")";
      if (!(right_[i] * right_[j] == right_of(ji)))
        return "right action not anti-multiplicative at (" + lab[i] + "," + lab[j] + ")";
      if (!(left_[i] * right_[j] == right_[j] * left_[i]))
        return "left and right actions do not commute at (" + lab[i] + "," + lab[j] + ")";
    }
  Matrix id = Matrix::identity(field(), dim_);
  if (!(left_of(a.unit()) == id)) return "unit does not act as identity on the left";
  if (!(right_of(a.unit()) == id)) return "unit does not act as identity on the right";
  return std::nullopt;
}

bool operator==(const Bimodule& a, const Bimodule& b) {
  return a.algebra_ == b.algebra_ && a.dim_ == b.dim_ && a.left_ == b.left_ && a.right_ == b.right_;
}

// ---------------------------------------------------------------- constructions

Algebra opposite(const Algebra& a) {
  const std::size_t n = a.dim();
  std::vector<Scalar> c;
  c.reserve(n * n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) c.push_back(a.constant(j, i, k));
  return Algebra::unchecked(a.field(), a.labels(), std::move(c), a.unit());
}

Algebra tensor(const Algebra& a, const Algebra& b) {
  if (!(a.field() == b.field())) throw FieldMismatch("tensor of algebras over different fields");
  const std::size_t na = a.dim(), nb = b.dim(), n = na * nb;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) labels.push_back(a.labels()[i] + "_" + b.labels()[j]);
  std::vector<Scalar> c(n * n * n, Scalar::zero(a.field()));
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t i2 = 0; i2 < na; ++i2)
      for (std::size_t k = 0; k < na; ++k) {
        const Scalar& ca = a.constant(i, i2, k);
        if (ca.is_zero()) continue;
        for (std::size_t j = 0; j < nb; ++j)
          for (std::size_t j2 = 0; j2 < nb; ++j2)
            for (std::size_t l = 0; l < nb; ++l) {
              const Scalar& cb = b.constant(j, j2, l);
              if (cb.is_zero()) continue;
              c[((i * nb + j) * n + (i2 * nb + j2)) * n + (k * nb + l)] = ca * cb;
            }
      }
  Vector unit = zero_vector(a.field(), n);
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) unit[i * nb + j] = a.unit()[i] * b.unit()[j];
  return Algebra::unchecked(a.field(), std::move(labels), std::move(c), std::move(unit));
}

Algebra enveloping(const Algebra& a) { return tensor(a, opposite(a)); }

Bimodule regular_bimodule(const Algebra& a) {
  std::vector<Matrix> l, r;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    l.push_back(a.left(i));
    r.push_back(a.right(i));
  }
  return Bimodule::unchecked(a, a.dim(), std::move(l), std::move(r));
}

bool is_symmetric(const Bimodule& m) {
  for (std::size_t i = 0; i < m.algebra().dim(); ++i)
    if (!(m.left(i) == m.right(i))) return false;
  return true;
}

Bimodule direct_sum(const Bimodule& m, const Bimodule& n) {
  if (!(m.algebra() == n.algebra())) throw PreconditionFailed("direct sum of bimodules over different algebras");
  std::vector<Matrix> l, r;
  for (std::size_t i = 0; i < m.algebra().dim(); ++i) {
    l.push_back(Matrix::direct_sum(m.left(i), n.left(i)));
    r.push_back(Matrix::direct_sum(m.right(i), n.right(i)));
  }
  return Bimodule::unchecked(m.algebra(), m.dim() + n.dim(), std::move(l), std::move(r));
}

Algebra change_basis(const Algebra& a, const Matrix& p) {
  const std::size_t n = a.dim();
  Matrix pinv = inverse(p);
  std::vector<Scalar> c;
  c.reserve(n * n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Vector prod = pinv.apply(a.multiply(p.column(i), p.column(j)));
      for (std::size_t k = 0; k < n; ++k) c.push_back(prod[k]);
    }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("f" + std::to_string(i));
  return Algebra::unchecked(a.field(), std::move(labels), std::move(c), pinv.apply(a.unit()));
}

Bimodule change_basis(const Bimodule& m, const Matrix& pa, const Matrix& pm) {
  Algebra b = change_basis(m.algebra(), pa);
  Matrix inv = inverse(pm);
  std::vector<Matrix> l, r;
  for (std::size_t i = 0; i < b.dim(); ++i) {
    Vector img = pa.column(i);
    l.push_back(inv * m.left_of(img) * pm);
    r.push_back(inv * m.right_of(img) * pm);
  }
  return Bimodule::unchecked(std::move(b), m.dim(), std::move(l), std::move(r));
}

// ---------------------------------------------------------------- standard algebras

namespace algebras {

namespace {

Algebra from_rule(Field f, std::vector<std::string> labels, Vector unit,
                  const std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>& nonzero) {
  const std::size_t n = labels.size();
  std::vector<Scalar> c(n * n * n, Scalar::zero(f));
  for (auto [i, j, k] : nonzero) c[(i * n + j) * n + k] = Scalar::one(f);
  return Algebra(f, std::move(labels), std::move(c), std::move(unit));
}

}  // namespace

Algebra ground(Field f) { return from_rule(f, {"1"}, {Scalar::one(f)}, {{0, 0, 0}}); }

Algebra dual_numbers(Field f) { return truncated_polynomial(f, 2); }

Algebra truncated_polynomial(Field f, std::size_t n) {
  if (n == 0) throw PreconditionFailed("truncated polynomial algebra needs n >= 1");
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(i == 0 ? "1" : i == 1 ? "x" : "x" + std::to_string(i));
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> nz;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; i + j < n; ++j) nz.emplace_back(i, j, i + j);
  return from_rule(f, std::move(labels), unit_vector(f, n, 0), nz);
}

Algebra upper_triangular(Field f) {
  // e1 = E11, e2 = E22, x = E12.
  Vector unit = {Scalar::one(f), Scalar::one(f), Scalar::zero(f)};
  return from_rule(f, {"e1", "e2", "x"}, unit, {{0, 0, 0}, {1, 1, 1}, {0, 2, 2}, {2, 1, 2}});
}

Algebra matrix_algebra(Field f, std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) labels.push_back("E" + std::to_string(i + 1) + std::to_string(j + 1));
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> nz;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l) nz.emplace_back(i * n + j, j * n + l, i * n + l);
  Vector unit = zero_vector(f, n * n);
  for (std::size_t i = 0; i < n; ++i) unit[i * n + i] = Scalar::one(f);
  return from_rule(f, std::move(labels), std::move(unit), nz);
}

Algebra diagonal(Field f, std::size_t n) {
  std::vector<std::string> labels;
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> nz;
  Vector unit(n, Scalar::one(f));
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("p" + std::to_string(i + 1));
    nz.emplace_back(i, i, i);
  }
  return from_rule(f, std::move(labels), std::move(unit), nz);
}

Algebra product(const Algebra& a, const Algebra& b) {
  if (!(a.field() == b.field())) throw FieldMismatch("product of algebras over different fields");
  const std::size_t na = a.dim(), n = a.dim() + b.dim();
  std::vector<Scalar> c(n * n * n, Scalar::zero(a.field()));
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < na; ++j)
      for (std::size_t k = 0; k < na; ++k) c[(i * n + j) * n + k] = a.constant(i, j, k);
  for (std::size_t i = 0; i < b.dim(); ++i)
    for (std::size_t j = 0; j < b.dim(); ++j)
      for (std::size_t k = 0; k < b.dim(); ++k) c[((na + i) * n + na + j) * n + na + k] = b.constant(i, j, k);
  std::vector<std::string> labels = a.labels();
  for (const auto& l : b.labels()) labels.push_back(l + "'");
  return Algebra(a.field(), std::move(labels), std::move(c), concat(a.unit(), b.unit()));
}

}  // namespace algebras

}  // namespace hochdef
