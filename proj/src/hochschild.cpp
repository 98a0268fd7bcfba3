#include "hochdef/hochschild.hpp"

#include <string>
#include <utility>

#include "hochdef/errors.hpp"

namespace hochdef {

std::size_t cochain_dim(std::size_t dim_a, std::size_t dim_m, int q, std::size_t cap) {
  if (q < 0) throw PreconditionFailed("cochain degree must be non-negative");
  std::size_t d = dim_m;
  for (int i = 0; i < q && d > 0; ++i) {
    if (dim_a != 0 && d > cap / dim_a) d = cap + 1;
    else d *= dim_a;
    if (d > cap) break;
  }
  if (d > cap)
    throw CapExceeded("cochain space Hom(A^" + std::to_string(q) + ", M) exceeds the size cap of " + std::to_string(cap) +
                      " coordinates");
  return d;
}

std::size_t tuple_index(const std::vector<std::size_t>& t, std::size_t n) {
  std::size_t idx = 0;
  for (std::size_t x : t) idx = idx * n + x;
  return idx;
}

Matrix bar_differential(const Algebra& a, const Bimodule& m, int q, std::size_t cap) {
  const Field f = a.field();
  const std::size_t n = a.dim(), dm = m.dim();
  const std::size_t cols = cochain_dim(n, dm, q, cap), rows = cochain_dim(n, dm, q + 1, cap);
  Matrix d(f, rows, cols);
  if (rows == 0 || cols == 0) return d;
  const std::size_t uq = static_cast<std::size_t>(q);
  std::vector<std::size_t> pw(uq + 2, 1);
  for (std::size_t k = 1; k < pw.size(); ++k) pw[k] = pw[k - 1] * n;
  const std::size_t tuples = pw[uq];

  for (std::size_t t = 0; t < tuples; ++t) {
    for (std::size_t r = 0; r < dm; ++r) {
      const std::size_t col = t * dm + r;
      // a_0 phi(a_1, ..., a_q)
      for (std::size_t s0 = 0; s0 < n; ++s0) {
        const Matrix& l = m.left(s0);
        const std::size_t row0 = (s0 * tuples + t) * dm;
        for (std::size_t k = 0; k < dm; ++k)
          if (!l(k, r).is_zero()) d(row0 + k, col) += l(k, r);
      }
      // (-1)^{i+1} phi(..., a_i a_{i+1}, ...)
      for (std::size_t i = 0; i < uq; ++i) {
        const std::size_t prefix = t / pw[uq - i];
        const std::size_t ti = (t / pw[uq - 1 - i]) % n;
        const std::size_t suffix = t % pw[uq - 1 - i];
        const bool negative = (i % 2 == 0);
        for (const auto& term : a.terms_into(ti)) {
          const std::size_t s = prefix * pw[uq + 1 - i] + term.x * pw[uq - i] + term.y * pw[uq - 1 - i] + suffix;
          if (negative) d(s * dm + r, col) -= term.c;
          else d(s * dm + r, col) += term.c;
        }
      }
      // (-1)^{q+1} phi(a_0, ..., a_{q-1}) a_q
      const bool negative = (uq % 2 == 0);
      for (std::size_t sq = 0; sq < n; ++sq) {
        const Matrix& rt = m.right(sq);
        const std::size_t row0 = (t * n + sq) * dm;
        for (std::size_t k = 0; k < dm; ++k) {
          if (rt(k, r).is_zero()) continue;
          if (negative) d(row0 + k, col) -= rt(k, r);
          else d(row0 + k, col) += rt(k, r);
        }
      }
    }
  }
  return d;
}

CochainComplex bar_cochain_complex(const Algebra& a, const Bimodule& m, int qmax, std::size_t cap) {
  if (qmax < 0) throw PreconditionFailed("bar complex needs qmax >= 0");
  std::vector<std::size_t> dims;
  std::vector<Matrix> ds;
  for (int q = 0; q <= qmax; ++q) dims.push_back(cochain_dim(a.dim(), m.dim(), q, cap));
  for (int q = 0; q < qmax; ++q) ds.push_back(bar_differential(a, m, q, cap));
  return CochainComplex(a.field(), 0, std::move(dims), std::move(ds));
}

Cohomology hh(const Algebra& a, const Bimodule& m, int q, std::size_t cap) {
  if (q < 0) throw PreconditionFailed("Hochschild degree must be non-negative");
  return cohomology(bar_cochain_complex(a, m, q + 1, cap), q);
}

CohomologySpace hh_space(const Algebra& a, const Bimodule& m, int q, bool track_preimages, std::size_t cap) {
  if (q < 0) throw PreconditionFailed("Hochschild degree must be non-negative");
  return CohomologySpace(bar_cochain_complex(a, m, q + 1, cap), q, track_preimages);
}

// ---------------------------------------------------------------- center, derivations

std::vector<Vector> center(const Bimodule& m) {
  const std::size_t n = m.algebra().dim(), dm = m.dim();
  Matrix eq(m.field(), n * dm, dm);
  for (std::size_t i = 0; i < n; ++i) eq.set_block(i * dm, 0, m.left(i) - m.right(i));
  return kernel_basis(eq);
}

Matrix inner_derivation(const Bimodule& m, const Vector& v) {
  const std::size_t n = m.algebra().dim();
  Matrix d(m.field(), m.dim(), n);
  for (std::size_t i = 0; i < n; ++i) d.set_column(i, m.left(i).apply(v) - m.right(i).apply(v));
  return d;
}

Derivations derivations(const Bimodule& m) {
  const Algebra& a = m.algebra();
  const Field f = a.field();
  const std::size_t n = a.dim(), dm = m.dim();
  // Unknown D with D[r][c] at c * dm + r; row ((i n + j) dm + k) encodes
  // d(e_i e_j) - e_i d(e_j) - d(e_i) e_j = 0 in component k.
  Matrix eq(f, n * n * dm, n * dm);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t row0 = (i * n + j) * dm;
      for (std::size_t c = 0; c < n; ++c) {
        const Scalar& cij = a.constant(i, j, c);
        if (cij.is_zero()) continue;
        for (std::size_t k = 0; k < dm; ++k) eq(row0 + k, c * dm + k) += cij;
      }
      for (std::size_t k = 0; k < dm; ++k)
        for (std::size_t r = 0; r < dm; ++r) {
          if (!m.left(i)(k, r).is_zero()) eq(row0 + k, j * dm + r) -= m.left(i)(k, r);
          if (!m.right(j)(k, r).is_zero()) eq(row0 + k, i * dm + r) -= m.right(j)(k, r);
        }
    }
  Derivations out;
  for (const auto& v : kernel_basis(eq)) out.der.push_back(Matrix::unvectorize(v, dm, n));
  Matrix inner_map(f, n * dm, dm);
  for (std::size_t r = 0; r < dm; ++r) inner_map.set_column(r, inner_derivation(m, unit_vector(f, dm, r)).vectorize());
  for (const auto& v : column_space_basis(inner_map)) out.inner.push_back(Matrix::unvectorize(v, dm, n));
  out.outer_dim = out.der.size() - out.inner.size();
  return out;
}

// ---------------------------------------------------------------- extensions

ExtensionDatum::ExtensionDatum(Algebra a, Bimodule m, Algebra b) : m_(std::move(m)), b_(std::move(b)) {
  if (!(m_.algebra() == a)) throw PreconditionFailed("extension: bimodule is not over the given algebra");
  if (auto err = check()) throw InvariantViolation("extension: " + *err);
}

std::optional<std::string> ExtensionDatum::check() const {
  const Algebra& a = base();
  const std::size_t n = dim_a(), dm = dim_m(), N = n + dm;
  if (b_.dim() != N) return "total algebra has dimension " + std::to_string(b_.dim()) + ", expected " + std::to_string(N);
  if (!(b_.field() == a.field())) return "total algebra over a different field";
  if (auto err = b_.check()) return "total algebra: " + *err;
  if (!(slice(b_.unit(), 0, n) == a.unit())) return "projection does not preserve the unit";
  for (std::size_t x = 0; x < N; ++x)
    for (std::size_t y = 0; y < N; ++y) {
      Vector p = b_.product(x, y);
      Vector top = slice(p, 0, n), bottom = slice(p, n, dm);
      if (x < n && y < n) {
        if (!(top == a.product(x, y))) return "projection is not multiplicative on (" + b_.labels()[x] + "," + b_.labels()[y] + ")";
      } else if (!is_zero(top)) {
        return "M is not an ideal: (" + b_.labels()[x] + "," + b_.labels()[y] + ") leaves M";
      } else if (x >= n && y >= n) {
        if (!is_zero(bottom)) return "M * M is not zero";
      } else if (x < n) {
        if (!(bottom == m_.left(x).column(y - n))) return "left action on M differs from the bimodule";
      } else if (!(bottom == m_.right(y).column(x - n))) {
        return "right action on M differs from the bimodule";
      }
    }
  return std::nullopt;
}

Matrix ExtensionDatum::canonical_section() const {
  Matrix s(base().field(), dim_a() + dim_m(), dim_a());
  s.set_block(0, 0, Matrix::identity(base().field(), dim_a()));
  return s;
}

Vector ExtensionDatum::twist() const {
  const std::size_t n = dim_a(), dm = dim_m();
  Vector w = zero_vector(base().field(), n * n * dm);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Vector p = b_.product(i, j);
      for (std::size_t r = 0; r < dm; ++r) w[(i * n + j) * dm + r] = p[n + r];
    }
  return w;
}

namespace {

void require_section(const ExtensionDatum& e, const Matrix& s) {
  const std::size_t n = e.dim_a();
  if (s.rows() != n + e.dim_m() || s.cols() != n) throw DimensionMismatch("section has the wrong shape");
  if (!s.block(0, 0, n, n).is_identity()) throw PreconditionFailed("map A -> B is not a section of the projection");
}

}  // namespace

Vector extension_to_cocycle(const ExtensionDatum& e, const Matrix& s) {
  require_section(e, s);
  const Algebra& a = e.base();
  const Algebra& b = e.total();
  const std::size_t n = e.dim_a(), dm = e.dim_m();
  Vector z = zero_vector(a.field(), n * n * dm);
  std::vector<Vector> cols;
  for (std::size_t i = 0; i < n; ++i) cols.push_back(s.column(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Vector v = s.apply(a.product(i, j)) - b.multiply(cols[i], cols[j]);
      for (std::size_t r = 0; r < dm; ++r) z[(i * n + j) * dm + r] = v[n + r];
    }
  return z;
}

ExtensionDatum cocycle_to_extension(const Bimodule& m, const Vector& z) {
  const Algebra& a = m.algebra();
  const Field f = a.field();
  const std::size_t n = a.dim(), dm = m.dim(), N = n + dm;
  if (z.size() != n * n * dm) throw DimensionMismatch("2-cochain has the wrong number of coordinates");
  if (!is_zero(bar_differential(a, m, 2).apply(z)))
    throw PreconditionFailed("2-cochain is not a cocycle; the extension would not be associative");
  std::vector<Scalar> c(N * N * N, Scalar::zero(f));
  auto at = [&](std::size_t i, std::size_t j, std::size_t k) -> Scalar& { return c[(i * N + j) * N + k]; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) at(i, j, k) = a.constant(i, j, k);
      for (std::size_t r = 0; r < dm; ++r) at(i, j, n + r) = -z[(i * n + j) * dm + r];
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dm; ++j)
      for (std::size_t k = 0; k < dm; ++k) {
        at(i, n + j, n + k) = m.left(i)(k, j);
        at(n + j, i, n + k) = m.right(i)(k, j);
      }
  Vector u11 = zero_vector(f, dm);
  const Vector& u = a.unit();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Scalar uu = u[i] * u[j];
      if (uu.is_zero()) continue;
      for (std::size_t r = 0; r < dm; ++r) u11[r] += uu * z[(i * n + j) * dm + r];
    }
  std::vector<std::string> labels = a.labels();
  for (std::size_t r = 0; r < dm; ++r) labels.push_back("m" + std::to_string(r + 1));
  return ExtensionDatum(a, m, Algebra(f, std::move(labels), std::move(c), concat(u, u11)));
}

ExtensionDatum split_extension(const Bimodule& m) {
  const std::size_t n = m.algebra().dim();
  return cocycle_to_extension(m, zero_vector(m.field(), n * n * m.dim()));
}

bool is_multiplicative_section(const ExtensionDatum& e, const Matrix& s) {
  require_section(e, s);
  const Algebra& a = e.base();
  const Algebra& b = e.total();
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (!(s.apply(a.product(i, j)) == b.multiply(s.column(i), s.column(j)))) return false;
  return s.apply(a.unit()) == b.unit();
}

SplitResult is_split(const ExtensionDatum& e) {
  const Algebra& a = e.base();
  const std::size_t n = e.dim_a(), dm = e.dim_m();
  Matrix s = e.canonical_section();
  Vector z = extension_to_cocycle(e, s);
  CohomologySpace h2 = hh_space(a, e.module(), 2, true);
  SplitResult out;
  out.hh2_class = h2.classify(z);
  auto h = h2.coboundary_preimage(z);
  out.split = h.has_value();
  if (h) {
    // Z_{s+h} = Z_s - dh, so dh = Z_s gives a multiplicative section.
    s.set_block(n, 0, Matrix::unvectorize(*h, dm, n));
    if (!is_multiplicative_section(e, s)) throw InvariantViolation("is_split: corrected section is not multiplicative");
    out.section = std::move(s);
  }
  return out;
}

Matrix split_automorphism(const Bimodule& m, const Matrix& d) {
  const std::size_t n = m.algebra().dim();
  Matrix alpha = Matrix::identity(m.field(), n + m.dim());
  alpha.set_block(n, 0, d);
  return alpha;
}

SplitAutomorphisms split_automorphisms(const Bimodule& m) {
  SplitAutomorphisms out;
  out.derivations = derivations(m);
  ExtensionDatum e = split_extension(m);
  const Algebra& b = e.total();
  out.verified = true;
  for (const auto& d : out.derivations.der) {
    Matrix alpha = split_automorphism(m, d);
    for (std::size_t x = 0; x < b.dim() && out.verified; ++x)
      for (std::size_t y = 0; y < b.dim() && out.verified; ++y)
        if (!(alpha.apply(b.product(x, y)) == b.multiply(alpha.column(x), alpha.column(y)))) out.verified = false;
    if (!(alpha.apply(b.unit()) == b.unit()) || !is_invertible(alpha)) out.verified = false;
    out.automorphisms.push_back(std::move(alpha));
  }
  return out;
}

// ---------------------------------------------------------------- k_n algebras

namespace {

std::vector<std::string> adapted_labels(const Algebra& a, std::size_t order) {
  std::vector<std::string> labels;
  for (std::size_t j = 0; j <= order; ++j)
    for (const auto& l : a.labels())
      labels.push_back(j == 0 ? l : j == 1 ? l + "t" : l + "t^" + std::to_string(j));
  return labels;
}

}  // namespace

KnAlgebra::KnAlgebra(Algebra reference, std::size_t order, Algebra total)
    : ref_(std::move(reference)), n_(order), b_(std::move(total)) {
  if (auto err = check()) throw InvariantViolation("k_n-algebra: " + *err);
}

Matrix KnAlgebra::shift() const {
  const std::size_t d = block(), N = b_.dim();
  Matrix t(ref_.field(), N, N);
  for (std::size_t i = 0; i + d < N; ++i) t(i + d, i) = Scalar::one(ref_.field());
  return t;
}

std::optional<std::string> KnAlgebra::check() const {
  const std::size_t d = block(), N = (n_ + 1) * d;
  if (b_.dim() != N) return "total dimension " + std::to_string(b_.dim()) + " is not (order + 1) * dim A";
  if (!(b_.field() == ref_.field())) return "total algebra over a different field";
  if (auto err = b_.check()) return *err;
  Matrix t = shift();
  for (std::size_t x = 0; x < N; ++x)
    for (std::size_t y = 0; y < N; ++y) {
      Vector txy = t.apply(b_.product(x, y));
      Vector tx_y = x + d < N ? b_.product(x + d, y) : zero_vector(ref_.field(), N);
      Vector x_ty = y + d < N ? b_.product(x, y + d) : zero_vector(ref_.field(), N);
      if (!(txy == tx_y) || !(txy == x_ty))
        return "product is not k_n-bilinear at (" + b_.labels()[x] + "," + b_.labels()[y] + ")";
    }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (!(slice(b_.product(i, j), 0, d) == ref_.product(i, j)))
        return "product modulo t differs from the reference algebra at (" + ref_.labels()[i] + "," + ref_.labels()[j] + ")";
  if (!(slice(b_.unit(), 0, d) == ref_.unit())) return "unit modulo t differs from the reference unit";
  return std::nullopt;
}

KnAlgebra KnAlgebra::from_cochains(const Algebra& a, std::size_t order, const std::vector<Vector>& mu, const Vector& unit) {
  const Field f = a.field();
  const std::size_t d = a.dim(), N = (order + 1) * d;
  if (mu.size() > order) throw PreconditionFailed("more deformation cochains than the order allows");
  for (const auto& m : mu)
    if (m.size() != d * d * d) throw DimensionMismatch("deformation cochain has the wrong number of coordinates");
  if (unit.size() != N) throw DimensionMismatch("k_n-algebra unit has the wrong length");
  auto mu_at = [&](std::size_t l, std::size_t i, std::size_t j, std::size_t k) -> Scalar {
    if (l == 0) return a.constant(i, j, k);
    return mu[l - 1][(i * d + j) * d + k];
  };
  std::vector<Scalar> c(N * N * N, Scalar::zero(f));
  for (std::size_t p = 0; p <= order; ++p)
    for (std::size_t q = 0; p + q <= order; ++q)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          for (std::size_t l = 0; p + q + l <= order && l <= mu.size(); ++l)
            for (std::size_t k = 0; k < d; ++k) {
              Scalar v = mu_at(l, i, j, k);
              if (!v.is_zero()) c[((p * d + i) * N + (q * d + j)) * N + (p + q + l) * d + k] += v;
            }
  return KnAlgebra(a, order, Algebra(f, adapted_labels(a, order), std::move(c), unit));
}

KnAlgebra KnAlgebra::trivial(const Algebra& a, std::size_t order) {
  Vector unit = zero_vector(a.field(), (order + 1) * a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) unit[i] = a.unit()[i];
  return from_cochains(a, order, {}, unit);
}

KnAlgebra KnAlgebra::truncation(std::size_t m) const {
  if (m > n_) throw PreconditionFailed("truncation order exceeds the order of the algebra");
  const std::size_t N = (m + 1) * block(), full = b_.dim();
  std::vector<Scalar> c;
  c.reserve(N * N * N);
  for (std::size_t x = 0; x < N; ++x)
    for (std::size_t y = 0; y < N; ++y)
      for (std::size_t k = 0; k < N; ++k) c.push_back(b_.constants()[(x * full + y) * full + k]);
  std::vector<std::string> labels(b_.labels().begin(), b_.labels().begin() + static_cast<std::ptrdiff_t>(N));
  return KnAlgebra(ref_, m, Algebra(ref_.field(), std::move(labels), std::move(c), slice(b_.unit(), 0, N)));
}

Vector KnAlgebra::cochain(std::size_t l) const {
  if (l > n_) throw PreconditionFailed("cochain index exceeds the order");
  const std::size_t d = block();
  Vector mu = zero_vector(ref_.field(), d * d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      Vector p = b_.product(i, j);
      for (std::size_t k = 0; k < d; ++k) mu[(i * d + j) * d + k] = p[l * d + k];
    }
  return mu;
}

namespace {

// mu_l = 0 and unit has no t^l component for 0 < l < order.
bool truncation_is_literal(const KnAlgebra& b) {
  const std::size_t d = b.block();
  for (std::size_t l = 1; l < b.order(); ++l) {
    if (!is_zero(b.cochain(l))) return false;
    if (!is_zero(slice(b.total().unit(), l * d, d))) return false;
  }
  return true;
}

}  // namespace

ExtensionDatum defn_reduce(const KnAlgebra& b) {
  const std::size_t n = b.order(), d = b.block();
  if (n == 0) throw PreconditionFailed("defn_reduce needs order >= 1");
  if (!truncation_is_literal(b))
    throw PreconditionFailed("the truncation B/t^n B is not the trivial deformation A (x) k_{n-1}");
  const Algebra& a = b.reference();
  const Algebra& big = b.total();
  const Field f = a.field();
  auto embed = [&](std::size_t x) { return x < d ? x : n * d + (x - d); };
  std::vector<Scalar> c;
  c.reserve(8 * d * d * d);
  for (std::size_t x = 0; x < 2 * d; ++x)
    for (std::size_t y = 0; y < 2 * d; ++y) {
      Vector p = big.product(embed(x), embed(y));
      for (std::size_t k = 0; k < d; ++k) c.push_back(p[k]);
      for (std::size_t k = 0; k < d; ++k) c.push_back(p[n * d + k]);
    }
  std::vector<std::string> labels = a.labels();
  for (const auto& l : a.labels()) labels.push_back(l + "t^" + std::to_string(n));
  Vector unit = concat(slice(big.unit(), 0, d), slice(big.unit(), n * d, d));
  return ExtensionDatum(a, regular_bimodule(a), Algebra(f, std::move(labels), std::move(c), std::move(unit)));
}

KnAlgebra defn_lift(const ExtensionDatum& e, std::size_t order) {
  if (order == 0) throw PreconditionFailed("defn_lift needs order >= 1");
  const Algebra& a = e.base();
  if (!(e.module() == regular_bimodule(a))) throw PreconditionFailed("defn_lift needs an extension of A by A");
  const std::size_t d = a.dim();
  std::vector<Vector> mu(order, zero_vector(a.field(), d * d * d));
  mu[order - 1] = e.twist();
  Vector unit = zero_vector(a.field(), (order + 1) * d);
  for (std::size_t i = 0; i < d; ++i) {
    unit[i] = e.total().unit()[i];
    unit[order * d + i] = e.total().unit()[d + i];
  }
  return KnAlgebra::from_cochains(a, order, mu, unit);
}

Triviality kn_triviality(const KnAlgebra& b) {
  const std::size_t n = b.order(), d = b.block();
  const Algebra& a = b.reference();
  Triviality out;
  if (n == 0) {
    out.decided = out.trivial = true;
    out.method = "order0";
    out.section = Matrix::identity(a.field(), d);
    return out;
  }
  if (truncation_is_literal(b)) {
    SplitResult r = is_split(defn_reduce(b));
    out.decided = true;
    out.method = "reduction";
    out.trivial = r.split;
    if (r.split) {
      // sigma(a) = (a, h(a)) becomes s(a) = a + h(a) t^n.
      Matrix s(a.field(), (n + 1) * d, d);
      s.set_block(0, 0, Matrix::identity(a.field(), d));
      s.set_block(n * d, 0, r.section->block(d, 0, d, d));
      const Algebra& big = b.total();
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          if (!(s.apply(a.product(i, j)) == big.multiply(s.column(i), s.column(j))))
            throw InvariantViolation("kn_triviality: lifted section is not multiplicative");
      if (!(s.apply(a.unit()) == big.unit())) throw InvariantViolation("kn_triviality: lifted section is not unital");
      out.section = std::move(s);
    }
    return out;
  }
  if (hh(a, regular_bimodule(a), 2).dim == 0) {
    out.decided = out.trivial = true;
    out.method = "hh2_vanishes";
    return out;
  }
  out.method = "undecided";
  return out;
}

}  // namespace hochdef
