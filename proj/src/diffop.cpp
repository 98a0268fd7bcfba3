#include "hochdef/diffop.hpp"

#include <algorithm>

#include "hochdef/errors.hpp"

namespace hochdef {

namespace {

Matrix columns_of(Field f, std::size_t rows, const std::vector<Matrix>& ops) {
  std::vector<Vector> cols;
  for (const Matrix& d : ops) cols.push_back(d.vectorize());
  return Matrix::from_columns(f, rows, cols);
}

// Rows spanning the annihilator of the column space of b.
Matrix annihilator(Field f, const Matrix& b, std::size_t n) {
  if (b.cols() == 0) return Matrix::identity(f, n);
  std::vector<Vector> rows = kernel_basis(b.transpose());
  Matrix p(f, rows.size(), n);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) = rows[i][j];
  return p;
}

Matrix power(const Matrix& m, std::size_t e) {
  Matrix out = Matrix::identity(m.field(), m.rows());
  for (std::size_t i = 0; i < e; ++i) out = m * out;
  return out;
}

// Coordinates of v in the span of the given columns; nullopt outside it.
std::optional<Vector> coordinates(const Matrix& basis, const Vector& v) { return solve(basis, v); }

std::vector<Matrix> left_actions(const Algebra& a) {
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < a.dim(); ++i) out.push_back(a.left(i));
  return out;
}

}  // namespace

std::size_t default_order_cap(std::size_t dim) { return 2 * dim * dim; }

std::size_t DiffOpFiltration::dim(std::size_t m) const { return orders[std::min(m, top_order())].size(); }

std::vector<std::size_t> DiffOpFiltration::dims() const {
  std::vector<std::size_t> out;
  for (const auto& o : orders) out.push_back(o.size());
  return out;
}

bool DiffOpFiltration::contains(std::size_t m, const Matrix& d) const {
  const auto& basis = orders[std::min(m, top_order())];
  return coordinates(columns_of(field, dim_source * dim_target, basis), d.vectorize()).has_value();
}

DiffOpFiltration diffops(Field f, const std::vector<Matrix>& act_m, const std::vector<Matrix>& act_n, std::size_t order_cap,
                         const std::vector<std::pair<Matrix, Matrix>>& linear_over) {
  if (act_m.size() != act_n.size()) throw DimensionMismatch("diffops: one action per basis element on both modules");
  if (act_m.empty()) throw PreconditionFailed("diffops: the algebra has no basis");
  const std::size_t dm = act_m[0].cols(), dn = act_n[0].rows(), n = dm * dn;
  const Matrix im = Matrix::identity(f, dm), in = Matrix::identity(f, dn);
  // vec(Y d) = (I (x) Y) vec d and vec(d X) = (X^T (x) I) vec d.
  Matrix w = Matrix::identity(f, n);
  if (!linear_over.empty()) {
    Matrix eq(f, 0, n);
    for (const auto& [x, y] : linear_over) eq = Matrix::vstack(eq, kronecker(x.transpose(), in) - kronecker(im, y));
    w = kernel_matrix(eq);
  }
  std::vector<Matrix> commutators;
  for (std::size_t i = 0; i < act_m.size(); ++i)
    commutators.push_back((kronecker(im, act_n[i]) - kronecker(act_m[i].transpose(), in)) * w);

  DiffOpFiltration out;
  out.field = f;
  out.dim_source = dm;
  out.dim_target = dn;
  out.ambient = w.cols();
  Matrix prev(f, n, 0);
  for (std::size_t m = 0; m <= order_cap; ++m) {
    const Matrix p = annihilator(f, prev, n);
    Matrix sys(f, 0, w.cols());
    for (const Matrix& c : commutators) sys = Matrix::vstack(sys, p * c);
    Matrix next = w * kernel_matrix(sys);
    if (m > 0 && next.cols() == prev.cols()) {
      out.stabilized = true;
      return out;
    }
    std::vector<Matrix> basis;
    for (std::size_t k = 0; k < next.cols(); ++k) basis.push_back(Matrix::unvectorize(next.column(k), dn, dm));
    out.orders.push_back(std::move(basis));
    prev = std::move(next);
  }
  return out;
}

DiffOpFiltration diffops(const Algebra& c, std::size_t order_cap) {
  if (order_cap == 0) order_cap = default_order_cap(c.dim());
  const auto act = left_actions(c);
  return diffops(c.field(), act, act, order_cap);
}

DiffOpFiltration diffops(const KnAlgebra& b, std::size_t order_cap) {
  const Algebra& big = b.total();
  if (order_cap == 0) order_cap = default_order_cap(big.dim());
  const auto act = left_actions(big);
  const Matrix t = b.shift();
  return diffops(big.field(), act, act, order_cap, {{t, t}});
}

bool KnCompatReport::pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const KnCompatRow& r) { return r.pass(); });
}

KnCompatReport kn_compat_check(const Algebra& a, std::size_t n, std::size_t order_cap) {
  DiffOpFiltration base = diffops(a, order_cap);
  DiffOpFiltration big = diffops(KnAlgebra::trivial(a, n), order_cap);
  KnCompatReport r;
  r.stabilized = base.stabilized && big.stabilized;
  const std::size_t top = std::max(base.top_order(), big.top_order());
  for (std::size_t m = 0; m <= top; ++m) r.rows.push_back({m, big.dim(m), (n + 1) * base.dim(m)});
  return r;
}

// ---------------------------------------------------------------- gamma

GradedDiffMap gamma(const KnAlgebra& b, std::size_t order_cap) {
  const Algebra& a = b.reference();
  const Field f = a.field();
  const std::size_t r = a.dim(), n = b.order(), big = b.total().dim();
  GradedDiffMap g;
  g.order = n;
  g.source = diffops(b, order_cap);
  g.target = diffops(a, order_cap);
  g.target_dim = g.target.stable().size();
  const Matrix target_basis = columns_of(f, r * r, g.target.stable());

  // Reduction mod t lands in D^m(A) order by order.
  for (std::size_t m = 0; m <= g.source.top_order(); ++m)
    for (const Matrix& d : g.source.orders[m])
      if (!g.target.contains(m, d.block(0, 0, r, r))) g.lands_in_target = false;
  if (!g.lands_in_target) throw InvariantViolation("gamma: a reduction mod t is not a differential operator of the same order");

  const Matrix t = b.shift();
  for (std::size_t p = 0; p <= n; ++p) {
    const Matrix tp = power(t, p), tp1 = t * tp;
    SubspaceBasis lower(f, big * big);
    for (const Matrix& d : g.source.stable()) lower.add((tp1 * d).vectorize());
    std::vector<Vector> cols;
    for (const Matrix& d : g.source.stable()) {
      const Matrix x = tp * d;
      if (!lower.add(x.vectorize())) continue;
      auto c = coordinates(target_basis, x.block(p * r, 0, r, r).vectorize());
      if (!c) throw InvariantViolation("gamma: leading block outside D(A)");
      cols.push_back(std::move(*c));
    }
    g.source_dims.push_back(cols.size());
    Matrix gp = Matrix::from_columns(f, g.target_dim, cols);
    g.ranks.push_back(rank(gp));
    g.degree_maps.push_back(std::move(gp));
  }
  return g;
}

GammaCheck gamma_iso_check(const GradedDiffMap& g) {
  GammaCheck c;
  c.injective = c.surjective = true;
  for (std::size_t p = 0; p < g.ranks.size(); ++p) {
    c.injective = c.injective && g.ranks[p] == g.source_dims[p];
    c.surjective = c.surjective && g.ranks[p] == g.target_dim;
  }
  if (!g.source.stabilized || !g.target.stabilized) {
    c.outcome = "inconclusive";
    return c;
  }
  if (c.injective != c.surjective) throw InvariantViolation("gamma is injective or surjective but not both");
  c.outcome = c.injective ? "iso" : "neither";
  return c;
}

// ---------------------------------------------------------------- induced deformations

InducedDeformation induced_deformation(const KnAlgebra& b, std::size_t order_cap) {
  GradedDiffMap g = gamma(b, order_cap);
  if (gamma_iso_check(g).outcome != "iso") throw PreconditionFailed("B does not induce a deformation: gamma is not an isomorphism");
  const Algebra& a = b.reference();
  const Field f = a.field();
  const std::size_t r = a.dim(), n = b.order(), big = b.total().dim(), rd = g.target_dim;
  InducedDeformation out;
  out.reference_ops = g.target.stable();

  // Lift each d_i of D(A) to D(B) along the leading block.
  std::vector<Matrix> lead;
  for (const Matrix& d : g.source.stable()) lead.push_back(d.block(0, 0, r, r));
  const Matrix lead_cols = columns_of(f, r * r, lead);
  std::vector<Matrix> lifts;
  for (const Matrix& di : out.reference_ops) {
    auto y = coordinates(lead_cols, di.vectorize());
    if (!y) throw InvariantViolation("induced deformation: D(B) -> D(A) is not onto");
    Matrix lift(f, big, big);
    for (std::size_t k = 0; k < y->size(); ++k)
      if (!(*y)[k].is_zero()) lift.add_block(0, 0, g.source.stable()[k], (*y)[k]);
    lifts.push_back(std::move(lift));
  }
  const Matrix t = b.shift();
  const std::size_t total = (n + 1) * rd;
  SubspaceBasis basis(f, big * big, total);
  for (std::size_t j = 0; j <= n; ++j)
    for (std::size_t i = 0; i < rd; ++i) {
      out.operators.push_back(power(t, j) * lifts[i]);
      if (!basis.add(out.operators.back().vectorize(), unit_vector(f, total, j * rd + i)))
        throw InvariantViolation("induced deformation: t^j d_i are dependent");
    }
  auto coords = [&](const Matrix& x) {
    auto red = basis.reduce(x.vectorize());
    if (!is_zero(red.remainder)) throw InvariantViolation("induced deformation: D(B) is not closed under composition");
    return red.tag;
  };
  auto structure = [&](const std::vector<Matrix>& ops, auto&& coordinate_fn) {
    const std::size_t d = ops.size();
    std::vector<Scalar> c;
    c.reserve(d * d * d);
    for (std::size_t x = 0; x < d; ++x)
      for (std::size_t y = 0; y < d; ++y) {
        Vector v = coordinate_fn(ops[x] * ops[y]);
        c.insert(c.end(), v.begin(), v.end());
      }
    return c;
  };
  SubspaceBasis ref_basis(f, r * r, rd);
  for (std::size_t i = 0; i < rd; ++i) ref_basis.add(out.reference_ops[i].vectorize(), unit_vector(f, rd, i));
  auto ref_coords = [&](const Matrix& x) {
    auto red = ref_basis.reduce(x.vectorize());
    if (!is_zero(red.remainder)) throw InvariantViolation("induced deformation: D(A) is not closed under composition");
    return red.tag;
  };
  std::vector<std::string> ref_labels, labels;
  for (std::size_t i = 0; i < rd; ++i) ref_labels.push_back("d" + std::to_string(i));
  for (std::size_t j = 0; j <= n; ++j)
    for (std::size_t i = 0; i < rd; ++i) labels.push_back(j == 0 ? ref_labels[i] : ref_labels[i] + "t" + std::to_string(j));
  Algebra reference(f, ref_labels, structure(out.reference_ops, ref_coords), ref_coords(Matrix::identity(f, r)));
  Algebra whole(f, labels, structure(out.operators, coords), coords(Matrix::identity(f, big)));
  out.algebra = KnAlgebra(reference, n, whole);
  return out;
}

std::vector<Matrix> splitting_operators(const InducedDeformation& d, const Matrix& section) {
  if (section.rows() != d.operators.size() || section.cols() != d.reference_ops.size())
    throw DimensionMismatch("splitting: section has the wrong shape");
  std::vector<Matrix> out;
  const Field f = section.field();
  const std::size_t big = d.operators[0].rows();
  for (std::size_t i = 0; i < section.cols(); ++i) {
    Matrix op(f, big, big);
    for (std::size_t k = 0; k < section.rows(); ++k)
      if (!section(k, i).is_zero()) op.add_block(0, 0, d.operators[k], section(k, i));
    out.push_back(std::move(op));
  }
  return out;
}

namespace {

// s(L_{e_i}) for the basis of A.
std::vector<Matrix> module_actions(const KnAlgebra& b, const InducedDeformation& d, const std::vector<Matrix>& s) {
  const Algebra& a = b.reference();
  const Field f = a.field();
  const Matrix ref = columns_of(f, a.dim() * a.dim(), d.reference_ops);
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    auto c = coordinates(ref, a.left(i).vectorize());
    if (!c) throw InvariantViolation("left multiplication is not a differential operator");
    Matrix act(f, s[0].rows(), s[0].cols());
    for (std::size_t k = 0; k < c->size(); ++k)
      if (!(*c)[k].is_zero()) act.add_block(0, 0, s[k], (*c)[k]);
    out.push_back(std::move(act));
  }
  return out;
}

}  // namespace

FreenessReport freeness_check(const KnAlgebra& b, const InducedDeformation& d, const Matrix& section) {
  const Algebra& a = b.reference();
  const Field f = a.field();
  const std::size_t r = a.dim(), n = b.order(), big = b.total().dim();
  const auto s = splitting_operators(d, section);
  FreenessReport rep;

  const Algebra& ref = d.algebra.reference();
  rep.section_multiplicative = true;
  for (std::size_t x = 0; x < s.size(); ++x)
    for (std::size_t y = 0; y < s.size(); ++y) {
      Matrix expect(f, big, big);
      const Vector prod = ref.product(x, y);
      for (std::size_t k = 0; k < prod.size(); ++k)
        if (!prod[k].is_zero()) expect.add_block(0, 0, s[k], prod[k]);
      rep.section_multiplicative = rep.section_multiplicative && s[x] * s[y] == expect;
    }
  Matrix unit(f, big, big);
  for (std::size_t k = 0; k < s.size(); ++k)
    if (!ref.unit()[k].is_zero()) unit.add_block(0, 0, s[k], ref.unit()[k]);
  rep.section_multiplicative = rep.section_multiplicative && unit.is_identity();

  const auto act = module_actions(b, d, s);
  Matrix beta(f, r, big);
  beta.set_block(0, 0, Matrix::identity(f, r));
  rep.beta_linear = true;
  for (std::size_t i = 0; i < r; ++i) rep.beta_linear = rep.beta_linear && beta * act[i] == a.left(i) * beta;

  const Matrix t = b.shift();
  const Vector one = b.total().unit();
  rep.freeness = Matrix(f, big, big);
  for (std::size_t j = 0; j <= n; ++j)
    for (std::size_t i = 0; i < r; ++i) rep.freeness.set_column(j * r + i, (power(t, j) * act[i]).apply(one));
  rep.invertible = is_invertible(rep.freeness);
  rep.module_iso = rep.invertible && t * rep.freeness == rep.freeness * t;
  const Matrix id = Matrix::identity(f, n + 1);
  for (std::size_t i = 0; i < r; ++i)
    rep.module_iso = rep.module_iso && act[i] * rep.freeness == rep.freeness * kronecker(id, a.left(i));
  return rep;
}

RingComparison diffop_ring_comparison(const KnAlgebra& b, const InducedDeformation& d, const Matrix& section,
                                      std::size_t order_cap) {
  const Field f = b.reference().field();
  const std::size_t big = b.total().dim();
  if (order_cap == 0) order_cap = default_order_cap(big);
  const auto act = module_actions(b, d, splitting_operators(d, section));
  const Matrix t = b.shift();
  DiffOpFiltration over_b = diffops(b, order_cap);
  DiffOpFiltration over_tilde = diffops(f, act, act, order_cap, {{t, t}});
  RingComparison c;
  c.stabilized = over_b.stabilized && over_tilde.stabilized;
  c.dim_b = over_b.stable().size();
  c.dim_tilde = over_tilde.stable().size();
  std::vector<Matrix> both = over_b.stable();
  both.insert(both.end(), over_tilde.stable().begin(), over_tilde.stable().end());
  c.dim_sum = rank(columns_of(f, big * big, both));
  return c;
}

}  // namespace hochdef
