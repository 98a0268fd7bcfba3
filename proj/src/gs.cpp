#include "hochdef/gs.hpp"

#include <algorithm>

#include "hochdef/errors.hpp"

namespace hochdef {

namespace {

std::vector<bool> full_mask(const FiniteSite& s, const std::vector<bool>* mask) {
  if (!mask) return std::vector<bool>(s.size(), true);
  if (mask->size() != s.size()) throw DimensionMismatch("object mask has the wrong length");
  return *mask;
}

Scalar sign(Field f, std::size_t exponent) { return exponent % 2 ? -Scalar::one(f) : Scalar::one(f); }

// Tensor power of a matrix, first factor most significant.
Matrix tensor_power(const Matrix& r, std::size_t q) {
  Matrix out = Matrix::identity(r.field(), 1);
  for (std::size_t i = 0; i < q; ++i) out = kronecker(out, r);
  return out;
}

Bimodule acting_module(const BimodulePresheaf& m, const Chain& c) {
  if (c.size() == 1) return m.at(c[0]);
  return m.at(c.back()).pullback(m.algebras().hom(c.front(), c.back()));
}

}  // namespace

// ---------------------------------------------------------------- the double complex

GSComplex::GSComplex(const BimodulePresheaf& m, std::size_t caps, const std::vector<bool>* mask, std::size_t size_cap)
    : m_(m), mask_(full_mask(m.site(), mask)), chains_(m_.site(), &mask_), caps_(caps) {
  const Field f = m_.field();
  const AlgebraPresheaf& a = m_.algebras();
  const std::size_t pmax = static_cast<std::size_t>(std::max(0, std::min(static_cast<int>(caps), chains_.max_length())));
  const std::size_t qmax = caps;
  bicomplex_ = DoubleComplex(f, pmax, qmax);
  const auto chains_at = [&](std::size_t p) -> const std::vector<Chain>& {
    static const std::vector<Chain> none;
    return static_cast<int>(p) <= chains_.max_length() ? chains_.chains(p) : none;
  };

  offsets_.assign(pmax + 1, std::vector<std::vector<std::size_t>>(qmax + 1));
  for (std::size_t p = 0; p <= pmax; ++p)
    for (std::size_t q = 0; q <= qmax; ++q) {
      std::size_t total = 0;
      for (const Chain& c : chains_at(p)) {
        offsets_[p][q].push_back(total);
        total += cochain_dim(a.at(c.front()).dim(), m_.at(c.back()).dim(), static_cast<int>(q), size_cap);
        if (total > size_cap) throw CapExceeded("GS cochain space exceeds the size cap");
      }
      offsets_[p][q].push_back(total);
      bicomplex_.set_dim(p, q, total);
    }

  for (std::size_t p = 0; p <= pmax; ++p)
    for (std::size_t q = 0; q < qmax; ++q) {
      Matrix d(f, bicomplex_.dim(p, q + 1), bicomplex_.dim(p, q));
      const auto& cs = chains_at(p);
      for (std::size_t k = 0; k < cs.size(); ++k)
        d.set_block(offsets_[p][q + 1][k], offsets_[p][q][k],
                    bar_differential(a.at(cs[k].front()), acting_module(m_, cs[k]), static_cast<int>(q), size_cap));
      bicomplex_.set_vertical(p, q, std::move(d));
    }

  for (std::size_t p = 0; p < pmax; ++p)
    for (std::size_t q = 0; q <= qmax; ++q) {
      Matrix d(f, bicomplex_.dim(p + 1, q), bicomplex_.dim(p, q));
      const auto& targets = chains_at(p + 1);
      for (std::size_t k = 0; k < targets.size(); ++k) {
        const Chain& tau = targets[k];
        const std::size_t row = offsets_[p + 1][q][k];
        const std::size_t tuples = cochain_dim(a.at(tau.front()).dim(), 1, static_cast<int>(q), size_cap);
        const std::size_t dm = m_.at(tau.back()).dim();
        auto source = [&](std::size_t drop) {
          Chain sigma = tau;
          sigma.erase(sigma.begin() + static_cast<std::ptrdiff_t>(drop));
          return offsets_[p][q][*chains_.find(sigma)];
        };

        // Drop U_{p+1}: postcompose with r^M.
        const Matrix& rm = m_.restriction(tau[p], tau[p + 1]);
        const std::size_t dm_src = rm.cols(), col_last = source(p + 1);
        for (std::size_t t = 0; t < tuples; ++t)
          for (std::size_t r = 0; r < dm; ++r)
            for (std::size_t c = 0; c < dm_src; ++c)
              if (!rm(r, c).is_zero()) d(row + t * dm + r, col_last + t * dm_src + c) += rm(r, c);

        // Drop U_i for 0 < i <= p.
        for (std::size_t i = 1; i <= p; ++i) {
          const Scalar s = sign(f, p + 1 - i);
          const std::size_t col = source(i);
          for (std::size_t x = 0; x < tuples * dm; ++x) d(row + x, col + x) += s;
        }

        // Drop U_0: precompose with (r^A_{U_0,U_1})^q.
        const Scalar s0 = sign(f, p + 1);
        const Matrix rq = tensor_power(a.restriction(tau[0], tau[1]), q);
        const std::size_t col_first = source(0);
        for (std::size_t u = 0; u < rq.rows(); ++u)
          for (std::size_t t = 0; t < rq.cols(); ++t) {
            if (rq(u, t).is_zero()) continue;
            const Scalar c = s0 * rq(u, t);
            for (std::size_t r = 0; r < dm; ++r) d(row + t * dm + r, col_first + u * dm + r) += c;
          }
      }
      bicomplex_.set_horizontal(p, q, std::move(d));
    }

  total_ = totalize(bicomplex_, &layout_);
}

void GSComplex::require_degree(int n) const {
  if (n < 0) throw PreconditionFailed("GS cohomology: negative degree");
  if (static_cast<std::size_t>(n) + 1 > caps_)
    throw PreconditionFailed("GS cohomology in degree " + std::to_string(n) + " needs caps >= " + std::to_string(n + 1) +
                             ", have " + std::to_string(caps_));
}

std::size_t GSComplex::block_size(std::size_t p, std::size_t q, std::size_t chain) const {
  return offsets_.at(p).at(q).at(chain + 1) - offsets_[p][q][chain];
}

std::size_t GSComplex::block_offset(std::size_t p, std::size_t q, std::size_t chain) const {
  return offsets_.at(p).at(q).at(chain);
}

std::optional<std::size_t> GSComplex::summand_offset(std::size_t p, std::size_t q) const {
  const TotalLayout::Block* b = layout_.find(p, q);
  if (!b) return std::nullopt;
  return b->offset;
}

std::vector<std::size_t> GSComplex::ta_coordinates(int n) const {
  std::vector<std::size_t> out;
  if (n < 0 || static_cast<std::size_t>(n) >= layout_.degrees.size()) return out;
  for (const auto& b : layout_.degrees[static_cast<std::size_t>(n)])
    if (b.q >= 1)
      for (std::size_t i = 0; i < b.size; ++i) out.push_back(b.offset + i);
  return out;
}

std::vector<std::size_t> GSComplex::bottom_coordinates(int n) const {
  std::vector<std::size_t> out;
  if (n < 0 || static_cast<std::size_t>(n) >= layout_.degrees.size()) return out;
  for (const auto& b : layout_.degrees[static_cast<std::size_t>(n)])
    if (b.q == 0)
      for (std::size_t i = 0; i < b.size; ++i) out.push_back(b.offset + i);
  return out;
}

CochainComplex GSComplex::ta() const {
  std::vector<std::vector<std::size_t>> keep;
  for (int n = total_.lowest(); n <= total_.highest(); ++n) keep.push_back(ta_coordinates(n));
  return select_coordinates(total_, keep);
}

CochainComplex GSComplex::bottom() const {
  std::vector<std::vector<std::size_t>> keep;
  for (int n = total_.lowest(); n <= total_.highest(); ++n) keep.push_back(bottom_coordinates(n));
  return select_coordinates(total_, keep);
}

Vector GSComplex::to_total(const std::vector<GSCochain>& parts) const {
  if (parts.empty()) throw PreconditionFailed("to_total: no components");
  const std::size_t n = parts[0].p + parts[0].q;
  Vector out = zero_vector(m_.field(), total_.dim(static_cast<int>(n)));
  for (const GSCochain& c : parts) {
    if (c.p + c.q != n) throw DimensionMismatch("to_total: components of different total degree");
    const TotalLayout::Block* b = layout_.find(c.p, c.q);
    if (!b) {
      if (!is_zero(c.values)) throw PreconditionFailed("to_total: bidegree outside the truncation");
      continue;
    }
    if (c.values.size() != b->size) throw DimensionMismatch("to_total: component has the wrong number of coordinates");
    for (std::size_t i = 0; i < b->size; ++i) out[b->offset + i] = c.values[i];
  }
  return out;
}

GSCochain GSComplex::component(const Vector& total, std::size_t p, std::size_t q) const {
  const TotalLayout::Block* b = layout_.find(p, q);
  if (total.size() != total_.dim(static_cast<int>(p + q)))
    throw DimensionMismatch("component: vector is not in Tot^" + std::to_string(p + q));
  if (!b) return {p, q, {}};
  return {p, q, slice(total, b->offset, b->size)};
}

Vector GSComplex::to_ta(int n, const Vector& total) const {
  Vector out;
  for (std::size_t i : ta_coordinates(n)) out.push_back(total.at(i));
  return out;
}

Vector GSComplex::from_ta(int n, const Vector& ta) const {
  Vector out = zero_vector(m_.field(), total_.dim(n));
  const auto idx = ta_coordinates(n);
  if (idx.size() != ta.size()) throw DimensionMismatch("from_ta: wrong number of coordinates");
  for (std::size_t i = 0; i < idx.size(); ++i) out[idx[i]] = ta[i];
  return out;
}

Vector GSComplex::restrict_to(const GSComplex& sub, int n, const Vector& v) const {
  if (v.size() != total_.dim(n)) throw DimensionMismatch("restrict_to: vector is not in Tot^" + std::to_string(n));
  Vector out = zero_vector(m_.field(), sub.total().dim(n));
  if (n < 0 || static_cast<std::size_t>(n) >= sub.layout_.degrees.size()) return out;
  for (const auto& b : sub.layout_.degrees[static_cast<std::size_t>(n)]) {
    if (b.size == 0) continue;
    const TotalLayout::Block* mine = layout_.find(b.p, b.q);
    if (!mine) throw PreconditionFailed("restrict_to: the smaller complex reaches past this truncation");
    const auto& cs = sub.chains_.chains(b.p);
    for (std::size_t k = 0; k < cs.size(); ++k) {
      auto idx = chains_.find(cs[k]);
      if (!idx) throw PreconditionFailed("restrict_to: chain outside this mask");
      const std::size_t len = sub.block_size(b.p, b.q, k);
      const std::size_t from = mine->offset + block_offset(b.p, b.q, *idx);
      const std::size_t to = b.offset + sub.block_offset(b.p, b.q, k);
      for (std::size_t i = 0; i < len; ++i) out[to + i] = v[from + i];
    }
  }
  return out;
}

DoubleComplex gs_double_complex(const BimodulePresheaf& m, std::size_t qmax, std::size_t pmax,
                                const std::vector<bool>* mask, std::size_t size_cap) {
  GSComplex t(m, std::max(qmax, pmax), mask, size_cap);
  const DoubleComplex& full = t.bicomplex();
  const std::size_t pm = std::min(pmax, full.pmax());
  DoubleComplex out(m.field(), pm, qmax);
  for (std::size_t p = 0; p <= pm; ++p)
    for (std::size_t q = 0; q <= qmax; ++q) {
      out.set_dim(p, q, full.dim(p, q));
      if (q < qmax) out.set_vertical(p, q, full.vertical(p, q));
      if (p < pm) out.set_horizontal(p, q, full.horizontal(p, q));
    }
  return out;
}

Cohomology gs_ext(const BimodulePresheaf& m, int n, std::size_t size_cap) {
  if (n < 0) throw PreconditionFailed("gs_ext: negative degree");
  GSComplex t(m, static_cast<std::size_t>(n) + 1, nullptr, size_cap);
  return cohomology(t.total(), n);
}

Cohomology h_a(const BimodulePresheaf& m, int n, std::size_t size_cap) {
  if (n < 0) throw PreconditionFailed("h_a: negative degree");
  GSComplex t(m, static_cast<std::size_t>(n) + 1, nullptr, size_cap);
  return cohomology(t.ta(), n);
}

Cohomology gs_nerve(const BimodulePresheaf& m, int n, std::size_t size_cap) {
  if (n < 0) throw PreconditionFailed("gs_nerve: negative degree");
  GSComplex t(m, static_cast<std::size_t>(n) + 1, nullptr, size_cap);
  return cohomology(t.bottom(), n);
}

// ---------------------------------------------------------------- long exact sequence

GSSequence::GSSequence(const GSComplex& t, int nmax) : t_(&t), nmax_(nmax), ta_(t.ta()), bottom_(t.bottom()) {
  t.require_degree(nmax);
  const Field f = t.coefficients().field();
  const CochainComplex& tot = t.total();
  for (int n = 0; n <= nmax; ++n) {
    ha_.emplace_back(ta_, n);
    ext_.emplace_back(tot, n);
    nerve_.emplace_back(bottom_, n);
  }
  for (int n = 0; n <= nmax; ++n) {
    const std::size_t un = static_cast<std::size_t>(n);
    i_.push_back(induced_map(ha_[un], ext_[un], coordinate_inclusion(f, tot.dim(n), t.ta_coordinates(n))));
    j_.push_back(induced_map(ext_[un], nerve_[un], coordinate_projection(f, tot.dim(n), t.bottom_coordinates(n))));
    std::vector<Vector> cols;
    if (n < nmax) {
      for (const Vector& rep : nerve_[un].representatives()) cols.push_back(ha_[un + 1].classify(connecting_cocycle(n, rep)));
      delta_.push_back(Matrix::from_columns(f, ha_[un + 1].dim(), cols));
      continue;
    }
    // H_a^{nmax+1} lies past the truncation; reducing modulo the coboundaries
    // still gives a map with the right kernel.
    SubspaceBasis image(f, ta_.dim(n + 1));
    const Matrix d = ta_.differential(n);
    for (std::size_t k = 0; k < d.cols(); ++k) image.add(d.column(k));
    for (const Vector& rep : nerve_[un].representatives()) cols.push_back(image.reduce(connecting_cocycle(n, rep)).remainder);
    delta_.push_back(Matrix::from_columns(f, ta_.dim(n + 1), cols));
  }
}

Vector GSSequence::connecting_cocycle(int n, const Vector& nerve_cocycle) const {
  const auto bottom = t_->bottom_coordinates(n);
  if (nerve_cocycle.size() != bottom.size()) throw DimensionMismatch("connecting map: wrong number of coordinates");
  Vector lift = zero_vector(t_->coefficients().field(), t_->total().dim(n));
  for (std::size_t i = 0; i < bottom.size(); ++i) lift[bottom[i]] = nerve_cocycle[i];
  Vector image = t_->total().differential(n).apply(lift);
  for (std::size_t i : t_->bottom_coordinates(n + 1))
    if (!image[i].is_zero()) throw PreconditionFailed("connecting map: input is not a nerve cocycle");
  return t_->to_ta(n + 1, image);
}

bool LesReport::exact() const {
  return std::all_of(nodes.begin(), nodes.end(), [](const LesNode& n) { return n.exact(); });
}

bool LesReport::splits() const {
  for (std::size_t n = 0; n < ext.size(); ++n)
    if (ext[n] != ha[n] + nerve[n]) return false;
  return true;
}

namespace {

LesReport sequence_report(const GSSequence& seq) {
  LesReport r;
  for (int n = 0; n <= seq.nmax(); ++n) {
    r.ha.push_back(seq.ha(n).dim());
    r.ext.push_back(seq.ext(n).dim());
    r.nerve.push_back(seq.nerve(n).dim());
  }
  for (int n = 0; n <= seq.nmax(); ++n) {
    const Matrix& i = seq.inclusion(n);
    const Matrix& j = seq.projection(n);
    const Matrix& d = seq.connecting(n);
    const std::size_t ri = rank(i), rj = rank(j), rd = rank(d);
    LesNode h{"H_a", n, seq.ha(n).dim(), seq.ha(n).dim() - ri, 0, true};
    if (n > 0) {
      const Matrix& prev = seq.connecting(n - 1);
      h.image = rank(prev);
      h.composite_zero = (i * prev).is_zero();
    }
    r.nodes.push_back(h);
    r.nodes.push_back({"Ext", n, seq.ext(n).dim(), seq.ext(n).dim() - rj, ri, (j * i).is_zero()});
    r.nodes.push_back({"H", n, seq.nerve(n).dim(), seq.nerve(n).dim() - rd, rj, (d * j).is_zero()});
  }
  return r;
}

}  // namespace

LesReport les_check(const BimodulePresheaf& m, int nmax, std::size_t size_cap) {
  if (nmax < 0) throw PreconditionFailed("les_check: negative degree");
  GSComplex t(m, static_cast<std::size_t>(nmax) + 1, nullptr, size_cap);
  return sequence_report(GSSequence(t, nmax));
}

LesReport five_term_check(const BimodulePresheaf& m, std::size_t size_cap) {
  GSComplex t(m, 3, nullptr, size_cap);
  LesReport r = sequence_report(GSSequence(t, 2));
  std::erase_if(r.nodes, [](const LesNode& n) {
    return !((n.space == "H" && n.degree == 1) || (n.space == "H_a" && n.degree == 2) || (n.space == "Ext" && n.degree == 2));
  });
  return r;
}

// ---------------------------------------------------------------- presheaf extensions

namespace {

std::vector<std::size_t> total_dims(const std::vector<ExtensionDatum>& local) {
  std::vector<std::size_t> out;
  for (const auto& e : local) out.push_back(e.total().dim());
  return out;
}

}  // namespace

PresheafExtension::PresheafExtension(BimodulePresheaf m, std::vector<ExtensionDatum> local,
                                     const std::map<std::pair<std::size_t, std::size_t>, Matrix>& given)
    : m_(std::move(m)), local_(std::move(local)) {
  const FiniteSite& s = m_.site();
  if (local_.size() != s.size()) throw DimensionMismatch("presheaf extension: one extension per object required");
  for (std::size_t u = 0; u < s.size(); ++u)
    if (!(local_[u].module() == m_.at(u)))
      throw PreconditionFailed("presheaf extension: extension at " + s.name(u) + " is not by M(" + s.name(u) + ")");
  maps_ = RestrictionMaps(s, m_.field(), total_dims(local_), given, "presheaf extension");
  for (std::size_t u = 0; u < s.size(); ++u)
    for (std::size_t v = 0; v < s.size(); ++v) {
      if (!s.less(v, u)) continue;
      const std::string where = s.name(u) + " -> " + s.name(v);
      const Matrix& r = maps_(u, v);
      if (auto err = AlgebraHom::unchecked(local_[u].total(), local_[v].total(), r).check())
        throw InvariantViolation("presheaf extension: restriction " + where + " is not an algebra map: " + *err);
      const std::size_t au = local_[u].dim_a(), av = local_[v].dim_a(), mu = local_[u].dim_m(), mv = local_[v].dim_m();
      if (!(r.block(0, 0, av, au) == m_.algebras().restriction(u, v)) || !r.block(0, au, av, mu).is_zero() ||
          !(r.block(av, au, mv, mu) == m_.restriction(u, v)))
        throw InvariantViolation("presheaf extension: restriction " + where + " does not cover r^A and r^M");
    }
}

std::vector<Matrix> PresheafExtension::canonical_sections() const {
  std::vector<Matrix> out;
  for (const auto& e : local_) out.push_back(e.canonical_section());
  return out;
}

GSCocycle2 presheaf_extension_to_cocycle(const PresheafExtension& b, const std::vector<Matrix>& sections) {
  const FiniteSite& s = b.site();
  if (sections.size() != s.size()) throw DimensionMismatch("one section per object required");
  ChainIndex chains(s);
  GSCocycle2 z;
  z.z02.p = 0;
  z.z02.q = 2;
  for (const Chain& c : chains.chains(0)) {
    Vector local = extension_to_cocycle(b.at(c[0]), sections[c[0]]);
    z.z02.values.insert(z.z02.values.end(), local.begin(), local.end());
  }
  z.z11.p = 1;
  z.z11.q = 1;
  if (chains.max_length() >= 1)
    for (const Chain& c : chains.chains(1)) {
      const std::size_t u = c[0], v = c[1];
      const AlgebraPresheaf& a = b.coefficients().algebras();
      Matrix h = sections[v] * a.restriction(u, v) - b.restriction(u, v) * sections[u];
      const std::size_t av = b.at(v).dim_a();
      if (!h.block(0, 0, av, h.cols()).is_zero()) throw PreconditionFailed("sections do not lift the identity");
      Vector hv = h.block(av, 0, b.at(v).dim_m(), h.cols()).vectorize();
      z.z11.values.insert(z.z11.values.end(), hv.begin(), hv.end());
    }
  return z;
}

Vector gs_total_cocycle(const GSComplex& t, const GSCocycle2& z) {
  if (std::find(t.mask().begin(), t.mask().end(), false) != t.mask().end())
    throw PreconditionFailed("gs_total_cocycle: the complex must cover the whole site");
  return t.to_total({z.z02, z.z11});
}

PresheafExtension cocycle_to_presheaf_extension(const BimodulePresheaf& m, const GSCocycle2& z) {
  const FiniteSite& s = m.site();
  GSComplex t(m, 3);
  Vector total = gs_total_cocycle(t, z);
  if (!is_zero(t.total().differential(2).apply(total)))
    throw PreconditionFailed("GS 2-cochain is not a cocycle; the presheaf extension would not exist");
  const ChainIndex& chains = t.chains();
  std::vector<ExtensionDatum> local(s.size());
  for (std::size_t k = 0; k < chains.chains(0).size(); ++k) {
    const std::size_t u = chains.chains(0)[k][0];
    local[u] = cocycle_to_extension(m.at(u), slice(z.z02.values, t.block_offset(0, 2, k), t.block_size(0, 2, k)));
  }
  std::map<std::pair<std::size_t, std::size_t>, Matrix> given;
  if (chains.max_length() >= 1)
    for (std::size_t k = 0; k < chains.chains(1).size(); ++k) {
      const std::size_t u = chains.chains(1)[k][0], v = chains.chains(1)[k][1];
      const std::size_t au = m.algebras().at(u).dim(), av = m.algebras().at(v).dim();
      const std::size_t mu = m.at(u).dim(), mv = m.at(v).dim();
      Matrix r(m.field(), av + mv, au + mu);
      r.set_block(0, 0, m.algebras().restriction(u, v));
      r.set_block(av, au, m.restriction(u, v));
      Matrix h = Matrix::unvectorize(slice(z.z11.values, t.block_offset(1, 1, k), t.block_size(1, 1, k)), mv, au);
      r.set_block(av, 0, -h);
      given[{u, v}] = r;
    }
  return PresheafExtension(m, std::move(local), given);
}

PresheafExtension split_presheaf_extension(const BimodulePresheaf& m) {
  GSComplex t(m, 2);
  GSCocycle2 z{t.component(zero_vector(m.field(), t.total().dim(2)), 0, 2),
               t.component(zero_vector(m.field(), t.total().dim(2)), 1, 1)};
  return cocycle_to_presheaf_extension(m, z);
}

std::size_t exal_presheaf(const BimodulePresheaf& m, std::size_t size_cap) { return h_a(m, 2, size_cap).dim; }

}  // namespace hochdef
