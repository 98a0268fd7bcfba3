#include "hochdef/obstruction.hpp"

#include <algorithm>

#include "hochdef/errors.hpp"

namespace hochdef {

namespace {

std::size_t meet_of(const FiniteSite& s, const std::vector<std::size_t>& cover, const std::vector<std::size_t>& tuple) {
  std::vector<std::size_t> objs;
  for (std::size_t i : tuple) objs.push_back(cover.at(i));
  return s.require_meet(objs);
}

void check_cover(const FiniteSite& s, const std::vector<std::size_t>& cover) {
  if (cover.empty()) throw PreconditionFailed("the cover is empty");
  for (std::size_t u : cover)
    if (u >= s.size()) throw DimensionMismatch("cover member is not an object");
}

// m_ij with alternation; values hold i < j.
Vector pair_value(const std::map<MemberPair, Vector>& values, Field f, std::size_t dim, std::size_t i, std::size_t j) {
  if (i == j) return zero_vector(f, dim);
  auto it = values.find({std::min(i, j), std::max(i, j)});
  if (it == values.end()) return zero_vector(f, dim);
  return i < j ? it->second : -Scalar::one(f) * it->second;
}

// Normalizes a map given in either order to i < j.
std::map<MemberPair, Vector> normalized(const std::map<MemberPair, Vector>& values, Field f) {
  std::map<MemberPair, Vector> out;
  for (const auto& [key, v] : values) {
    auto [i, j] = key;
    if (i == j) {
      if (!is_zero(v)) throw InvariantViolation("Cech cochain: m_ii must vanish");
      continue;
    }
    Vector w = i < j ? v : -Scalar::one(f) * v;
    MemberPair k{std::min(i, j), std::max(i, j)};
    auto [it, fresh] = out.emplace(k, w);
    if (!fresh && !(it->second == w)) throw InvariantViolation("Cech cochain is not alternating");
  }
  return out;
}

// Block of a Tot^0 vector at a single object.
Vector object_value(const GSComplex& t, const Vector& total0, std::size_t x) {
  auto k = t.chains().find(Chain{x});
  if (!k) throw PreconditionFailed("object outside the complex");
  GSCochain c = t.component(total0, 0, 0);
  return slice(c.values, t.block_offset(0, 0, *k), t.block_size(0, 0, *k));
}

// Subtracts D(y) so that the cocycle has no row-0 part. Possible on a slice
// with a largest object, where the nerve cohomology vanishes in degree 1.
Vector derivation_representative(const GSComplex& t, const Vector& v) {
  const auto rows = t.bottom_coordinates(1);
  Vector bottom;
  for (std::size_t r : rows) bottom.push_back(v[r]);
  if (is_zero(bottom)) return v;
  const Matrix d0 = t.total().differential(0);
  std::vector<std::size_t> cols(d0.cols());
  for (std::size_t c = 0; c < cols.size(); ++c) cols[c] = c;
  auto y = solve(d0.select(rows, cols), bottom);
  if (!y) throw PreconditionFailed("slice class has no derivation representative");
  return v - d0.apply(*y);
}

}  // namespace

// ---------------------------------------------------------------- Cech data

CechCocycleM::CechCocycleM(const BimodulePresheaf& m, std::vector<std::size_t> cover, const std::map<MemberPair, Vector>& values)
    : field_(m.field()), cover_(std::move(cover)) {
  const FiniteSite& s = m.site();
  check_cover(s, cover_);
  values_ = normalized(values, field_);
  for (const auto& [key, v] : values_) {
    if (key.second >= cover_.size()) throw DimensionMismatch("Cech cochain: member index out of range");
    if (v.size() != m.at(meet_of(s, cover_, {key.first, key.second})).dim())
      throw DimensionMismatch("Cech cochain: value has the wrong dimension");
  }
  const std::size_t n = cover_.size();
  pair_dims_.assign(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) pair_dims_[i * n + j] = m.at(meet_of(s, cover_, {i, j})).dim();
  for (const Vector& c : cech_coboundary(m, cover_, values_))
    if (!is_zero(c)) throw InvariantViolation("Cech cochain is not a cocycle: r(m_jk) - r(m_ik) + r(m_ij) != 0");
}

Vector CechCocycleM::at(std::size_t i, std::size_t j) const {
  const std::size_t n = cover_.size();
  if (i >= n || j >= n) throw DimensionMismatch("Cech cochain: member index out of range");
  return pair_value(values_, field_, pair_dims_[i * n + j], i, j);
}

std::vector<Vector> cech_coboundary(const BimodulePresheaf& m, const std::vector<std::size_t>& cover,
                                    const std::map<MemberPair, Vector>& values) {
  const FiniteSite& s = m.site();
  const Field f = m.field();
  check_cover(s, cover);
  const auto vals = normalized(values, f);
  std::vector<Vector> out;
  for (const auto& t : cech_tuples(cover.size(), 2)) {
    const std::size_t w = meet_of(s, cover, t);
    Vector acc = zero_vector(f, m.at(w).dim());
    // (dm)_{ijk} = m_jk - m_ik + m_ij
    const std::vector<std::pair<MemberPair, bool>> faces = {{{t[1], t[2]}, false}, {{t[0], t[2]}, true}, {{t[0], t[1]}, false}};
    for (const auto& [pq, negative] : faces) {
      const std::size_t u = meet_of(s, cover, {pq.first, pq.second});
      Vector r = m.restriction(u, w).apply(pair_value(vals, f, m.at(u).dim(), pq.first, pq.second));
      acc = negative ? acc - r : acc + r;
    }
    out.push_back(std::move(acc));
  }
  return out;
}

// ---------------------------------------------------------------- epsilon

namespace {

std::vector<std::size_t> home_members(const FiniteSite& s, const std::vector<std::size_t>& cover) {
  std::vector<std::size_t> home(s.size());
  for (std::size_t x = 0; x < s.size(); ++x) {
    std::size_t i = 0;
    while (i < cover.size() && !s.leq(x, cover[i])) ++i;
    if (i == cover.size()) throw PreconditionFailed("object " + s.name(x) + " lies under no cover member");
    home[x] = i;
  }
  return home;
}

// g_{X>Y} = restriction of m_{i(X) i(Y)} to Y.
Vector gluing_value(const BimodulePresheaf& m, const std::vector<std::size_t>& cover, const std::map<MemberPair, Vector>& vals,
                    const std::vector<std::size_t>& home, std::size_t x, std::size_t y) {
  const std::size_t i = home[x], j = home[y];
  if (i == j) return zero_vector(m.field(), m.at(y).dim());
  const std::size_t u = meet_of(m.site(), cover, {i, j});
  return m.restriction(u, y).apply(pair_value(vals, m.field(), m.at(u).dim(), i, j));
}

}  // namespace

PresheafExtension glue_inner(const BimodulePresheaf& m, const std::vector<std::size_t>& cover,
                             const std::map<MemberPair, Vector>& values) {
  const FiniteSite& s = m.site();
  const Field f = m.field();
  check_cover(s, cover);
  const auto vals = normalized(values, f);
  for (const auto& [key, v] : vals)
    if (key.second >= cover.size() || v.size() != m.at(meet_of(s, cover, {key.first, key.second})).dim())
      throw DimensionMismatch("gluing data does not match the cover");
  auto boundary = cech_coboundary(m, cover, vals);
  auto triples = cech_tuples(cover.size(), 2);
  for (std::size_t t = 0; t < triples.size(); ++t) {
    const std::size_t w = meet_of(s, cover, triples[t]);
    for (std::size_t y = 0; y < s.size(); ++y) {
      if (!s.leq(y, w)) continue;
      const Bimodule& my = m.at(y);
      const Vector c = m.restriction(w, y).apply(boundary[t]);
      for (std::size_t a = 0; a < my.algebra().dim(); ++a)
        if (!is_zero((my.left(a) - my.right(a)).apply(c)))
          throw PreconditionFailed("gluing: the Cech coboundary is not central on the triple meets");
    }
  }
  const auto home = home_members(s, cover);
  std::vector<ExtensionDatum> local;
  for (std::size_t x = 0; x < s.size(); ++x) local.push_back(split_extension(m.at(x)));
  std::map<std::pair<std::size_t, std::size_t>, Matrix> given;
  const AlgebraPresheaf& a = m.algebras();
  for (std::size_t x = 0; x < s.size(); ++x)
    for (std::size_t y = 0; y < s.size(); ++y) {
      if (!s.less(y, x)) continue;
      const Bimodule& my = m.at(y);
      const std::size_t ax = a.at(x).dim(), ay = a.at(y).dim(), mx = m.at(x).dim(), mydim = my.dim();
      const Vector g = gluing_value(m, cover, vals, home, x, y);
      // a' -> [a', g] on A(Y)
      Matrix bracket(f, mydim, ay);
      for (std::size_t k = 0; k < ay; ++k) bracket.set_column(k, (my.left(k) - my.right(k)).apply(g));
      Matrix r(f, ay + mydim, ax + mx);
      r.set_block(0, 0, a.restriction(x, y));
      r.set_block(ay, 0, bracket * a.restriction(x, y));
      r.set_block(ay, ax, m.restriction(x, y));
      given[{x, y}] = std::move(r);
    }
  return PresheafExtension(m, std::move(local), given);
}

PresheafExtension epsilon(const BimodulePresheaf& m, const CechCocycleM& c) { return glue_inner(m, c.cover(), c.values()); }

Vector gluing_nerve_cocycle(const BimodulePresheaf& m, const std::vector<std::size_t>& cover,
                            const std::map<MemberPair, Vector>& values) {
  const FiniteSite& s = m.site();
  check_cover(s, cover);
  const auto vals = normalized(values, m.field());
  const auto home = home_members(s, cover);
  Vector out;
  ChainIndex chains(s);
  if (chains.max_length() < 1) return out;
  for (const Chain& c : chains.chains(1)) {
    Vector g = gluing_value(m, cover, vals, home, c[0], c[1]);
    out.insert(out.end(), g.begin(), g.end());
  }
  return out;
}

// ---------------------------------------------------------------- slice cohomology

LocalCohomology local_cohomology(const BimodulePresheaf& m, int q, std::size_t size_cap) {
  if (q < 0) throw PreconditionFailed("local cohomology degree must be nonnegative");
  const FiniteSite& s = m.site();
  LocalCohomology out;
  out.degree = q;
  std::vector<std::size_t> dims;
  for (std::size_t x = 0; x < s.size(); ++x) {
    const std::vector<bool> mask = s.down_set(x);
    out.complexes.emplace_back(m, static_cast<std::size_t>(q) + 1, &mask, size_cap);
    out.spaces.emplace_back(out.complexes.back().total(), q, true);
    dims.push_back(out.spaces.back().dim());
  }
  std::map<std::pair<std::size_t, std::size_t>, Matrix> given;
  for (std::size_t x = 0; x < s.size(); ++x)
    for (std::size_t y = 0; y < s.size(); ++y) {
      if (!s.less(y, x)) continue;
      std::vector<Vector> cols;
      for (const Vector& rep : out.spaces[x].representatives())
        cols.push_back(out.spaces[y].classify(out.complexes[x].restrict_to(out.complexes[y], q, rep)));
      given[{x, y}] = Matrix::from_columns(m.field(), dims[y], cols);
    }
  out.presheaf = LinearPresheaf(s, m.field(), dims, given);
  return out;
}

// ---------------------------------------------------------------- rho, alpha1

namespace {

Vector total_cocycle(const PresheafExtension& b, const GSComplex& t) {
  return gs_total_cocycle(t, presheaf_extension_to_cocycle(b, b.canonical_sections()));
}

}  // namespace

RhoReport rho(const PresheafExtension& b, std::size_t size_cap) {
  GSComplex t(b.coefficients(), 3, nullptr, size_cap);
  GSSequence seq(t, 2);
  const Vector z = total_cocycle(b, t);
  RhoReport r;
  r.ha_class = seq.ha(2).classify(t.to_ta(2, z));
  r.ext_class = seq.ext(2).classify(z);
  r.nerve_image = seq.projection(2).apply(r.ext_class);
  r.in_connecting_image = solve(seq.connecting(1), r.ha_class).has_value();
  return r;
}

std::vector<Alpha1Member> alpha1(const PresheafExtension& b, const std::vector<std::size_t>& cover, std::size_t size_cap) {
  const FiniteSite& s = b.site();
  check_cover(s, cover);
  GSComplex t(b.coefficients(), 3, nullptr, size_cap);
  const Vector z = total_cocycle(b, t);
  std::vector<Alpha1Member> out;
  for (std::size_t u : cover) {
    const std::vector<bool> mask = s.down_set(u);
    GSComplex ts(b.coefficients(), 3, &mask, size_cap);
    CohomologySpace ext2(ts.total(), 2);
    out.push_back({u, is_split(b.at(u)).hh2_class, ext2.classify(t.restrict_to(ts, 2, z))});
  }
  return out;
}

std::optional<std::vector<Vector>> local_splittings(const PresheafExtension& b, const std::vector<std::size_t>& cover,
                                                    std::size_t size_cap) {
  const FiniteSite& s = b.site();
  check_cover(s, cover);
  GSComplex t(b.coefficients(), 3, nullptr, size_cap);
  const Vector z = total_cocycle(b, t);
  std::vector<Vector> out;
  for (std::size_t u : cover) {
    const std::vector<bool> mask = s.down_set(u);
    GSComplex ts(b.coefficients(), 3, &mask, size_cap);
    CochainComplex ta = ts.ta();
    CohomologySpace h2(ta, 2, true);
    auto h = h2.coboundary_preimage(ts.to_ta(2, t.restrict_to(ts, 2, z)));
    if (!h) return std::nullopt;
    out.push_back(ts.from_ta(1, *h));
  }
  return out;
}

// ---------------------------------------------------------------- alpha2, alpha3

Alpha2Result alpha2(const PresheafExtension& b, const std::vector<std::size_t>& cover, const std::vector<Vector>* splittings,
                    std::size_t size_cap) {
  const FiniteSite& s = b.site();
  const BimodulePresheaf& m = b.coefficients();
  check_cover(s, cover);
  Alpha2Result r;
  r.cover = cover;
  if (splittings) {
    if (splittings->size() != cover.size()) throw DimensionMismatch("alpha2: one splitting per member");
    r.splittings = *splittings;
  } else {
    auto found = local_splittings(b, cover, size_cap);
    if (!found) throw PreconditionFailed("alpha2: the extension is not locally split on the cover");
    r.splittings = std::move(*found);
  }
  GSComplex t(m, 3, nullptr, size_cap);
  const Vector z = total_cocycle(b, t);
  std::vector<GSComplex> slices;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    const std::vector<bool> mask = s.down_set(cover[i]);
    slices.emplace_back(m, 3, &mask, size_cap);
    const GSComplex& ts = slices.back();
    const Vector& h = r.splittings[i];
    if (h.size() != ts.total().dim(1)) throw DimensionMismatch("alpha2: splitting is not in Tot^1 of the slice");
    if (!is_zero(ts.component(h, 1, 0).values) || !(ts.total().differential(1).apply(h) == t.restrict_to(ts, 2, z)))
      throw PreconditionFailed("alpha2: supplied section correction does not split the slice");
  }
  LocalCohomology e1 = local_cohomology(m, 1, size_cap);
  std::vector<std::size_t> sizes;
  for (const auto& pr : cech_tuples(cover.size(), 1)) {
    const std::size_t i = pr[0], j = pr[1];
    const std::size_t w = meet_of(s, cover, pr);
    const GSComplex& tw = e1.complexes[w];
    Vector d = slices[j].restrict_to(tw, 1, r.splittings[j]) - slices[i].restrict_to(tw, 1, r.splittings[i]);
    const Vector dd = tw.total().differential(1).apply(d);
    r.derivations = r.derivations && is_zero(tw.component(dd, 0, 2).values);
    r.compatible = r.compatible && is_zero(tw.component(dd, 1, 1).values);
    Vector cls = e1.spaces[w].classify(d);
    r.cech_cochain.insert(r.cech_cochain.end(), cls.begin(), cls.end());
    sizes.push_back(cls.size());
    r.pairs.push_back({i, j});
    r.delta.push_back(std::move(d));
    r.local_classes.push_back(std::move(cls));
  }
  if (!r.derivations || !r.compatible) throw InvariantViolation("alpha2: section differences are not compatible derivations");
  if (cover.size() < 2) return r;
  CochainComplex c = cech_complex(e1.presheaf, cover, 2);
  CohomologySpace h1(c, 1);
  if (!h1.is_cocycle(r.cech_cochain)) throw InvariantViolation("alpha2: derivation classes are not a Cech cocycle");
  r.cech_class = h1.classify(r.cech_cochain);
  return r;
}

Alpha3Result alpha3(const PresheafExtension& b, const Alpha2Result& a2, std::size_t size_cap) {
  if (!a2.zero()) throw PreconditionFailed("alpha3 needs a vanishing alpha2 class");
  const FiniteSite& s = b.site();
  const BimodulePresheaf& m = b.coefficients();
  const Field f = m.field();
  const auto& cover = a2.cover;
  Alpha3Result r;
  LocalCohomology e1 = local_cohomology(m, 1, size_cap);

  // Members' derivation families delta_i with (d delta)_ij = [delta_ij].
  std::vector<Vector> change(cover.size());
  std::vector<GSComplex> slices;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    const std::vector<bool> mask = s.down_set(cover[i]);
    slices.emplace_back(m, 3, &mask, size_cap);
    change[i] = zero_vector(f, e1.spaces[cover[i]].dim());
  }
  if (cover.size() >= 2) {
    CochainComplex c = cech_complex(e1.presheaf, cover, 2);
    CohomologySpace h1(c, 1, true);
    auto e = h1.coboundary_preimage(a2.cech_cochain);
    if (!e) throw InvariantViolation("alpha3: zero alpha2 class without a Cech preimage");
    std::size_t off = 0;
    for (std::size_t i = 0; i < cover.size(); ++i) {
      change[i] = slice(*e, off, change[i].size());
      off += change[i].size();
    }
  }
  r.local_change = change;
  // sigma'^i = sigma^i - delta_i, as Tot^1 vectors of the E^1 slice complexes.
  std::vector<Vector> corrected;
  for (std::size_t i = 0; i < cover.size(); ++i) {
    const std::size_t u = cover[i];
    const GSComplex& tu = e1.complexes[u];
    Vector delta = zero_vector(f, tu.total().dim(1));
    const auto& reps = e1.spaces[u].representatives();
    for (std::size_t k = 0; k < reps.size(); ++k)
      if (!change[i][k].is_zero()) axpy(delta, change[i][k], derivation_representative(tu, reps[k]));
    corrected.push_back(slices[i].restrict_to(tu, 1, a2.splittings[i]) - delta);
  }
  std::map<MemberPair, Vector> pair_values;
  for (const auto& pr : cech_tuples(cover.size(), 1)) {
    const std::size_t i = pr[0], j = pr[1];
    const std::size_t w = meet_of(s, cover, pr);
    const GSComplex& tw = e1.complexes[w];
    const Vector d = e1.complexes[cover[j]].restrict_to(tw, 1, corrected[j]) -
                     e1.complexes[cover[i]].restrict_to(tw, 1, corrected[i]);
    auto x = e1.spaces[w].coboundary_preimage(d);
    if (!x) throw InvariantViolation("alpha3: corrected derivations are not inner");
    Vector mij = object_value(tw, *x, w);
    r.pairs.push_back({i, j});
    r.m_pairs.push_back(mij);
    pair_values[{i, j}] = std::move(mij);
  }
  r.m_triples = cech_coboundary(m, cover, pair_values);
  r.triples = cech_tuples(cover.size(), 2);
  if (cover.size() < 3) return r;

  CenterPresheaf z = center_presheaf(m);
  Vector cochain;
  for (std::size_t t = 0; t < r.triples.size(); ++t) {
    const std::size_t w = meet_of(s, cover, r.triples[t]);
    auto coords = solve(z.inclusion[w], r.m_triples[t]);
    if (!coords) throw InvariantViolation("alpha3: m_ijk is not central below the triple meet");
    cochain.insert(cochain.end(), coords->begin(), coords->end());
  }
  CohomologySpace h2(cech_complex(z.presheaf, cover, 2), 2);
  r.cech_class = h2.classify(cochain);
  return r;
}

// ---------------------------------------------------------------- cascade

ObstructionReport obstruction_cascade(const PresheafExtension& b, const std::vector<std::size_t>& cover, std::size_t size_cap) {
  ObstructionReport out;
  out.rho = rho(b, size_cap);
  if (is_zero(out.rho.ha_class)) {
    out.stage = "split";
    return out;
  }
  out.alpha1 = alpha1(b, cover, size_cap);
  if (std::any_of(out.alpha1.begin(), out.alpha1.end(), [](const Alpha1Member& a) { return !a.zero(); })) {
    out.stage = "alpha1";
    return out;
  }
  out.alpha2 = alpha2(b, cover, nullptr, size_cap);
  if (!out.alpha2->zero()) {
    out.stage = "alpha2";
    return out;
  }
  out.alpha3 = alpha3(b, *out.alpha2, size_cap);
  if (!out.alpha3->zero()) {
    out.stage = "alpha3";
    return out;
  }
  out.stage = out.rho.ext_zero() ? "nerve" : "undetected";
  return out;
}

}  // namespace hochdef
