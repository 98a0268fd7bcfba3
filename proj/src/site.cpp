#include "hochdef/site.hpp"

#include <algorithm>

#include "hochdef/errors.hpp"

namespace hochdef {

// ---------------------------------------------------------------- FiniteSite

FiniteSite::FiniteSite(std::vector<std::string> names, const std::vector<std::pair<std::size_t, std::size_t>>& relations)
    : names_(std::move(names)) {
  const std::size_t n = names_.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (names_[i] == names_[j]) throw InvariantViolation("site: duplicate object name " + names_[i]);
  leq_.assign(n * n, false);
  for (std::size_t i = 0; i < n; ++i) leq_[i * n + i] = true;
  for (auto [v, u] : relations) {
    if (v >= n || u >= n) throw DimensionMismatch("site: relation refers to an unknown object");
    leq_[v * n + u] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (leq_[i * n + k])
        for (std::size_t j = 0; j < n; ++j)
          if (leq_[k * n + j]) leq_[i * n + j] = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (leq_[i * n + j] && leq_[j * n + i])
        throw InvariantViolation("site: order is not antisymmetric, " + names_[i] + " and " + names_[j] +
                                 " contain each other");
}

std::optional<std::size_t> FiniteSite::find(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

std::size_t FiniteSite::index_of(const std::string& name) const {
  if (auto i = find(name)) return *i;
  throw PreconditionFailed("site: unknown object " + name);
}

std::optional<std::size_t> FiniteSite::meet(const std::vector<std::size_t>& objects) const {
  if (objects.empty()) return std::nullopt;
  std::vector<std::size_t> lower;
  for (std::size_t w = 0; w < size(); ++w) {
    bool below = true;
    for (std::size_t u : objects) below = below && leq(w, u);
    if (below) lower.push_back(w);
  }
  for (std::size_t w : lower) {
    bool top = true;
    for (std::size_t x : lower) top = top && leq(x, w);
    if (top) return w;
  }
  return std::nullopt;
}

std::size_t FiniteSite::require_meet(const std::vector<std::size_t>& objects) const {
  if (auto m = meet(objects)) return *m;
  std::string list;
  for (std::size_t u : objects) list += (list.empty() ? "" : ", ") + names_[u];
  throw PreconditionFailed("site: the objects {" + list + "} have no meet");
}

std::vector<bool> FiniteSite::down_set(std::size_t u) const {
  std::vector<bool> mask(size());
  for (std::size_t v = 0; v < size(); ++v) mask[v] = leq(v, u);
  return mask;
}

std::vector<std::size_t> FiniteSite::maximal_below(std::size_t u) const {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < size(); ++v) {
    if (!less(v, u)) continue;
    bool covered = true;
    for (std::size_t w = 0; w < size() && covered; ++w)
      if (less(v, w) && less(w, u)) covered = false;
    if (covered) out.push_back(v);
  }
  return out;
}

void FiniteSite::set_cover(std::vector<std::size_t> members) {
  for (std::size_t u : members)
    if (u >= size()) throw DimensionMismatch("site: cover member is not an object");
  cover_ = std::move(members);
}

// ---------------------------------------------------------------- chains

namespace {

void extend_chains(const FiniteSite& s, const std::vector<bool>* mask, std::size_t p, Chain& cur,
                   std::vector<Chain>& out) {
  if (cur.size() == p + 1) {
    out.push_back(cur);
    return;
  }
  for (std::size_t v = 0; v < s.size(); ++v) {
    if (mask && !(*mask)[v]) continue;
    if (!s.less(v, cur.back())) continue;
    cur.push_back(v);
    extend_chains(s, mask, p, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Chain> strict_chains(const FiniteSite& s, std::size_t p, const std::vector<bool>* mask) {
  std::vector<Chain> out;
  Chain cur;
  for (std::size_t u = 0; u < s.size(); ++u) {
    if (mask && !(*mask)[u]) continue;
    cur.assign(1, u);
    extend_chains(s, mask, p, cur, out);
  }
  return out;
}

ChainIndex::ChainIndex(const FiniteSite& s, const std::vector<bool>* mask) {
  for (std::size_t p = 0;; ++p) {
    auto c = strict_chains(s, p, mask);
    if (c.empty()) break;
    for (std::size_t i = 0; i < c.size(); ++i) index_.emplace(c[i], i);
    chains_.push_back(std::move(c));
  }
}

const std::vector<Chain>& ChainIndex::chains(std::size_t p) const {
  static const std::vector<Chain> none;
  return p < chains_.size() ? chains_[p] : none;
}

std::optional<std::size_t> ChainIndex::find(const Chain& c) const {
  auto it = index_.find(c);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------- restriction maps

RestrictionMaps::RestrictionMaps(const FiniteSite& s, Field f, const std::vector<std::size_t>& dims,
                                 const std::map<std::pair<std::size_t, std::size_t>, Matrix>& given,
                                 const std::string& what)
    : n_(s.size()), maps_(s.size() * s.size()) {
  if (dims.size() != n_) throw DimensionMismatch(what + ": one space per object required");
  for (std::size_t u = 0; u < n_; ++u) maps_[u * n_ + u] = Matrix::identity(f, dims[u]);
  for (const auto& [key, m] : given) {
    auto [u, v] = key;
    if (u >= n_ || v >= n_) throw DimensionMismatch(what + ": restriction refers to an unknown object");
    if (!s.less(v, u))
      throw PreconditionFailed(what + ": restriction " + s.name(u) + " -> " + s.name(v) + " does not follow the order");
    if (m.rows() != dims[v] || m.cols() != dims[u])
      throw DimensionMismatch(what + ": restriction " + s.name(u) + " -> " + s.name(v) + " has the wrong shape");
    maps_[u * n_ + v] = m;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t u = 0; u < n_; ++u)
      for (std::size_t v = 0; v < n_; ++v) {
        if (!s.less(v, u) || maps_[u * n_ + v]) continue;
        for (std::size_t w = 0; w < n_; ++w)
          if (s.less(v, w) && s.less(w, u) && maps_[u * n_ + w] && maps_[w * n_ + v]) {
            maps_[u * n_ + v] = *maps_[w * n_ + v] * *maps_[u * n_ + w];
            changed = true;
            break;
          }
      }
  }
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t v = 0; v < n_; ++v)
      if (s.less(v, u) && !maps_[u * n_ + v])
        throw PreconditionFailed(what + ": no restriction " + s.name(u) + " -> " + s.name(v) + " given or composable");
  for (std::size_t u = 0; u < n_; ++u)
    for (std::size_t w = 0; w < n_; ++w) {
      if (!s.less(w, u)) continue;
      for (std::size_t v = 0; v < n_; ++v)
        if (s.less(v, w) && !(*maps_[w * n_ + v] * *maps_[u * n_ + w] == *maps_[u * n_ + v]))
          throw InvariantViolation(what + ": restrictions are not functorial along " + s.name(u) + " > " + s.name(w) +
                                   " > " + s.name(v));
    }
}

const Matrix& RestrictionMaps::operator()(std::size_t u, std::size_t v) const {
  const auto& m = maps_.at(u * n_ + v);
  if (!m) throw PreconditionFailed("restriction requested for objects that are not comparable");
  return *m;
}

// ---------------------------------------------------------------- presheaves

LinearPresheaf::LinearPresheaf(FiniteSite s, Field f, std::vector<std::size_t> dims,
                               const std::map<std::pair<std::size_t, std::size_t>, Matrix>& given)
    : site_(std::move(s)), field_(f), dims_(std::move(dims)), maps_(site_, f, dims_, given, "presheaf") {}

LinearPresheaf::LinearPresheaf(FiniteSite s, Field f, std::vector<std::size_t> dims, RestrictionMaps maps)
    : site_(std::move(s)), field_(f), dims_(std::move(dims)), maps_(std::move(maps)) {}

namespace {

std::vector<std::size_t> algebra_dims(const std::vector<Algebra>& as) {
  std::vector<std::size_t> d;
  for (const auto& a : as) d.push_back(a.dim());
  return d;
}

std::vector<std::size_t> module_dims(const std::vector<Bimodule>& ms) {
  std::vector<std::size_t> d;
  for (const auto& m : ms) d.push_back(m.dim());
  return d;
}

}  // namespace

AlgebraPresheaf::AlgebraPresheaf(FiniteSite s, std::vector<Algebra> algebras,
                                 const std::map<std::pair<std::size_t, std::size_t>, Matrix>& given)
    : site_(std::move(s)), algebras_(std::move(algebras)) {
  if (algebras_.size() != site_.size()) throw DimensionMismatch("algebra presheaf: one algebra per object required");
  for (const auto& a : algebras_)
    if (!(a.field() == algebras_[0].field())) throw FieldMismatch("algebra presheaf: algebras over different fields");
  maps_ = RestrictionMaps(site_, field(), algebra_dims(algebras_), given, "algebra presheaf");
  for (std::size_t u = 0; u < site_.size(); ++u)
    for (std::size_t v = 0; v < site_.size(); ++v) {
      if (!site_.less(v, u)) continue;
      AlgebraHom h = AlgebraHom::unchecked(algebras_[u], algebras_[v], maps_(u, v));
      if (auto err = h.check())
        throw InvariantViolation("algebra presheaf: restriction " + site_.name(u) + " -> " + site_.name(v) + " " + *err);
    }
}

AlgebraPresheaf AlgebraPresheaf::constant(const FiniteSite& s, const Algebra& a) {
  std::map<std::pair<std::size_t, std::size_t>, Matrix> given;
  for (std::size_t u = 0; u < s.size(); ++u)
    for (std::size_t v : s.maximal_below(u)) given[{u, v}] = Matrix::identity(a.field(), a.dim());
  return AlgebraPresheaf(s, std::vector<Algebra>(s.size(), a), given);
}

AlgebraHom AlgebraPresheaf::hom(std::size_t u, std::size_t v) const {
  return AlgebraHom::unchecked(algebras_[u], algebras_[v], maps_(u, v));
}

BimodulePresheaf::BimodulePresheaf(AlgebraPresheaf a, std::vector<Bimodule> modules,
                                   const std::map<std::pair<std::size_t, std::size_t>, Matrix>& given)
    : a_(std::move(a)), modules_(std::move(modules)) {
  const FiniteSite& s = a_.site();
  if (modules_.size() != s.size()) throw DimensionMismatch("bimodule presheaf: one bimodule per object required");
  for (std::size_t u = 0; u < s.size(); ++u)
    if (!(modules_[u].algebra() == a_.at(u)))
      throw PreconditionFailed("bimodule presheaf: bimodule at " + s.name(u) + " is not over A(" + s.name(u) + ")");
  maps_ = RestrictionMaps(s, a_.field(), module_dims(modules_), given, "bimodule presheaf");
  for (std::size_t u = 0; u < s.size(); ++u)
    for (std::size_t v = 0; v < s.size(); ++v) {
      if (!s.less(v, u)) continue;
      const Matrix& rm = maps_(u, v);
      const Matrix& ra = a_.restriction(u, v);
      for (std::size_t i = 0; i < a_.at(u).dim(); ++i) {
        Vector img = ra.column(i);
        if (!(rm * modules_[u].left(i) == modules_[v].left_of(img) * rm) ||
            !(rm * modules_[u].right(i) == modules_[v].right_of(img) * rm))
          throw InvariantViolation("bimodule presheaf: restriction " + s.name(u) + " -> " + s.name(v) +
                                   " is not compatible with the action of " + a_.at(u).labels()[i]);
      }
    }
}

BimodulePresheaf BimodulePresheaf::regular(const AlgebraPresheaf& a) {
  const FiniteSite& s = a.site();
  std::vector<Bimodule> ms;
  std::map<std::pair<std::size_t, std::size_t>, Matrix> given;
  for (std::size_t u = 0; u < s.size(); ++u) {
    ms.push_back(regular_bimodule(a.at(u)));
    for (std::size_t v = 0; v < s.size(); ++v)
      if (s.less(v, u)) given[{u, v}] = a.restriction(u, v);
  }
  return BimodulePresheaf(a, std::move(ms), given);
}

BimodulePresheaf BimodulePresheaf::zero(const AlgebraPresheaf& a) {
  const FiniteSite& s = a.site();
  std::vector<Bimodule> ms;
  std::map<std::pair<std::size_t, std::size_t>, Matrix> given;
  for (std::size_t u = 0; u < s.size(); ++u) {
    ms.push_back(Bimodule::zero(a.at(u)));
    for (std::size_t v = 0; v < s.size(); ++v)
      if (s.less(v, u)) given[{u, v}] = Matrix(a.field(), 0, 0);
  }
  return BimodulePresheaf(a, std::move(ms), given);
}

LinearPresheaf BimodulePresheaf::linear() const {
  return LinearPresheaf(site(), field(), module_dims(modules_), maps_);
}

// ---------------------------------------------------------------- nerve and Cech

CochainComplex nerve_complex(const LinearPresheaf& f, const std::vector<bool>* mask) {
  const FiniteSite& s = f.site();
  const Field fld = f.field();
  ChainIndex idx(s, mask);
  const int top = std::max(idx.max_length(), 0);
  std::vector<std::vector<std::size_t>> offsets(static_cast<std::size_t>(top) + 1);
  std::vector<std::size_t> dims;
  for (int p = 0; p <= top; ++p) {
    std::size_t off = 0;
    for (const auto& c : idx.chains(static_cast<std::size_t>(p))) {
      offsets[static_cast<std::size_t>(p)].push_back(off);
      off += f.dim(c.back());
    }
    dims.push_back(off);
  }
  std::vector<Matrix> ds;
  const Scalar one = Scalar::one(fld), minus = -one;
  for (int pi = 0; pi < top; ++pi) {
    const std::size_t p = static_cast<std::size_t>(pi);
    Matrix d(fld, dims[p + 1], dims[p]);
    const auto& targets = idx.chains(p + 1);
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const Chain& c = targets[t];
      const std::size_t row = offsets[p + 1][t];
      for (std::size_t drop = 0; drop <= p + 1; ++drop) {
        Chain face = c;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
        const std::size_t j = *idx.find(face);
        const std::size_t col = offsets[p][j];
        if (drop == p + 1) {
          d.add_block(row, col, f.restriction(c[p], c[p + 1]), one);
        } else {
          const std::size_t dim = f.dim(c.back());
          const bool negative = (drop == 0) ? ((p + 1) % 2 == 1) : ((p + 1 - drop) % 2 == 1);
          d.add_block(row, col, Matrix::identity(fld, dim), negative ? minus : one);
        }
      }
    }
    ds.push_back(std::move(d));
  }
  return CochainComplex(fld, 0, std::move(dims), std::move(ds));
}

std::vector<Matrix> nerve_chain_map(const LinearPresheaf& f, const LinearPresheaf& g, const std::vector<Matrix>& components) {
  const FiniteSite& s = f.site();
  if (components.size() != s.size()) throw DimensionMismatch("nerve_chain_map: one component per object required");
  for (std::size_t u = 0; u < s.size(); ++u)
    if (components[u].rows() != g.dim(u) || components[u].cols() != f.dim(u))
      throw DimensionMismatch("nerve_chain_map: component at " + s.name(u) + " has the wrong shape");
  ChainIndex idx(s);
  std::vector<Matrix> out;
  for (int p = 0; p <= std::max(idx.max_length(), 0); ++p) {
    Matrix m(f.field(), 0, 0);
    for (const auto& c : idx.chains(static_cast<std::size_t>(p))) m = Matrix::direct_sum(m, components[c.back()]);
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<std::vector<std::size_t>> cech_tuples(std::size_t members, std::size_t p) {
  std::vector<std::vector<std::size_t>> out;
  if (p + 1 > members) return out;
  std::vector<std::size_t> cur(p + 1);
  for (std::size_t i = 0; i <= p; ++i) cur[i] = i;
  for (;;) {
    out.push_back(cur);
    std::size_t k = p + 1;
    while (k > 0 && cur[k - 1] == members - (p + 1 - (k - 1))) --k;
    if (k == 0) break;
    ++cur[k - 1];
    for (std::size_t i = k; i <= p; ++i) cur[i] = cur[i - 1] + 1;
  }
  return out;
}

CochainComplex cech_complex(const LinearPresheaf& f, const std::vector<std::size_t>& cover, int max_degree) {
  const FiniteSite& s = f.site();
  const Field fld = f.field();
  if (cover.empty()) throw PreconditionFailed("cech complex needs a nonempty cover");
  for (std::size_t u : cover)
    if (u >= s.size()) throw DimensionMismatch("cech complex: cover member is not an object");
  int top = static_cast<int>(cover.size()) - 1;
  if (max_degree >= 0) top = std::min(top, max_degree);
  auto meet_of = [&](const std::vector<std::size_t>& t) {
    std::vector<std::size_t> objs;
    for (std::size_t i : t) objs.push_back(cover[i]);
    return s.require_meet(objs);
  };
  std::vector<std::vector<std::vector<std::size_t>>> tuples;
  std::vector<std::vector<std::size_t>> meets, offsets;
  std::vector<std::size_t> dims;
  for (int p = 0; p <= top; ++p) {
    tuples.push_back(cech_tuples(cover.size(), static_cast<std::size_t>(p)));
    meets.emplace_back();
    offsets.emplace_back();
    std::size_t off = 0;
    for (const auto& t : tuples.back()) {
      meets.back().push_back(meet_of(t));
      offsets.back().push_back(off);
      off += f.dim(meets.back().back());
    }
    dims.push_back(off);
  }
  std::vector<Matrix> ds;
  const Scalar one = Scalar::one(fld), minus = -one;
  for (int pi = 0; pi < top; ++pi) {
    const std::size_t p = static_cast<std::size_t>(pi);
    Matrix d(fld, dims[p + 1], dims[p]);
    for (std::size_t t = 0; t < tuples[p + 1].size(); ++t) {
      const auto& tau = tuples[p + 1][t];
      for (std::size_t j = 0; j <= p + 1; ++j) {
        auto sigma = tau;
        sigma.erase(sigma.begin() + static_cast<std::ptrdiff_t>(j));
        std::size_t k = static_cast<std::size_t>(std::find(tuples[p].begin(), tuples[p].end(), sigma) - tuples[p].begin());
        d.add_block(offsets[p + 1][t], offsets[p][k], f.restriction(meets[p][k], meets[p + 1][t]), j % 2 ? minus : one);
      }
    }
    ds.push_back(std::move(d));
  }
  return CochainComplex(fld, 0, std::move(dims), std::move(ds));
}

// ---------------------------------------------------------------- center presheaf

CenterPresheaf center_presheaf(const BimodulePresheaf& m) {
  const FiniteSite& s = m.site();
  const Field f = m.field();
  CenterPresheaf out;
  std::vector<std::size_t> dims;
  for (std::size_t u = 0; u < s.size(); ++u) {
    Matrix eq(f, 0, m.at(u).dim());
    for (std::size_t v = 0; v < s.size(); ++v) {
      if (!s.leq(v, u)) continue;
      const Bimodule& mv = m.at(v);
      for (std::size_t i = 0; i < mv.algebra().dim(); ++i)
        eq = Matrix::vstack(eq, (mv.left(i) - mv.right(i)) * m.restriction(u, v));
    }
    out.inclusion.push_back(Matrix::from_columns(f, m.at(u).dim(), kernel_basis(eq)));
    dims.push_back(out.inclusion.back().cols());
  }
  std::map<std::pair<std::size_t, std::size_t>, Matrix> given;
  for (std::size_t u = 0; u < s.size(); ++u)
    for (std::size_t v = 0; v < s.size(); ++v) {
      if (!s.less(v, u)) continue;
      Matrix r(f, dims[v], dims[u]);
      for (std::size_t j = 0; j < dims[u]; ++j) {
        auto x = solve(out.inclusion[v], m.restriction(u, v).apply(out.inclusion[u].column(j)));
        if (!x) throw InvariantViolation("center presheaf: restriction leaves the center");
        r.set_column(j, *x);
      }
      given[{u, v}] = std::move(r);
    }
  out.presheaf = LinearPresheaf(s, f, std::move(dims), given);
  return out;
}

}  // namespace hochdef
