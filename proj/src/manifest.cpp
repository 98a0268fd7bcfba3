#include "hochdef/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace hochdef {

ManifestError::ManifestError(Kind kind, std::size_t line, const std::string& message)
    : Error((line ? "line " + std::to_string(line) + ": " : std::string()) + to_string(kind) + ": " + message),
      kind_(kind),
      line_(line),
      detail_(message) {}

const char* to_string(ManifestError::Kind kind) {
  switch (kind) {
    case ManifestError::Kind::syntax: return "syntax error";
    case ManifestError::Kind::unknown_name: return "unknown name";
    case ManifestError::Kind::invariant: return "invariant violation";
  }
  return "error";
}

namespace {

using Kind = ManifestError::Kind;

const std::set<std::string> kCommands = {"hochschild", "exal", "nerve", "cech",    "gs",
                                         "les",        "obstruct", "diffop", "induced", "selftest"};
const std::set<std::string> kNameParams = {"algebra", "bimodule", "presheaf", "bimodule_presheaf", "extension"};

[[noreturn]] void fail(Kind k, std::size_t line, const std::string& msg) { throw ManifestError(k, line, msg); }

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.' || c == '-' || c == '+';
  });
}

struct Entry {
  std::vector<std::string> keys;
  std::string value;
  std::size_t line = 0;
};

struct Section {
  std::string kind, name;
  std::size_t line = 0;
  std::vector<Entry> entries;
  std::vector<std::pair<std::string, std::size_t>> raw;  // commands section
};

std::vector<Section> split_sections(const std::string& text) {
  static const std::set<std::string> kinds = {"settings", "algebra", "bimodule", "hom", "site", "presheaf",
                                              "bimodule_presheaf", "extension", "commands"};
  static const std::set<std::string> named = {"algebra", "bimodule", "hom", "presheaf", "bimodule_presheaf", "extension"};
  std::vector<Section> out;
  std::istringstream in(text);
  std::size_t lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[' && line.find('=') == std::string::npos) {
      if (line.back() != ']') fail(Kind::syntax, lineno, "unterminated section header");
      std::vector<std::string> w = words(line.substr(1, line.size() - 2));
      if (w.empty() || !kinds.count(w[0])) fail(Kind::syntax, lineno, "unknown section '" + line + "'");
      Section s;
      s.kind = w[0];
      s.line = lineno;
      if (named.count(w[0])) {
        if (w.size() != 2 || !valid_name(w[1])) fail(Kind::syntax, lineno, "section [" + w[0] + "] needs one name");
        s.name = w[1];
      } else if (w.size() != 1) {
        fail(Kind::syntax, lineno, "section [" + w[0] + "] takes no name");
      }
      out.push_back(std::move(s));
      continue;
    }
    if (out.empty()) fail(Kind::syntax, lineno, "entry outside any section");
    if (out.back().kind == "commands") {
      out.back().raw.emplace_back(line, lineno);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(Kind::syntax, lineno, "expected 'key = value'");
    Entry e;
    e.keys = words(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = lineno;
    if (e.keys.empty()) fail(Kind::syntax, lineno, "missing key before '='");
    if (e.value.empty()) fail(Kind::syntax, lineno, "missing value after '='");
    out.back().entries.push_back(std::move(e));
  }
  return out;
}

Field parse_field(const std::string& v, std::size_t line) {
  if (v == "Q") return Field::rationals();
  std::string digits;
  if (v.size() > 1 && v[0] == 'F') digits = v.substr(1);
  else if (v.size() > 4 && v.rfind("GF(", 0) == 0 && v.back() == ')') digits = v.substr(3, v.size() - 4);
  if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
      digits.size() > 10)
    fail(Kind::syntax, line, "field must be Q, F<p> or GF(<p>), got '" + v + "'");
  try {
    return Field::prime(static_cast<std::uint32_t>(std::stoul(digits)));
  } catch (const Error& e) {
    fail(Kind::invariant, line, e.what());
  }
}

std::size_t parse_count(const std::string& v, std::size_t line) {
  if (v.empty() || v.size() > 12 || !std::all_of(v.begin(), v.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    fail(Kind::syntax, line, "expected a nonnegative integer, got '" + v + "'");
  return static_cast<std::size_t>(std::stoull(v));
}

bool parse_flag(const std::string& v, std::size_t line) {
  if (v == "yes" || v == "true") return true;
  if (v == "no" || v == "false") return false;
  fail(Kind::syntax, line, "expected yes or no, got '" + v + "'");
}

Scalar parse_scalar(Field f, const std::string& tok, std::size_t line) {
  try {
    return Scalar::parse(f, tok);
  } catch (const Error& e) {
    fail(Kind::syntax, line, e.what());
  }
}

// Bracketed list "[a, b c]"; entries separated by commas or blanks.
Vector parse_vector(Field f, const std::string& text, std::size_t line) {
  std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') fail(Kind::syntax, line, "expected a bracketed vector");
  std::string inner = t.substr(1, t.size() - 2);
  if (inner.find_first_of("[]") != std::string::npos) fail(Kind::syntax, line, "nested brackets in a vector");
  std::replace(inner.begin(), inner.end(), ',', ' ');
  Vector v;
  for (const std::string& w : words(inner)) v.push_back(parse_scalar(f, w, line));
  return v;
}

Vector parse_vector(Field f, const std::string& text, std::size_t n, std::size_t line, const std::string& what) {
  Vector v = parse_vector(f, text, line);
  if (v.size() != n)
    fail(Kind::syntax, line, what + " needs " + std::to_string(n) + " entries, got " + std::to_string(v.size()));
  return v;
}

// Row list "[[a, b], [c, d]]".
Matrix parse_matrix(Field f, const std::string& text, std::size_t rows, std::size_t cols, std::size_t line,
                    const std::string& what) {
  std::string t = trim(text);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') fail(Kind::syntax, line, what + ": expected a row list");
  std::string inner = t.substr(1, t.size() - 2);
  std::vector<Vector> parsed;
  std::size_t pos = 0;
  while (true) {
    std::size_t open = inner.find('[', pos);
    std::string gap = inner.substr(pos, open == std::string::npos ? std::string::npos : open - pos);
    for (char c : gap)
      if (!std::isspace(static_cast<unsigned char>(c)) && c != ',') fail(Kind::syntax, line, what + ": stray text in row list");
    if (open == std::string::npos) break;
    std::size_t close = inner.find(']', open);
    if (close == std::string::npos) fail(Kind::syntax, line, what + ": unterminated row");
    parsed.push_back(parse_vector(f, inner.substr(open, close - open + 1), line));
    pos = close + 1;
  }
  if (parsed.size() != rows)
    fail(Kind::syntax, line, what + " needs " + std::to_string(rows) + " rows, got " + std::to_string(parsed.size()));
  Matrix m(f, rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (parsed[r].size() != cols)
      fail(Kind::syntax, line, what + " row " + std::to_string(r + 1) + " needs " + std::to_string(cols) + " entries");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = parsed[r][c];
  }
  return m;
}

// Runs a library constructor and relocates its diagnostics.
template <class F>
auto located(std::size_t line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ManifestError&) {
    throw;
  } catch (const CapExceeded&) {
    throw;
  } catch (const Error& e) {
    fail(Kind::invariant, line, e.what());
  }
}

std::string join(const std::vector<std::string>& w) {
  std::string out;
  for (const auto& s : w) out += (out.empty() ? "" : " ") + s;
  return out;
}

std::string format_vector(const Vector& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i].to_string();
  return out + "]";
}

std::string format_matrix(const Matrix& m) {
  std::string out = "[";
  for (std::size_t r = 0; r < m.rows(); ++r) out += (r ? ", " : "") + format_vector(m.row(r));
  return out + "]";
}

template <class T>
const T* find_named(const std::vector<std::pair<std::string, T>>& v, const std::string& name) {
  for (const auto& [n, x] : v)
    if (n == name) return &x;
  return nullptr;
}

class Loader {
 public:
  explicit Loader(const std::string& text) : sections_(split_sections(text)) {}

  Manifest run() {
    check_duplicates();
    for (const Section& s : sections_)
      if (s.kind == "settings") settings(s);
    for (const Section& s : sections_)
      if (s.kind == "algebra") m_.algebras.emplace_back(s.name, algebra(s));
    for (const Section& s : sections_)
      if (s.kind == "bimodule") m_.bimodules.emplace_back(s.name, bimodule(s));
    for (const Section& s : sections_)
      if (s.kind == "hom") m_.homs.emplace_back(s.name, hom(s));
    for (const Section& s : sections_)
      if (s.kind == "site") site(s);
    for (const Section& s : sections_)
      if (s.kind == "presheaf") m_.presheaves.emplace_back(s.name, presheaf(s));
    for (const Section& s : sections_)
      if (s.kind == "bimodule_presheaf") m_.bimodule_presheaves.emplace_back(s.name, bimodule_presheaf(s));
    for (const Section& s : sections_)
      if (s.kind == "extension") m_.extensions.emplace_back(s.name, extension(s));
    for (const Section& s : sections_)
      if (s.kind == "commands") commands(s);
    return std::move(m_);
  }

 private:
  Field field() const { return m_.settings.field; }

  void check_duplicates() {
    std::set<std::pair<std::string, std::string>> seen;
    std::set<std::string> singles;
    for (const Section& s : sections_) {
      if (s.name.empty()) {
        if (!singles.insert(s.kind).second) fail(Kind::syntax, s.line, "section [" + s.kind + "] appears twice");
      } else if (!seen.insert({s.kind, s.name}).second) {
        fail(Kind::syntax, s.line, s.kind + " '" + s.name + "' declared twice");
      }
    }
  }

  static void no_extra(const Entry& e, std::size_t n) {
    if (e.keys.size() != n) fail(Kind::syntax, e.line, "unexpected arguments to '" + e.keys[0] + "'");
  }

  void settings(const Section& s) {
    for (const Entry& e : s.entries) {
      no_extra(e, 1);
      const std::string& k = e.keys[0];
      if (k == "field") m_.settings.field = parse_field(e.value, e.line);
      else if (k == "degree_cap") m_.settings.degree_cap = static_cast<int>(parse_count(e.value, e.line));
      else if (k == "order_cap") m_.settings.order_cap = parse_count(e.value, e.line);
      else if (k == "size_cap") m_.settings.size_cap = parse_count(e.value, e.line);
      else if (k == "deformation_order") m_.settings.deformation_order = parse_count(e.value, e.line);
      else fail(Kind::syntax, e.line, "unknown setting '" + k + "'");
    }
  }

  Algebra builtin(const std::string& v, std::size_t line) {
    std::vector<std::string> w = words(v);
    auto arg = [&]() -> std::size_t {
      if (w.size() != 2) fail(Kind::syntax, line, "builtin '" + w[0] + "' takes one size argument");
      std::size_t n = parse_count(w[1], line);
      if (n == 0) fail(Kind::syntax, line, "builtin size must be positive");
      return n;
    };
    auto none = [&] {
      if (w.size() != 1) fail(Kind::syntax, line, "builtin '" + w[0] + "' takes no argument");
    };
    Field f = field();
    if (w[0] == "k") return none(), algebras::ground(f);
    if (w[0] == "dual_numbers") return none(), algebras::dual_numbers(f);
    if (w[0] == "triangular") return none(), algebras::upper_triangular(f);
    if (w[0] == "truncated") return algebras::truncated_polynomial(f, arg());
    if (w[0] == "matrix") return algebras::matrix_algebra(f, arg());
    if (w[0] == "diagonal") return algebras::diagonal(f, arg());
    fail(Kind::unknown_name, line, "no builtin algebra '" + w[0] + "'");
  }

  Algebra algebra(const Section& s) {
    std::optional<std::vector<std::string>> basis;
    std::optional<Algebra> built;
    for (const Entry& e : s.entries)
      if (e.keys[0] == "builtin") {
        no_extra(e, 1);
        built = builtin(e.value, e.line);
      } else if (e.keys[0] == "basis") {
        no_extra(e, 1);
        basis = words(e.value);
        std::set<std::string> uniq(basis->begin(), basis->end());
        if (uniq.size() != basis->size()) fail(Kind::syntax, e.line, "repeated basis label");
        for (const auto& l : *basis)
          if (!valid_name(l)) fail(Kind::syntax, e.line, "bad basis label '" + l + "'");
      }
    if (built) {
      if (basis || s.entries.size() != 1) fail(Kind::syntax, s.line, "builtin algebra takes no other entries");
      return *built;
    }
    if (!basis) fail(Kind::syntax, s.line, "algebra '" + s.name + "' needs a basis");
    const std::size_t n = basis->size();
    auto label = [&](const std::string& l, std::size_t line) {
      auto it = std::find(basis->begin(), basis->end(), l);
      if (it == basis->end()) fail(Kind::unknown_name, line, "algebra '" + s.name + "' has no basis element '" + l + "'");
      return static_cast<std::size_t>(it - basis->begin());
    };
    std::vector<Scalar> c(n * n * n, Scalar::zero(field()));
    std::optional<Vector> unit;
    std::set<std::pair<std::size_t, std::size_t>> given;
    for (const Entry& e : s.entries) {
      const std::string& k = e.keys[0];
      if (k == "basis") continue;
      if (k == "unit") {
        no_extra(e, 1);
        unit = parse_vector(field(), e.value, n, e.line, "unit");
      } else if (k == "product") {
        if (e.keys.size() != 3) fail(Kind::syntax, e.line, "expected 'product <a> <b> = [...]'");
        std::size_t i = label(e.keys[1], e.line), j = label(e.keys[2], e.line);
        if (!given.insert({i, j}).second) fail(Kind::syntax, e.line, "product given twice");
        Vector v = parse_vector(field(), e.value, n, e.line, "product");
        for (std::size_t k2 = 0; k2 < n; ++k2) c[(i * n + j) * n + k2] = v[k2];
      } else {
        fail(Kind::syntax, e.line, "unknown algebra entry '" + k + "'");
      }
    }
    if (!unit) fail(Kind::syntax, s.line, "algebra '" + s.name + "' needs a unit");
    Algebra a = Algebra::unchecked(field(), *basis, c, *unit);
    if (auto t = a.associativity_failure())
      fail(Kind::invariant, s.line,
           "algebra '" + s.name + "' is not associative at (i,j,k) = (" + std::to_string(t->i) + "," + std::to_string(t->j) + "," +
               std::to_string(t->k) + ") = (" + (*basis)[t->i] + "," + (*basis)[t->j] + "," + (*basis)[t->k] + ")");
    if (auto err = a.check()) fail(Kind::invariant, s.line, "algebra '" + s.name + "': " + *err);
    return a;
  }

  const Algebra& need_algebra(const std::string& name, std::size_t line) {
    const Algebra* a = find_named(m_.algebras, name);
    if (!a) fail(Kind::unknown_name, line, "undeclared algebra '" + name + "'");
    return *a;
  }

  Bimodule bimodule(const Section& s) {
    std::string over;
    std::optional<std::size_t> dim;
    bool regular = false, zero = false;
    for (const Entry& e : s.entries) {
      if (e.keys[0] == "algebra") no_extra(e, 1), over = e.value;
      else if (e.keys[0] == "dim") no_extra(e, 1), dim = parse_count(e.value, e.line);
      else if (e.keys[0] == "regular") no_extra(e, 1), regular = parse_flag(e.value, e.line);
      else if (e.keys[0] == "zero") no_extra(e, 1), zero = parse_flag(e.value, e.line);
      else if (e.keys[0] != "left" && e.keys[0] != "right") fail(Kind::syntax, e.line, "unknown bimodule entry '" + e.keys[0] + "'");
    }
    if (over.empty()) fail(Kind::syntax, s.line, "bimodule '" + s.name + "' needs 'algebra ='");
    const Algebra& a = need_algebra(over, s.line);
    m_.bimodule_over[s.name] = over;
    if (regular || zero) {
      if (regular && zero) fail(Kind::syntax, s.line, "bimodule cannot be both regular and zero");
      if (s.entries.size() != 2) fail(Kind::syntax, s.line, "regular or zero bimodule takes no other entries");
      return regular ? regular_bimodule(a) : Bimodule::zero(a);
    }
    if (!dim) fail(Kind::syntax, s.line, "bimodule '" + s.name + "' needs 'dim ='");
    std::vector<std::optional<Matrix>> left(a.dim()), right(a.dim());
    for (const Entry& e : s.entries) {
      if (e.keys[0] != "left" && e.keys[0] != "right") continue;
      if (e.keys.size() != 2) fail(Kind::syntax, e.line, "expected '" + e.keys[0] + " <basis element> = [[...]]'");
      auto it = std::find(a.labels().begin(), a.labels().end(), e.keys[1]);
      if (it == a.labels().end()) fail(Kind::unknown_name, e.line, "algebra '" + over + "' has no basis element '" + e.keys[1] + "'");
      auto& slot = (e.keys[0] == "left" ? left : right)[static_cast<std::size_t>(it - a.labels().begin())];
      if (slot) fail(Kind::syntax, e.line, "action given twice");
      slot = parse_matrix(field(), e.value, *dim, *dim, e.line, e.keys[0] + " " + e.keys[1]);
    }
    std::vector<Matrix> l, r;
    for (std::size_t i = 0; i < a.dim(); ++i) {
      if (!left[i] || !right[i])
        fail(Kind::syntax, s.line, "bimodule '" + s.name + "' lacks the " + (left[i] ? "right" : "left") + " action of " + a.labels()[i]);
      l.push_back(*left[i]);
      r.push_back(*right[i]);
    }
    Bimodule m = Bimodule::unchecked(a, *dim, l, r);
    if (auto err = m.check()) fail(Kind::invariant, s.line, "bimodule '" + s.name + "': " + *err);
    return m;
  }

  NamedHom hom(const Section& s) {
    NamedHom h;
    std::optional<std::pair<std::string, std::size_t>> mat;
    for (const Entry& e : s.entries) {
      no_extra(e, 1);
      if (e.keys[0] == "source") h.source = e.value;
      else if (e.keys[0] == "target") h.target = e.value;
      else if (e.keys[0] == "matrix") mat = {e.value, e.line};
      else fail(Kind::syntax, e.line, "unknown hom entry '" + e.keys[0] + "'");
    }
    if (h.source.empty() || h.target.empty() || !mat) fail(Kind::syntax, s.line, "hom needs source, target and matrix");
    const Algebra& a = need_algebra(h.source, s.line);
    const Algebra& b = need_algebra(h.target, s.line);
    Matrix m = parse_matrix(field(), mat->first, b.dim(), a.dim(), mat->second, "hom matrix");
    AlgebraHom u = AlgebraHom::unchecked(a, b, m);
    if (auto err = u.check()) fail(Kind::invariant, s.line, "hom '" + s.name + "': " + *err);
    h.hom = u;
    return h;
  }

  std::size_t object(const std::string& name, std::size_t line) const {
    const auto& o = m_.site->objects;
    auto it = std::find(o.begin(), o.end(), name);
    if (it == o.end()) fail(Kind::unknown_name, line, "site has no object '" + name + "'");
    return static_cast<std::size_t>(it - o.begin());
  }

  void site(const Section& s) {
    SiteDecl decl;
    m_.site = decl;
    bool have_objects = false;
    for (const Entry& e : s.entries)
      if (e.keys[0] == "objects") {
        no_extra(e, 1);
        m_.site->objects = words(e.value);
        std::set<std::string> uniq(m_.site->objects.begin(), m_.site->objects.end());
        if (uniq.size() != m_.site->objects.size()) fail(Kind::syntax, e.line, "repeated object name");
        for (const auto& o : m_.site->objects)
          if (!valid_name(o)) fail(Kind::syntax, e.line, "bad object name '" + o + "'");
        have_objects = true;
      }
    if (!have_objects) fail(Kind::syntax, s.line, "site needs 'objects ='");
    std::optional<std::size_t> cover_line;
    std::vector<std::string> cover_names;
    for (const Entry& e : s.entries) {
      if (e.keys[0] == "objects") continue;
      if (e.keys[0] == "relation") {
        no_extra(e, 1);
        std::vector<std::string> w = words(e.value);
        if (w.size() != 3 || (w[1] != "<" && w[1] != "<=")) fail(Kind::syntax, e.line, "expected 'relation = V < U'");
        m_.site->relations.emplace_back(object(w[0], e.line), object(w[2], e.line));
      } else if (e.keys[0] == "cover") {
        no_extra(e, 1);
        cover_line = e.line;
        cover_names = words(e.value);
      } else {
        fail(Kind::syntax, e.line, "unknown site entry '" + e.keys[0] + "'");
      }
    }
    m_.site->site = located(s.line, [&] { return FiniteSite(m_.site->objects, m_.site->relations); });
    if (cover_line) {
      for (const auto& n : cover_names) m_.site->cover.push_back(object(n, *cover_line));
      located(*cover_line, [&] {
        m_.site->site.set_cover(m_.site->cover);
        return 0;
      });
    }
  }

  const FiniteSite& need_site(std::size_t line) const {
    if (!m_.site) fail(Kind::syntax, line, "a presheaf needs a [site] section");
    return m_.site->site;
  }

  // Restrictions on the generating relations; missing ones default to the
  // identity when both ends carry the same declared object.
  std::vector<RestrictionDecl> restrictions(const Section& s, const std::vector<std::string>& at,
                                            const std::function<std::size_t(std::size_t)>& dim, bool allow_homs) {
    const FiniteSite& site = need_site(s.line);
    std::map<std::pair<std::size_t, std::size_t>, RestrictionDecl> given;
    for (const Entry& e : s.entries) {
      if (e.keys[0] != "restriction") continue;
      if (e.keys.size() != 3) fail(Kind::syntax, e.line, "expected 'restriction <U> <V> = ...'");
      RestrictionDecl r;
      r.from = object(e.keys[1], e.line);
      r.to = object(e.keys[2], e.line);
      if (!site.less(r.to, r.from)) fail(Kind::invariant, e.line, e.keys[2] + " is not below " + e.keys[1]);
      if (!e.value.empty() && e.value.front() == '[') {
        r.matrix = parse_matrix(field(), e.value, dim(r.to), dim(r.from), e.line, "restriction");
      } else {
        if (!allow_homs) fail(Kind::syntax, e.line, "restriction must be a matrix here");
        const NamedHom* h = find_named(m_.homs, e.value);
        if (!h) fail(Kind::unknown_name, e.line, "undeclared hom '" + e.value + "'");
        if (h->source != at[r.from] || h->target != at[r.to])
          fail(Kind::invariant, e.line, "hom '" + e.value + "' does not map " + at[r.from] + " to " + at[r.to]);
        r.hom = e.value;
        r.matrix = h->hom.matrix();
      }
      if (!given.emplace(std::make_pair(r.from, r.to), r).second) fail(Kind::syntax, e.line, "restriction given twice");
    }
    for (std::size_t u = 0; u < site.size(); ++u)
      for (std::size_t v : site.maximal_below(u)) {
        if (given.count({u, v})) continue;
        if (at[u] != at[v])
          fail(Kind::syntax, s.line, "missing restriction " + site.name(u) + " -> " + site.name(v) + " in '" + s.name + "'");
        given[{u, v}] = RestrictionDecl{u, v, Matrix::identity(field(), dim(u)), ""};
      }
    std::vector<RestrictionDecl> out;
    for (auto& [k, r] : given) out.push_back(r);
    return out;
  }

  static std::map<std::pair<std::size_t, std::size_t>, Matrix> as_map(const std::vector<RestrictionDecl>& r) {
    std::map<std::pair<std::size_t, std::size_t>, Matrix> out;
    for (const auto& x : r) out[{x.from, x.to}] = x.matrix;
    return out;
  }

  std::vector<std::string> per_object(const Section& s, const std::string& what) {
    const FiniteSite& site = need_site(s.line);
    std::vector<std::string> at(site.size());
    for (const Entry& e : s.entries) {
      if (e.keys[0] == "constant") {
        no_extra(e, 1);
        std::fill(at.begin(), at.end(), e.value);
      } else if (e.keys[0] == "at") {
        if (e.keys.size() != 2) fail(Kind::syntax, e.line, "expected 'at <object> = <" + what + ">'");
        at[object(e.keys[1], e.line)] = e.value;
      }
    }
    for (std::size_t u = 0; u < at.size(); ++u)
      if (at[u].empty()) fail(Kind::syntax, s.line, "no " + what + " at object " + site.name(u) + " in '" + s.name + "'");
    return at;
  }

  PresheafDecl presheaf(const Section& s) {
    for (const Entry& e : s.entries)
      if (e.keys[0] != "constant" && e.keys[0] != "at" && e.keys[0] != "restriction")
        fail(Kind::syntax, e.line, "unknown presheaf entry '" + e.keys[0] + "'");
    PresheafDecl p;
    p.algebras = per_object(s, "algebra");
    std::vector<Algebra> algs;
    for (const auto& n : p.algebras) algs.push_back(need_algebra(n, s.line));
    p.restrictions = restrictions(s, p.algebras, [&](std::size_t u) { return algs[u].dim(); }, true);
    p.presheaf = located(s.line, [&] { return AlgebraPresheaf(m_.site->site, algs, as_map(p.restrictions)); });
    return p;
  }

  BimodulePresheafDecl bimodule_presheaf(const Section& s) {
    BimodulePresheafDecl p;
    for (const Entry& e : s.entries) {
      const std::string& k = e.keys[0];
      if (k == "algebras") no_extra(e, 1), p.algebras = e.value;
      else if (k == "regular" || k == "zero") {
        no_extra(e, 1);
        if (parse_flag(e.value, e.line)) {
          if (p.mode != "explicit") fail(Kind::syntax, e.line, "regular and zero are exclusive");
          p.mode = k;
        }
      } else if (k != "constant" && k != "at" && k != "restriction") {
        fail(Kind::syntax, e.line, "unknown bimodule_presheaf entry '" + k + "'");
      }
    }
    if (p.algebras.empty()) fail(Kind::syntax, s.line, "bimodule_presheaf '" + s.name + "' needs 'algebras ='");
    const PresheafDecl* a = find_named(m_.presheaves, p.algebras);
    if (!a) fail(Kind::unknown_name, s.line, "undeclared presheaf '" + p.algebras + "'");
    if (p.mode != "explicit") {
      if (s.entries.size() != 2) fail(Kind::syntax, s.line, "regular or zero bimodule presheaf takes no other entries");
      p.presheaf = located(s.line, [&] {
        return p.mode == "regular" ? BimodulePresheaf::regular(a->presheaf) : BimodulePresheaf::zero(a->presheaf);
      });
      return p;
    }
    p.modules = per_object(s, "bimodule");
    std::vector<Bimodule> mods;
    for (std::size_t u = 0; u < p.modules.size(); ++u) {
      const Bimodule* b = find_named(m_.bimodules, p.modules[u]);
      if (!b) fail(Kind::unknown_name, s.line, "undeclared bimodule '" + p.modules[u] + "'");
      if (m_.bimodule_over.at(p.modules[u]) != a->algebras[u])
        fail(Kind::invariant, s.line,
             "bimodule '" + p.modules[u] + "' is not over the algebra '" + a->algebras[u] + "' at " + m_.site->objects[u]);
      mods.push_back(*b);
    }
    p.restrictions = restrictions(s, p.modules, [&](std::size_t u) { return mods[u].dim(); }, false);
    p.presheaf = located(s.line, [&] { return BimodulePresheaf(a->presheaf, mods, as_map(p.restrictions)); });
    return p;
  }

  ExtensionDecl extension(const Section& s) {
    ExtensionDecl x;
    std::string target;
    bool split = false;
    for (const Entry& e : s.entries) {
      const std::string& k = e.keys[0];
      if (k == "bimodule") {
        no_extra(e, 1);
        x.kind = ExtensionDecl::Kind::algebra;
        target = "bimodule";
        x.bimodule = e.value;
      } else if (k == "bimodule_presheaf") {
        no_extra(e, 1);
        target = "bimodule_presheaf";
        x.bimodule = e.value;
      }
    }
    if (target.empty()) fail(Kind::syntax, s.line, "extension '" + s.name + "' needs 'bimodule =' or 'bimodule_presheaf ='");
    if (target == "bimodule") {
      const Bimodule* m = find_named(m_.bimodules, x.bimodule);
      if (!m) fail(Kind::unknown_name, s.line, "undeclared bimodule '" + x.bimodule + "'");
      const std::size_t n = cochain_dim(m->algebra().dim(), m->dim(), 2, m_.settings.size_cap);
      x.cocycle = zero_vector(field(), n);
      for (const Entry& e : s.entries) {
        if (e.keys[0] == "bimodule") continue;
        if (e.keys[0] != "cocycle") fail(Kind::syntax, e.line, "unknown algebra extension entry '" + e.keys[0] + "'");
        no_extra(e, 1);
        x.cocycle = parse_vector(field(), e.value, n, e.line, "cocycle");
      }
      Matrix d2 = bar_differential(m->algebra(), *m, 2, m_.settings.size_cap);
      if (!is_zero(d2.apply(x.cocycle))) fail(Kind::invariant, s.line, "extension '" + s.name + "': cocycle is not a Hochschild 2-cocycle");
      x.algebra_extension = located(s.line, [&] { return cocycle_to_extension(*m, x.cocycle); });
      return x;
    }
    const BimodulePresheafDecl* p = find_named(m_.bimodule_presheaves, x.bimodule);
    if (!p) fail(Kind::unknown_name, s.line, "undeclared bimodule_presheaf '" + x.bimodule + "'");
    const BimodulePresheaf& bp = p->presheaf;
    const FiniteSite& site = m_.site->site;
    bool glue = false, cocycle = false;
    for (const Entry& e : s.entries) {
      const std::string& k = e.keys[0];
      if (k == "bimodule_presheaf") continue;
      if (k == "split") {
        no_extra(e, 1);
        split = parse_flag(e.value, e.line);
      } else if (k == "glue") {
        if (e.keys.size() != 3) fail(Kind::syntax, e.line, "expected 'glue <U> <V> = [...]'");
        const auto& cover = m_.site->cover;
        auto member = [&](const std::string& name) {
          std::size_t o = object(name, e.line);
          auto it = std::find(cover.begin(), cover.end(), o);
          if (it == cover.end()) fail(Kind::unknown_name, e.line, "object '" + name + "' is not a cover member");
          return static_cast<std::size_t>(it - cover.begin());
        };
        std::size_t i = member(e.keys[1]), j = member(e.keys[2]);
        if (i >= j) fail(Kind::syntax, e.line, "glue pairs are written in cover order");
        std::size_t meet = located(e.line, [&] { return site.require_meet({cover[i], cover[j]}); });
        x.glue[{i, j}] = parse_vector(field(), e.value, bp.at(meet).dim(), e.line, "glue value");
        glue = true;
      } else if (k == "z02") {
        if (e.keys.size() != 2) fail(Kind::syntax, e.line, "expected 'z02 <U> = [...]'");
        std::size_t u = object(e.keys[1], e.line);
        std::size_t n = bp.algebras().at(u).dim();
        x.z02[u] = parse_vector(field(), e.value, n * n * bp.at(u).dim(), e.line, "z02 block");
        cocycle = true;
      } else if (k == "z11") {
        if (e.keys.size() != 3) fail(Kind::syntax, e.line, "expected 'z11 <U> <V> = [...]'");
        std::size_t u = object(e.keys[1], e.line), v = object(e.keys[2], e.line);
        if (!site.less(v, u)) fail(Kind::invariant, e.line, e.keys[2] + " is not below " + e.keys[1]);
        x.z11[{u, v}] = parse_vector(field(), e.value, bp.algebras().at(u).dim() * bp.at(v).dim(), e.line, "z11 block");
        cocycle = true;
      } else {
        fail(Kind::syntax, e.line, "unknown presheaf extension entry '" + k + "'");
      }
    }
    if (split + glue + cocycle != 1) fail(Kind::syntax, s.line, "extension '" + s.name + "' needs exactly one of split, glue, z02/z11");
    if (split) {
      x.kind = ExtensionDecl::Kind::presheaf_split;
      x.presheaf_extension = located(s.line, [&] { return split_presheaf_extension(bp); });
    } else if (glue) {
      x.kind = ExtensionDecl::Kind::presheaf_glue;
      if (m_.site->cover.empty()) fail(Kind::syntax, s.line, "glue needs a cover in [site]");
      x.presheaf_extension = located(s.line, [&] {
        CechCocycleM c(bp, m_.site->cover, x.glue);
        return epsilon(bp, c);
      });
    } else {
      x.kind = ExtensionDecl::Kind::presheaf_cocycle;
      x.presheaf_extension = located(s.line, [&] { return cocycle_to_presheaf_extension(bp, gs_cocycle(bp, x)); });
    }
    return x;
  }

  GSCocycle2 gs_cocycle(const BimodulePresheaf& bp, const ExtensionDecl& x) const {
    ChainIndex chains(bp.site());
    GSCocycle2 z;
    z.z02.q = 2;
    z.z11.p = 1;
    z.z11.q = 1;
    for (const Chain& c : chains.chains(0)) {
      std::size_t u = c[0], n = bp.algebras().at(u).dim();
      auto it = x.z02.find(u);
      Vector v = it != x.z02.end() ? it->second : zero_vector(field(), n * n * bp.at(u).dim());
      z.z02.values.insert(z.z02.values.end(), v.begin(), v.end());
    }
    if (chains.max_length() >= 1)
      for (const Chain& c : chains.chains(1)) {
        auto it = x.z11.find({c[0], c[1]});
        Vector v = it != x.z11.end() ? it->second : zero_vector(field(), bp.algebras().at(c[0]).dim() * bp.at(c[1]).dim());
        z.z11.values.insert(z.z11.values.end(), v.begin(), v.end());
      }
    return z;
  }

  void commands(const Section& s) {
    for (const auto& [line, lineno] : s.raw) {
      std::vector<std::string> w = words(line);
      CommandDecl c;
      c.name = w[0];
      c.line = lineno;
      if (!kCommands.count(c.name)) fail(Kind::syntax, lineno, "unknown command '" + c.name + "'");
      for (std::size_t i = 1; i < w.size(); ++i) {
        std::size_t eq = w[i].find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == w[i].size())
          fail(Kind::syntax, lineno, "command parameters are written key=value");
        std::string k = w[i].substr(0, eq), v = w[i].substr(eq + 1);
        if (!c.params.emplace(k, v).second) fail(Kind::syntax, lineno, "parameter '" + k + "' given twice");
        if (kNameParams.count(k)) {
          bool known = (k == "algebra" && find_named(m_.algebras, v)) || (k == "bimodule" && find_named(m_.bimodules, v)) ||
                       (k == "presheaf" && find_named(m_.presheaves, v)) ||
                       (k == "bimodule_presheaf" && find_named(m_.bimodule_presheaves, v)) ||
                       (k == "extension" && find_named(m_.extensions, v));
          if (!known) fail(Kind::unknown_name, lineno, "undeclared " + k + " '" + v + "'");
        }
      }
      m_.commands.push_back(std::move(c));
    }
  }

  std::vector<Section> sections_;
  Manifest m_;
};

}  // namespace

const Algebra* Manifest::algebra(const std::string& name) const { return find_named(algebras, name); }
const Bimodule* Manifest::bimodule(const std::string& name) const { return find_named(bimodules, name); }
const PresheafDecl* Manifest::presheaf(const std::string& name) const { return find_named(presheaves, name); }
const BimodulePresheafDecl* Manifest::bimodule_presheaf(const std::string& name) const {
  return find_named(bimodule_presheaves, name);
}
const ExtensionDecl* Manifest::extension(const std::string& name) const { return find_named(extensions, name); }

Manifest parse_manifest(const std::string& text) { return Loader(text).run(); }

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ManifestError(ManifestError::Kind::syntax, 0, "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_manifest(buf.str());
}

std::string serialize_manifest(const Manifest& m) {
  std::ostringstream out;
  const ManifestSettings& s = m.settings;
  out << "[settings]\nfield = " << s.field.name() << "\ndegree_cap = " << s.degree_cap << "\norder_cap = " << s.order_cap
      << "\nsize_cap = " << s.size_cap << "\ndeformation_order = " << s.deformation_order << "\n";
  for (const auto& [name, a] : m.algebras) {
    const std::size_t n = a.dim();
    out << "\n[algebra " << name << "]\nbasis = " << join(a.labels()) << "\nunit = " << format_vector(a.unit()) << "\n";
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Vector p = a.product(i, j);
        if (!is_zero(p)) out << "product " << a.labels()[i] << " " << a.labels()[j] << " = " << format_vector(p) << "\n";
      }
  }
  for (const auto& [name, b] : m.bimodules) {
    out << "\n[bimodule " << name << "]\nalgebra = " << m.bimodule_over.at(name) << "\ndim = " << b.dim() << "\n";
    const auto& labels = b.algebra().labels();
    for (std::size_t i = 0; i < labels.size(); ++i)
      out << "left " << labels[i] << " = " << format_matrix(b.left(i)) << "\nright " << labels[i] << " = "
          << format_matrix(b.right(i)) << "\n";
  }
  for (const auto& [name, h] : m.homs)
    out << "\n[hom " << name << "]\nsource = " << h.source << "\ntarget = " << h.target
        << "\nmatrix = " << format_matrix(h.hom.matrix()) << "\n";
  auto obj = [&](std::size_t u) { return m.site->objects[u]; };
  if (m.site) {
    out << "\n[site]\nobjects = " << join(m.site->objects) << "\n";
    for (auto [v, u] : m.site->relations) out << "relation = " << obj(v) << " < " << obj(u) << "\n";
    if (!m.site->cover.empty()) {
      std::vector<std::string> c;
      for (std::size_t u : m.site->cover) c.push_back(obj(u));
      out << "cover = " << join(c) << "\n";
    }
  }
  auto restrictions = [&](const std::vector<RestrictionDecl>& rs) {
    for (const auto& r : rs)
      out << "restriction " << obj(r.from) << " " << obj(r.to) << " = " << (r.hom.empty() ? format_matrix(r.matrix) : r.hom)
          << "\n";
  };
  for (const auto& [name, p] : m.presheaves) {
    out << "\n[presheaf " << name << "]\n";
    for (std::size_t u = 0; u < p.algebras.size(); ++u) out << "at " << obj(u) << " = " << p.algebras[u] << "\n";
    restrictions(p.restrictions);
  }
  for (const auto& [name, p] : m.bimodule_presheaves) {
    out << "\n[bimodule_presheaf " << name << "]\nalgebras = " << p.algebras << "\n";
    if (p.mode != "explicit") {
      out << p.mode << " = yes\n";
      continue;
    }
    for (std::size_t u = 0; u < p.modules.size(); ++u) out << "at " << obj(u) << " = " << p.modules[u] << "\n";
    restrictions(p.restrictions);
  }
  for (const auto& [name, x] : m.extensions) {
    out << "\n[extension " << name << "]\n";
    switch (x.kind) {
      case ExtensionDecl::Kind::algebra:
        out << "bimodule = " << x.bimodule << "\ncocycle = " << format_vector(x.cocycle) << "\n";
        break;
      case ExtensionDecl::Kind::presheaf_split:
        out << "bimodule_presheaf = " << x.bimodule << "\nsplit = yes\n";
        break;
      case ExtensionDecl::Kind::presheaf_glue:
        out << "bimodule_presheaf = " << x.bimodule << "\n";
        for (const auto& [ij, v] : x.glue)
          out << "glue " << obj(m.site->cover[ij.first]) << " " << obj(m.site->cover[ij.second]) << " = " << format_vector(v)
              << "\n";
        break;
      case ExtensionDecl::Kind::presheaf_cocycle:
        out << "bimodule_presheaf = " << x.bimodule << "\n";
        for (const auto& [u, v] : x.z02) out << "z02 " << obj(u) << " = " << format_vector(v) << "\n";
        for (const auto& [uv, v] : x.z11) out << "z11 " << obj(uv.first) << " " << obj(uv.second) << " = " << format_vector(v) << "\n";
        break;
    }
  }
  if (!m.commands.empty()) {
    out << "\n[commands]\n";
    for (const auto& c : m.commands) {
      out << c.name;
      for (const auto& [k, v] : c.params) out << " " << k << "=" << v;
      out << "\n";
    }
  }
  return out.str();
}

bool equivalent(const Manifest& a, const Manifest& b) {
  auto same_named = [](const auto& x, const auto& y, auto eq) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].first != y[i].first || !eq(x[i].second, y[i].second)) return false;
    return true;
  };
  auto eq = [](const auto& x, const auto& y) { return x == y; };
  if (!(a.settings == b.settings) || a.commands != b.commands || a.bimodule_over != b.bimodule_over) return false;
  if (!same_named(a.algebras, b.algebras, eq) || !same_named(a.bimodules, b.bimodules, eq)) return false;
  if (!same_named(a.homs, b.homs, [](const NamedHom& x, const NamedHom& y) {
        return x.source == y.source && x.target == y.target && x.hom.matrix() == y.hom.matrix();
      }))
    return false;
  if (a.site.has_value() != b.site.has_value()) return false;
  if (a.site && (a.site->objects != b.site->objects || a.site->relations != b.site->relations || a.site->cover != b.site->cover))
    return false;
  if (!same_named(a.presheaves, b.presheaves, [](const PresheafDecl& x, const PresheafDecl& y) {
        return x.algebras == y.algebras && x.restrictions == y.restrictions;
      }))
    return false;
  if (!same_named(a.bimodule_presheaves, b.bimodule_presheaves, [](const BimodulePresheafDecl& x, const BimodulePresheafDecl& y) {
        return x.algebras == y.algebras && x.mode == y.mode && x.modules == y.modules && x.restrictions == y.restrictions;
      }))
    return false;
  return same_named(a.extensions, b.extensions, [](const ExtensionDecl& x, const ExtensionDecl& y) {
    return x.kind == y.kind && x.bimodule == y.bimodule && x.cocycle == y.cocycle && x.glue == y.glue && x.z02 == y.z02 &&
           x.z11 == y.z11;
  });
}

}  // namespace hochdef
