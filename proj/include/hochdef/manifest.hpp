#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hochdef/errors.hpp"
#include "hochdef/obstruction.hpp"

namespace hochdef {

// Located manifest diagnostic. line is 1-based; 0 when the problem is not
// tied to one line (a missing section, say).
class ManifestError : public Error {
 public:
  enum class Kind { syntax, unknown_name, invariant };
  ManifestError(Kind kind, std::size_t line, const std::string& message);
  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  std::size_t line_;
  std::string detail_;
};

const char* to_string(ManifestError::Kind kind);

struct ManifestSettings {
  Field field;
  int degree_cap = 3;          // highest cohomological degree reported
  std::size_t order_cap = 0;   // differential operator order cap, 0 = 2 dim^2
  std::size_t size_cap = kDefaultSizeCap;
  std::size_t deformation_order = 1;
  friend bool operator==(const ManifestSettings&, const ManifestSettings&) = default;
};

struct NamedHom {
  std::string source, target;
  AlgebraHom hom;
};

// Restriction given on a generating relation, either inline or by hom name.
struct RestrictionDecl {
  std::size_t from = 0, to = 0;  // objects, to < from
  Matrix matrix;
  std::string hom;               // empty when inline
  friend bool operator==(const RestrictionDecl&, const RestrictionDecl&) = default;
};

struct PresheafDecl {
  std::vector<std::string> algebras;  // per object
  std::vector<RestrictionDecl> restrictions;
  AlgebraPresheaf presheaf;
};

struct BimodulePresheafDecl {
  std::string algebras;               // presheaf name
  std::string mode = "explicit";      // "regular", "zero" or "explicit"
  std::vector<std::string> modules;   // per object, explicit mode
  std::vector<RestrictionDecl> restrictions;
  BimodulePresheaf presheaf;
};

// An extension is either of one algebra (cocycle for a bimodule) or of a
// presheaf: split, glued from a Cech 1-cocycle on the cover, or given by a
// GS 2-cocycle (z02 per object, z11 per pair V < U; missing blocks are zero).
struct ExtensionDecl {
  enum class Kind { algebra, presheaf_split, presheaf_glue, presheaf_cocycle };
  Kind kind = Kind::algebra;
  std::string bimodule;  // bimodule name or bimodule presheaf name
  Vector cocycle;
  std::map<MemberPair, Vector> glue;               // cover member pairs i < j
  std::map<std::size_t, Vector> z02;               // by object
  std::map<std::pair<std::size_t, std::size_t>, Vector> z11;  // (U, V)
  std::optional<ExtensionDatum> algebra_extension;
  std::optional<PresheafExtension> presheaf_extension;
};

struct CommandDecl {
  std::string name;
  std::map<std::string, std::string> params;
  std::size_t line = 0;
  friend bool operator==(const CommandDecl& a, const CommandDecl& b) { return a.name == b.name && a.params == b.params; }
};

struct SiteDecl {
  std::vector<std::string> objects;
  std::vector<std::pair<std::size_t, std::size_t>> relations;  // (v, u): V <= U
  std::vector<std::size_t> cover;
  FiniteSite site;
};

struct Manifest {
  ManifestSettings settings;
  std::vector<std::pair<std::string, Algebra>> algebras;
  std::vector<std::pair<std::string, Bimodule>> bimodules;
  std::vector<std::pair<std::string, NamedHom>> homs;
  std::optional<SiteDecl> site;
  std::vector<std::pair<std::string, PresheafDecl>> presheaves;
  std::vector<std::pair<std::string, BimodulePresheafDecl>> bimodule_presheaves;
  std::vector<std::pair<std::string, ExtensionDecl>> extensions;
  std::vector<CommandDecl> commands;

  const Algebra* algebra(const std::string& name) const;
  const Bimodule* bimodule(const std::string& name) const;
  const PresheafDecl* presheaf(const std::string& name) const;
  const BimodulePresheafDecl* bimodule_presheaf(const std::string& name) const;
  const ExtensionDecl* extension(const std::string& name) const;
  // Name of the algebra each bimodule is declared over.
  std::map<std::string, std::string> bimodule_over;
};

// Throws ManifestError; every declared object is validated on load.
Manifest parse_manifest(const std::string& text);
Manifest load_manifest(const std::string& path);
std::string serialize_manifest(const Manifest& m);
// Same declarations (names, objects, generating data, commands).
bool equivalent(const Manifest& a, const Manifest& b);

}  // namespace hochdef
