#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hochdef/cli.hpp"

using namespace hochdef;

namespace {

const Field Q = Field::rationals();

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fixture(const std::string& name) { return std::string(HOCHDEF_MANIFEST_DIR) + "/" + name; }

ManifestError::Kind error_kind(const std::string& text, std::size_t* line = nullptr) {
  try {
    parse_manifest(text);
  } catch (const ManifestError& e) {
    if (line) *line = e.line();
    return e.kind();
  }
  FAIL("manifest was accepted");
  return ManifestError::Kind::syntax;
}

int tool(const std::string& args) {
  const std::string cmd = std::string(HOCHDEF_TOOL) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::ordered_json without_time(nlohmann::ordered_json j) {
  j.erase("wall_time_seconds");
  return j;
}

// 2x2 upper triangular constants with one entry changed; index (i*3+j)*3+k.
const char* kTriangularHeader = "[settings]\nfield = Q\n\n[algebra T]\nbasis = e1 e2 x\nunit = [1, 1, 0]\n";

}  // namespace

TEST_CASE("minimal manifests load") {
  Manifest m = parse_manifest("[settings]\nfield = Q\n[algebra k]\nbuiltin = k\n");
  REQUIRE(m.algebras.size() == 1);
  CHECK(m.algebras[0].second == algebras::ground(Q));
  Manifest e = parse_manifest("[algebra k]\nbasis = 1\nunit = [1]\nproduct 1 1 = [1]\n");
  CHECK(e.algebras[0].second == algebras::ground(Q));
  CHECK(e.settings.field == Q);
  Manifest f = parse_manifest("[settings]\nfield = F7\n[algebra L]\nbuiltin = dual_numbers\n");
  CHECK(f.algebras[0].second.field() == Field::prime(7));
  CHECK(f.algebras[0].second == algebras::dual_numbers(Field::prime(7)));
}

TEST_CASE("non-associative tables report the failing triple") {
  // Products of the triangular algebra, one entry perturbed at a time.
  const std::vector<std::tuple<std::string, std::string, std::vector<int>>> base = {
      {"e1", "e1", {1, 0, 0}}, {"e2", "e2", {0, 1, 0}}, {"e1", "x", {0, 0, 1}}, {"x", "e2", {0, 0, 1}}};
  const std::vector<std::string> labels = {"e1", "e2", "x"};
  const std::vector<std::tuple<std::string, std::string, std::vector<int>>> perturbations = {
      {"x", "e1", {0, 0, 1}}, {"x", "x", {1, 0, 0}}, {"e2", "e1", {0, 0, 1}}};
  for (const auto& [pa, pb, pv] : perturbations) {
    std::vector<int> c(27, 0);
    auto index = [&](const std::string& l) { return static_cast<std::size_t>(std::find(labels.begin(), labels.end(), l) - labels.begin()); };
    std::string text = kTriangularHeader;
    auto add = [&](const std::string& a, const std::string& b, const std::vector<int>& v) {
      for (std::size_t k = 0; k < 3; ++k) c[(index(a) * 3 + index(b)) * 3 + k] = v[k];
      text += "product " + a + " " + b + " = [" + std::to_string(v[0]) + ", " + std::to_string(v[1]) + ", " + std::to_string(v[2]) + "]\n";
    };
    for (const auto& [a, b, v] : base) add(a, b, v);
    add(pa, pb, pv);
    // First failing triple in lexicographic order, from the raw constants.
    std::optional<std::array<std::size_t, 3>> expected;
    for (std::size_t i = 0; i < 3 && !expected; ++i)
      for (std::size_t j = 0; j < 3 && !expected; ++j)
        for (std::size_t k = 0; k < 3 && !expected; ++k)
          for (std::size_t out = 0; out < 3; ++out) {
            long lhs = 0, rhs = 0;
            for (std::size_t l = 0; l < 3; ++l) {
              lhs += c[(i * 3 + j) * 3 + l] * c[(l * 3 + k) * 3 + out];
              rhs += c[(j * 3 + k) * 3 + l] * c[(i * 3 + l) * 3 + out];
            }
            if (lhs != rhs) {
              expected = std::array<std::size_t, 3>{i, j, k};
              break;
            }
          }
    REQUIRE(expected);
    try {
      parse_manifest(text);
      FAIL("perturbed table accepted");
    } catch (const ManifestError& e) {
      CHECK(e.kind() == ManifestError::Kind::invariant);
      CHECK(e.line() == 4);
      const std::string triple = "(" + std::to_string((*expected)[0]) + "," + std::to_string((*expected)[1]) + "," +
                                 std::to_string((*expected)[2]) + ")";
      CHECK(e.detail().find(triple) != std::string::npos);
    }
  }
}

TEST_CASE("unknown names and syntax errors are distinct and located") {
  const std::string site =
      "[algebra k]\nbuiltin = k\n[bimodule K]\nalgebra = k\nregular = yes\n[site]\nobjects = U V\nrelation = V < U\n"
      "[presheaf A]\nconstant = k\n";
  std::size_t line = 0;
  CHECK(error_kind(site + "[bimodule_presheaf M]\nalgebras = A\nat U = K\nat V = Missing\n", &line) ==
        ManifestError::Kind::unknown_name);
  CHECK(line == 11);
  CHECK(error_kind(site + "[extension E]\nbimodule = Nope\n") == ManifestError::Kind::unknown_name);
  CHECK(error_kind(site + "[commands]\nhochschild bimodule=Nope\n", &line) == ManifestError::Kind::unknown_name);
  CHECK(line == 12);
  CHECK(error_kind("[algebra k]\nbasis = 1\nunit = [1]\nproduct 1 y = [1]\n", &line) == ManifestError::Kind::unknown_name);
  CHECK(line == 4);

  CHECK(error_kind("[algebra k]\nbasis 1\n", &line) == ManifestError::Kind::syntax);
  CHECK(line == 2);
  CHECK(error_kind("[algebra k]\nbasis = 1\nunit = [1/0]\n", &line) == ManifestError::Kind::syntax);
  CHECK(line == 3);
  CHECK(error_kind("[algebra k]\nbasis = 1\nunit = [1, 0]\n") == ManifestError::Kind::syntax);
  CHECK(error_kind("[frobnicate]\n") == ManifestError::Kind::syntax);
  CHECK(error_kind("[settings]\nfield = F6\n") == ManifestError::Kind::invariant);
  CHECK(error_kind("[commands]\ntransmogrify\n") == ManifestError::Kind::syntax);
  // Unit that is not a unit.
  CHECK(error_kind("[algebra k]\nbasis = 1\nunit = [2]\nproduct 1 1 = [1]\n") == ManifestError::Kind::invariant);
  // Restriction that is not an algebra map.
  CHECK(error_kind(site + "[presheaf B]\nconstant = k\nrestriction U V = [[2]]\n", &line) == ManifestError::Kind::invariant);
  // Cycle in the order.
  CHECK(error_kind("[site]\nobjects = U V\nrelation = V < U\nrelation = U < V\n") == ManifestError::Kind::invariant);
}

TEST_CASE("manifests round-trip through text") {
  std::vector<std::string> texts;
  for (const char* f : {"dual_numbers.txt", "vee_skyscraper.txt", "outer_twist.txt"}) texts.push_back(read_file(fixture(f)));
  texts.push_back(
      "[settings]\nfield = F5\norder_cap = 4\n[algebra L]\nbuiltin = dual_numbers\n[algebra K]\nbuiltin = k\n"
      "[hom aug]\nsource = L\ntarget = K\nmatrix = [[1, 0]]\n[site]\nobjects = U V\nrelation = V < U\n"
      "[presheaf A]\nat U = L\nat V = K\nrestriction U V = aug\n[bimodule_presheaf R]\nalgebras = A\nregular = yes\n"
      "[extension S]\nbimodule_presheaf = R\nsplit = yes\n[commands]\ngs bimodule_presheaf=R\n");
  texts.push_back(
      "[algebra T]\nbuiltin = triangular\n[site]\nobjects = U0 U1 U2 U01 U02 U12 U012\n"
      "relation = U01 < U0\nrelation = U01 < U1\nrelation = U02 < U0\nrelation = U02 < U2\nrelation = U12 < U1\n"
      "relation = U12 < U2\nrelation = U012 < U01\nrelation = U012 < U02\nrelation = U012 < U12\ncover = U0 U1 U2\n"
      "[presheaf A]\nconstant = T\n[bimodule_presheaf R]\nalgebras = A\nregular = yes\n"
      "[extension C]\nbimodule_presheaf = R\nglue U0 U1 = [1, 2, 0]\nglue U1 U2 = [-1, -2, 0]\nglue U0 U2 = [0, 0, 0]\n");
  texts.push_back(
      "[algebra L]\nbuiltin = dual_numbers\n[bimodule R]\nalgebra = L\nregular = yes\n[site]\nobjects = U V\nrelation = V < U\n"
      "[presheaf A]\nconstant = L\n[bimodule_presheaf M]\nalgebras = A\nat U = R\nat V = R\n"
      "[extension Z]\nbimodule_presheaf = M\nz02 U = [0, 0, 0, 0, 0, 0, 1, 0]\nz02 V = [0, 0, 0, 0, 0, 0, 1, 0]\n");
  for (const std::string& t : texts) {
    Manifest a = parse_manifest(t);
    const std::string once = serialize_manifest(a);
    Manifest b = parse_manifest(once);
    CHECK(equivalent(a, b));
    CHECK(serialize_manifest(b) == once);
  }
  // Equivalence is not vacuous.
  Manifest a = parse_manifest(texts[0]);
  Manifest b = parse_manifest(texts[0] + "\n[algebra extra]\nbuiltin = k\n");
  CHECK(!equivalent(a, b));
}

TEST_CASE("reports") {
  Manifest lam = load_manifest(fixture("dual_numbers.txt"));
  auto r = run(lam, "hochschild");
  REQUIRE(r["results"].size() == 1);
  CHECK(r["results"][0]["dims"] == nlohmann::json({2, 1, 1, 1}));
  CHECK(checks_passed(r));
  CHECK(r.dump() != run(lam, "hochschild", {std::nullopt, std::nullopt, true}).dump());

  Manifest vee = load_manifest(fixture("vee_skyscraper.txt"));
  auto n = run(vee, "nerve");
  CHECK(n["results"][0]["dims"][0] == 0);
  CHECK(n["results"][0]["dims"][1] == 1);

  // Determinism modulo wall time.
  RunOptions reps;
  reps.emit_representatives = true;
  for (const char* c : {"hochschild", "exal", "diffop", "induced"})
    CHECK(without_time(run(lam, c, reps)).dump() == without_time(run(lam, c, reps)).dump());
  CHECK(without_time(run(vee, "les")).dump() == without_time(run(vee, "les")).dump());
  // Coordinates are strings.
  auto ex = run(lam, "exal", reps);
  CHECK(ex["results"][0]["class"][0].is_string());

  Manifest tw = load_manifest(fixture("outer_twist.txt"));
  auto o = run(tw, "obstruct");
  CHECK(o["results"][0]["stage"] == "alpha2");

  // Caps surface as CapExceeded.
  Manifest capped = parse_manifest("[settings]\nsize_cap = 10\n[algebra L]\nbuiltin = dual_numbers\n");
  CHECK_THROWS_AS(run(capped, "hochschild"), CapExceeded);
  CHECK_THROWS_AS(run(lam, "nerve"), PreconditionFailed);
  CHECK_THROWS_AS(run(lam, "frobnicate"), PreconditionFailed);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ManifestError(ManifestError::Kind::syntax, 1, "x")) == kExitParse);
  CHECK(exit_code_for(ManifestError(ManifestError::Kind::unknown_name, 1, "x")) == kExitParse);
  CHECK(exit_code_for(ManifestError(ManifestError::Kind::invariant, 1, "x")) == kExitInvariant);
  CHECK(exit_code_for(InvariantViolation("x")) == kExitInvariant);
  CHECK(exit_code_for(PreconditionFailed("x")) == kExitPrecondition);
  CHECK(exit_code_for(CapExceeded("x")) == kExitCap);

  CHECK(tool(fixture("dual_numbers.txt") + " hochschild") == kExitOk);
  CHECK(tool(fixture("vee_skyscraper.txt") + " nerve --degree 2") == kExitOk);
  const std::string dir = std::string(HOCHDEF_BINARY_DIR);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir + "/" + name) << text;
    return dir + "/" + name;
  };
  CHECK(tool(write("bad_syntax.txt", "[algebra k]\nbasis 1\n") + " hochschild") == kExitParse);
  CHECK(tool(write("bad_assoc.txt", std::string(kTriangularHeader) + "product e1 e1 = [1, 0, 0]\nproduct x x = [1, 0, 0]\n") +
             " hochschild") == kExitInvariant);
  CHECK(tool(write("capped.txt", "[settings]\nsize_cap = 10\n[algebra L]\nbuiltin = dual_numbers\n") + " hochschild") == kExitCap);
  CHECK(tool(fixture("dual_numbers.txt") + " nerve") == kExitPrecondition);
  CHECK(tool(fixture("dual_numbers.txt") + " hochschild --report " + dir + "/report.json") == kExitOk);
  CHECK(nlohmann::json::parse(read_file(dir + "/report.json"))["results"][0]["dims"] == nlohmann::json({2, 1, 1, 1}));
}
