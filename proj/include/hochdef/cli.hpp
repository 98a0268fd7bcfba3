#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <string>

#include "hochdef/manifest.hpp"
#include "json.hpp"

namespace hochdef {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,  // a reported invariant check came out false
  kExitParse = 2,
  kExitInvariant = 3,
  kExitPrecondition = 4,
  kExitCap = 5,
  kExitUsage = 64,
};

int exit_code_for(const std::exception& e);

struct RunOptions {
  std::optional<int> degree_cap;
  std::optional<std::size_t> order_cap;
  bool emit_representatives = false;
  std::uint32_t seed = 1;
  // Runs the acceptance suite; returns {"criteria": [...], "passed": bool}.
  std::function<nlohmann::ordered_json(std::uint32_t)> selftest;
};

// Runs every [commands] entry named `command` (or one entry with default
// parameters when there is none). Keys are emitted in a fixed order; only
// "wall_time_seconds" varies between runs.
nlohmann::ordered_json run(const Manifest& m, const std::string& command, const RunOptions& options = {});
// True when every boolean check in the report holds.
bool checks_passed(const nlohmann::ordered_json& report);

}  // namespace hochdef
