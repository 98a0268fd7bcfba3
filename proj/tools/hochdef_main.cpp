#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "acceptance_suite.hpp"
#include "hochdef/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Hochschild, Gerstenhaber-Schack and differential operator computations"};
  std::string input, command;
  std::optional<int> degree;
  std::optional<std::size_t> order;
  std::string report_path;
  hochdef::RunOptions opt;
  app.add_option("input", input, "manifest file (omit for selftest)");
  app.add_option("command", command,
                 "hochschild | exal | nerve | cech | gs | les | obstruct | diffop | induced | selftest");
  app.add_option("--degree", degree, "highest cohomological degree reported");
  app.add_option("--order", order, "differential operator order cap (0 = 2 dim^2)");
  app.add_flag("--emit-representatives", opt.emit_representatives, "include representative coordinates");
  app.add_option("--report", report_path, "also write the JSON report to this path");
  app.add_option("--seed", opt.seed, "seed for randomized property commands");
  CLI11_PARSE(app, argc, argv);

  if (command.empty() && input == "selftest") std::swap(input, command);
  if (command.empty()) {
    std::cerr << "error: missing command\n" << app.help();
    return hochdef::kExitUsage;
  }
  opt.degree_cap = degree;
  opt.order_cap = order;
  opt.selftest = [](std::uint32_t seed) { return hochdef::acceptance::to_json(hochdef::acceptance::run_all(seed)); };
  try {
    hochdef::Manifest m = input.empty() ? hochdef::Manifest{} : hochdef::load_manifest(input);
    nlohmann::ordered_json report = hochdef::run(m, command, opt);
    const std::string text = report.dump(2) + "\n";
    std::cout << text;
    if (!report_path.empty()) {
      std::ofstream out(report_path);
      if (!out) {
        std::cerr << "error: cannot write " << report_path << "\n";
        return hochdef::kExitUsage;
      }
      out << text;
    }
    return hochdef::checks_passed(report) ? hochdef::kExitOk : hochdef::kExitCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hochdef::exit_code_for(e);
  }
}
