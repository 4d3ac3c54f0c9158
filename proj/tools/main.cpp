// qmt: scenario runner for finite-dimensional quantum measurement analysis.
//
// Exit codes: 0 success, 2 scenario validation failure, 3 runtime error.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "qmt/demos.hpp"
#include "qmt/errors.hpp"
#include "qmt/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

// Tolerances come from the defaults unless QMT_TOLERANCES names a JSON file.
qmt::Tolerances resolve_tolerances() {
  const char* path = std::getenv("QMT_TOLERANCES");
  if (path == nullptr || *path == '\0') return qmt::default_tolerances();
  return qmt::load_tolerances_file(path);
}

int emit_report(const qmt::Scenario& scenario, const qmt::Tolerances& tol,
                const std::string& out_path, const std::string& format) {
  std::string text;
  try {
    const qmt::report::Value doc = qmt::run_scenario(scenario, tol);
    text = format == "tsv" ? qmt::report::to_tsv(doc) : qmt::report::to_json(doc);
  } catch (const qmt::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  if (out_path.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << text;
  out.flush();
  if (!out.good()) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return kExitRuntime;
  }
  return kExitOk;
}

void apply_overrides(qmt::Scenario& scenario, bool has_seed, std::uint64_t seed,
                     const std::string& semantics) {
  if (has_seed) {
    scenario.has_seed = true;
    scenario.seed = seed;
  }
  if (!semantics.empty()) {
    scenario.semantics_name = semantics;
    scenario.semantics = semantics == "global" ? qmt::CollapseSemantics::global()
                                               : qmt::CollapseSemantics::local();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-dimensional quantum measurement scenario runner"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_path;
  std::string format = "json";
  std::string semantics;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string demo_name;

  CLI::App* run = app.add_subcommand("run", "execute a scenario file and emit its report");
  run->add_option("scenario", scenario_path, "scenario file (JSON)")->required();
  run->add_option("--seed", seed, "override the scenario seed")
      ->each([&seed_set](const std::string&) { seed_set = true; });
  run->add_option("--semantics", semantics, "override the collapse semantics")
      ->check(CLI::IsMember({"local", "global"}));
  run->add_option("--out", out_path, "write the report here instead of stdout");
  run->add_option("--format", format, "report format")
      ->check(CLI::IsMember({"json", "tsv"}));

  CLI::App* validate =
      app.add_subcommand("validate", "parse and validate a scenario file");
  validate->add_option("scenario", scenario_path, "scenario file (JSON)")->required();

  std::string demo_list;
  for (const std::string& name : qmt::demos::names())
    demo_list += (demo_list.empty() ? "" : ", ") + name;
  CLI::App* demo = app.add_subcommand("demo", "run a built-in demo scenario");
  demo->add_option("name", demo_name, "demo name (" + demo_list + ")")->required();
  demo->add_option("--out", out_path, "write the report here instead of stdout");
  demo->add_option("--format", format, "report format")
      ->check(CLI::IsMember({"json", "tsv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    const qmt::Tolerances tol = resolve_tolerances();

    if (run->parsed()) {
      qmt::Scenario scenario;
      try {
        scenario = qmt::load_scenario(scenario_path, tol);
      } catch (const qmt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
      }
      apply_overrides(scenario, seed_set, seed, semantics);
      return emit_report(scenario, tol, out_path, format);
    }

    if (validate->parsed()) {
      try {
        qmt::load_scenario(scenario_path, tol);
      } catch (const qmt::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
      }
      std::cout << "ok\n";
      return kExitOk;
    }

    // demo
    qmt::Scenario scenario;
    try {
      scenario = qmt::parse_scenario(qmt::demos::scenario_text(demo_name), tol);
    } catch (const qmt::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitValidation;
    }
    return emit_report(scenario, tol, out_path, format);
  } catch (const qmt::Error& e) {
    // Tolerance-file problems are configuration errors.
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
