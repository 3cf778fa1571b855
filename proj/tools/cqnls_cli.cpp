// cqnls: run, validate, list and describe soliton scenarios.
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 on usage
// errors (bad command line, malformed or inconsistent scenario).

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "cqnls/scenario.hpp"

namespace {

namespace sc = cqnls::scenario;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

void print_metric_summary(const sc::CheckResult& c) {
  std::cout << (c.pass ? "PASS " : "FAIL ") << c.name;
  for (const char* key : {"max", "median", "l2_relative", "modulus_relative", "norm_drift",
                          "static_ode_max", "zeta_width", "error"}) {
    if (c.metrics.contains(key)) std::cout << "  " << key << "=" << c.metrics[key].dump();
  }
  for (const char* study : {"spatial", "temporal"}) {
    if (c.metrics.contains(study)) {
      std::cout << "  " << study << "_order=" << c.metrics[study]["order"].dump();
    }
  }
  if (c.metrics.contains("widths")) std::cout << "  widths=" << c.metrics["widths"].dump();
  std::cout << "\n";
}

int execute(const sc::Scenario& s, const sc::RunOptions& options) {
  const auto report = sc::run(s, options);
  std::cout << "scenario " << report.scenario << "\n";
  for (const auto& c : report.checks) print_metric_summary(c);
  if (!report.figure.empty()) std::cout << "figure " << report.figure.dump() << "\n";
  if (options.write_files) {
    std::cout << "report " << (options.out_dir / (s.name + "_report.json")).string() << "\n";
  }
  return report.pass() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact nonautonomous cubic-quintic NLSE solitons and their numerical checks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir = ".";
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--out", out_dir, "Output directory for reports and data files");
  app.add_option("--threads", threads, "Worker threads for the residual maps")
      ->check(CLI::Range(1u, 1024u));

  std::string config;
  auto* run = app.add_subcommand("run", "Run the scenario described by a JSON file");
  run->add_option("config", config, "Scenario JSON (schema 1)")->required();

  std::string preset_name;
  std::vector<std::string> overrides;
  auto* validate = app.add_subcommand("validate", "Run a preset scenario");
  validate->add_option("preset", preset_name, "Preset name (see list)")->required();
  validate->add_option("--override", overrides, "key=value applied to the preset JSON");

  auto* list = app.add_subcommand("list", "List presets");

  std::string describe_name;
  auto* describe = app.add_subcommand("describe", "Show a preset's parameters and constraints");
  describe->add_option("name", describe_name, "Preset name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  sc::RunOptions options;
  options.out_dir = out_dir;
  options.threads = threads;

  try {
    if (*list) {
      for (const auto& name : sc::preset_names()) {
        std::cout << name << "\t" << sc::summary(name) << "\n";
      }
      return kExitPass;
    }
    if (*describe) {
      std::cout << sc::describe(describe_name);
      return kExitPass;
    }
    if (*run) return execute(sc::load(config), options);
    if (*validate) {
      sc::Scenario s = sc::preset(preset_name);
      for (const auto& o : overrides) s = sc::apply_override(s, o);
      return execute(s, options);
    }
  } catch (const sc::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
