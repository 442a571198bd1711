#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "hkt/runner.hpp"

namespace {

hkt::RunConfig load_with_seed(const std::string& path, const std::optional<unsigned>& seed) {
  hkt::RunConfig config = hkt::load_run_config(path);
  if (seed) config.seed = *seed;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperkahler verification toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string observable;
  std::string out_path;
  std::optional<unsigned> seed;

  CLI::App* verify = app.add_subcommand("verify", "Run the residual suites and report");
  verify->add_option("config", config_path, "TOML config file")->required();
  verify->add_option("--seed", seed, "Override the config seed");

  CLI::App* scan = app.add_subcommand("scan", "Tabulate an observable over the grid");
  scan->add_option("config", config_path, "TOML config file")->required();
  scan->add_option("--observable", observable, "om3[v-block] or NAME[a,b]")->required();
  scan->add_option("--out", out_path, "Output CSV path")->required();
  scan->add_option("--seed", seed, "Override the config seed");

  CLI::App* crosscheck =
      app.add_subcommand("crosscheck", "Series vs dilogarithm ray integral");
  crosscheck->add_option("config", config_path, "TOML config file")->required();
  crosscheck->add_option("--seed", seed, "Override the config seed");

  CLI::App* catalog = app.add_subcommand("catalog", "List built-in prepotentials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (verify->parsed()) {
      const hkt::RunConfig config = load_with_seed(config_path, seed);
      const hkt::RunReport report = hkt::run_verify(config);
      std::cout << hkt::report_to_json(report, config);
      return report.pass ? 0 : 1;
    }
    if (scan->parsed()) {
      const hkt::RunConfig config = load_with_seed(config_path, seed);
      const hkt::ScanTable table = hkt::run_scan(config, observable);
      std::ofstream out(out_path);
      if (!out) throw hkt::ConfigError("cannot open output file '" + out_path + "'");
      out << hkt::scan_to_csv(table);
      std::cout << "wrote " << table.rows.size() << " rows to " << out_path << "\n";
      return 0;
    }
    if (crosscheck->parsed()) {
      const hkt::RunConfig config = load_with_seed(config_path, seed);
      const hkt::CrosscheckReport report = hkt::run_crosscheck(config);
      std::cout << hkt::crosscheck_to_json(report, config);
      return report.pass ? 0 : 1;
    }
    if (catalog->parsed()) {
      std::cout << hkt::catalog_listing();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
