// kobacore: run and summarise metric experiments from JSON configs.
//
//   kobacore validate config.json
//   kobacore run config.json [--out DIR]
//   kobacore report a.manifest.json b.manifest.json [--summary S.csv] [--merged M.csv]
//
// Exit codes: 0 ok, 2 invalid input, 3 numerical failure.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kobacore/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = kobacore::cli;
  CLI::App app{"Kobayashi metric experiment runner"};
  app.set_version_flag("--version", std::string(cli::version()));
  app.require_subcommand(1);

  std::string config;
  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  validate->add_option("config", config, "Experiment config (JSON)")->required();

  std::string run_config;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "Run an experiment, writing CSV and manifest");
  run->add_option("config", run_config, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory");

  std::vector<std::string> manifests;
  std::optional<std::string> summary, merged;
  auto* report = app.add_subcommand("report", "Merge runs and compute verdicts");
  report->add_option("manifests", manifests, "Manifest files")->required();
  report->add_option("--summary", summary, "Write the summary table here");
  report->add_option("--merged", merged, "Write the joined result rows here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kValidationError;
  }

  if (*validate) return cli::validate_file(config, std::cout, std::cerr);
  if (*run) return cli::run_file(run_config, out_dir, std::cout, std::cerr);
  return cli::report_files(manifests, summary, merged, std::cout, std::cerr);
}
