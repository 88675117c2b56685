#pragma once

// Batch experiment runner behind the `kobacore` tool. A config is a JSON
// object such as
//
//   {"experiment": "probe", "seed": 7,
//    "domain": {"family": "ball", "dim": 2},
//    "schedule": [2, 4, 8],
//    "sampler": {"quadruples": 200}}
//
// Running it yields one CSV (17 significant digits, header row) and a JSON
// manifest. Identical config, seed and version give byte-identical CSV.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kobacore::cli {

enum ExitCode { kOk = 0, kValidationError = 2, kNumericalFailure = 3 };

/// git-describe style version baked in at build time.
const char* version();

std::vector<std::string> experiment_kinds();

/// Schema check only. Empty result means the config is valid.
std::vector<std::string> validate_config(const nlohmann::json& config);

struct RunOutput {
  std::string csv;
  nlohmann::json manifest;
};

/// Validates, then runs. Throws Error (InvalidSpec on validation failure).
RunOutput run_experiment(const nlohmann::json& config);

/// File-level entry points used by the tool; they print diagnostics to `err`
/// and return an ExitCode.
int validate_file(const std::string& path, std::ostream& out, std::ostream& err);
/// Writes <out_dir>/<stem>.csv and <stem>.manifest.json. out_dir defaults to
/// the config's "output" directory, else the current directory.
int run_file(const std::string& path, const std::optional<std::string>& out_dir, std::ostream& out,
             std::ostream& err);

struct SummaryRow {
  std::string source;
  std::string experiment;
  std::string subject;
  std::string metric_used;
  std::uint64_t seed = 0;
  int scales = 0;
  double delta_first = 0.0;
  double delta_last = 0.0;
  double growth_ratio = 0.0;
  double exponent = 0.0;
  std::string verdict;
};

struct Report {
  std::vector<SummaryRow> rows;
  /// Concatenated result rows (single header); equals the input CSV for one input.
  std::string merged_csv;
  bool mixed_seeds = false;
  std::vector<std::string> warnings;
};

/// Joins the CSVs behind the given manifests and computes verdicts for scan
/// experiments. Throws IncompatibleManifests when versions or CSV headers differ.
Report report(const std::vector<std::string>& manifest_paths);
std::string summary_csv(const Report& rep);

int report_files(const std::vector<std::string>& manifest_paths, const std::optional<std::string>& summary_path,
                 const std::optional<std::string>& merged_path, std::ostream& out, std::ostream& err);

}  // namespace kobacore::cli
