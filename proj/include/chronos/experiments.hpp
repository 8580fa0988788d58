#pragma once

// Named experiments with flat key/value parameters, and their reports in
// CSV or JSON.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chronos {

enum class KeyType { Integer, Real };

struct KeySpec {
  std::string name;
  KeyType type;
  double default_value;
  double min_value;
  double max_value;
  std::string help;
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
  std::vector<KeySpec> keys;
};

const std::vector<ExperimentInfo>& experiment_catalog();
const ExperimentInfo& find_experiment(std::string_view name);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// `key = value` lines; blank lines and text after '#' are ignored.
KeyValues parse_config_text(std::string_view text);
KeyValues read_config_file(const std::string& path);

struct ExperimentConfig {
  std::string experiment;
  // In schema order.
  std::vector<std::pair<std::string, double>> values;

  double get(std::string_view key) const;
  long long get_int(std::string_view key) const;
};

// Defaults, then `file`, then `overrides`, then `seed_override`. Unknown keys,
// malformed numbers and out-of-range values throw ErrorKind::Config naming
// the field.
ExperimentConfig resolve_config(std::string_view experiment, const KeyValues& file,
                                const KeyValues& overrides,
                                std::optional<std::string> seed_override = std::nullopt);

struct ReportRow {
  std::string metric;
  double value;
  double tolerance;
  bool pass;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<std::pair<std::string, double>> params;
  std::vector<ReportRow> rows;
  double wall_seconds = 0.0;  // not serialized

  // value <= tolerance, false for NaN.
  void check(std::string metric, double value, double tolerance);
  bool passed() const;
};

ExperimentReport run_experiment(const ExperimentConfig& config);

enum class ReportFormat { Csv, Json };

ReportFormat parse_format(std::string_view s);
std::string format_report(const ExperimentReport& report, ReportFormat format);
void write_report(const ExperimentReport& report, const std::string& path, ReportFormat format);

}  // namespace chronos
