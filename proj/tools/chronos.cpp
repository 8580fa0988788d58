// chronos: run one named experiment and write its report.
//
//   chronos run --experiment <name> [--config <file>] [--key value ...]
//               [--out <path>] [--format csv|json]
//   chronos list
//
// Exit status: 0 all checks passed, 1 a check failed, 2 bad configuration,
// 3 numerical failure, 4 I/O failure.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "chronos/error.hpp"
#include "chronos/experiments.hpp"

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kConfig = 2, kNumerical = 3, kIo = 4 };

chronos::KeyValues parse_overrides(const std::vector<std::string>& extras) {
  chronos::KeyValues out;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string key = extras[i];
    if (key.rfind("--", 0) != 0 || key.size() <= 2) {
      throw chronos::Error(chronos::ErrorKind::Config, "unexpected argument '" + key + "'");
    }
    key.erase(0, 2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.erase(eq);
    } else {
      if (i + 1 >= extras.size()) {
        throw chronos::Error(chronos::ErrorKind::Config, key + ": missing value");
      }
      value = extras[++i];
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

void print_catalog() {
  for (const auto& e : chronos::experiment_catalog()) {
    std::cout << e.name << "\n  " << e.summary << "\n";
    for (const auto& k : e.keys) {
      std::printf("    %-10s %-7s default %-14.10g range [%.10g, %.10g]  %s\n", k.name.c_str(),
                  k.type == chronos::KeyType::Integer ? "int" : "real", k.default_value,
                  k.min_value, k.max_value, k.help.c_str());
    }
  }
}

int run(const std::string& experiment_arg, const std::string& config_path,
        const std::vector<std::string>& extras, const std::string& out_path,
        const std::string& format_arg) {
  chronos::KeyValues file;
  if (!config_path.empty()) file = chronos::read_config_file(config_path);

  // The file may name the experiment and output; the command line wins.
  std::string experiment = experiment_arg;
  std::string out = out_path;
  std::string format = format_arg;
  chronos::KeyValues params;
  for (auto& [k, v] : file) {
    if (k == "experiment") {
      if (experiment.empty()) experiment = v;
    } else if (k == "out") {
      if (out.empty()) out = v;
    } else if (k == "format") {
      if (format.empty()) format = v;
    } else {
      params.emplace_back(k, v);
    }
  }
  if (experiment.empty()) {
    throw chronos::Error(chronos::ErrorKind::Config, "experiment: required");
  }
  if (format.empty()) format = "csv";
  const chronos::ReportFormat fmt = chronos::parse_format(format);

  std::optional<std::string> seed;
  if (const char* env = std::getenv("CHRONOS_SEED"); env != nullptr && *env != '\0') seed = env;

  const auto config =
      chronos::resolve_config(experiment, params, parse_overrides(extras), seed);
  const auto report = chronos::run_experiment(config);
  if (out.empty() || out == "-") {
    std::cout << chronos::format_report(report, fmt);
  } else {
    chronos::write_report(report, out, fmt);
  }
  std::fprintf(stderr, "%s: %s in %.3f s\n", report.experiment.c_str(),
               report.passed() ? "pass" : "FAIL", report.wall_seconds);
  return report.passed() ? kPass : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for quantum time operators"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "run one experiment");
  run_cmd->allow_extras();
  std::string experiment, config_path, out_path, format;
  run_cmd->add_option("--experiment,-e", experiment, "experiment name (see `chronos list`)");
  run_cmd->add_option("--config,-c", config_path, "key = value parameter file");
  run_cmd->add_option("--out,-o", out_path, "report path (stdout when omitted)");
  run_cmd->add_option("--format,-f", format, "csv or json (default csv)");

  app.add_subcommand("list", "print experiments and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfig;
  }

  if (app.got_subcommand("list")) {
    print_catalog();
    return kPass;
  }
  try {
    return run(experiment, config_path, run_cmd->remaining(), out_path, format);
  } catch (const chronos::Error& e) {
    std::cerr << "chronos: " << e.what();
    if (e.residual()) std::cerr << " (residual " << *e.residual() << ")";
    std::cerr << '\n';
    switch (e.kind()) {
      case chronos::ErrorKind::Config: return kConfig;
      case chronos::ErrorKind::Io: return kIo;
      default: return kNumerical;
    }
  } catch (const std::exception& e) {
    std::cerr << "chronos: " << e.what() << '\n';
    return kNumerical;
  }
}
