#pragma once

// besovlab command line: `run <experiment|all>` and `list [--json]`.
// Exit codes: 0 all verdicts pass, 2 some verdict fails, 1 execution error.
// Machine output goes to `out`, diagnostics to `err`.

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "besovlab/config.hpp"
#include "besovlab/experiments.hpp"
#include "besovlab/io.hpp"
#include "besovlab/report.hpp"
#include "json.hpp"

namespace besovlab {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitFail = 2;

inline std::string report_json_text(const ExperimentReport& r, const RunConfig& resolved) {
  nlohmann::json j = r.to_json();
  j["config"] = config_json(resolved);
  return j.dump(2) + "\n";
}

inline std::string report_csv_text(const ExperimentReport& r, const RunConfig& resolved) {
  std::string out;
  std::istringstream cfg(serialize_config(resolved));
  for (std::string line; std::getline(cfg, line);) out += "# " + line + "\n";
  out += "# verdict = " + std::string(r.pass() ? "pass" : "fail") + "\n";
  return out + r.to_csv();
}

// Writes the report files and returns their paths.
inline std::vector<std::string> write_report(const ExperimentReport& r, const RunConfig& resolved) {
  const std::filesystem::path dir(resolved.out);
  std::vector<std::string> files;
  if (resolved.format == "json" || resolved.format == "both") {
    const auto path = dir / (r.name + ".json");
    write_file_atomic(path, report_json_text(r, resolved));
    files.push_back(path.string());
  }
  if (resolved.format == "csv" || resolved.format == "both") {
    const auto path = dir / (r.name + ".csv");
    write_file_atomic(path, report_csv_text(r, resolved));
    files.push_back(path.string());
  }
  return files;
}

inline std::string catalog_text(bool as_json) {
  const auto entries = experiment_catalog();
  if (as_json) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : entries) {
      j.push_back({{"name", e.name}, {"statement", e.tag}, {"summary", e.summary}, {"defaults", e.defaults}});
    }
    return j.dump(2) + "\n";
  }
  std::string out;
  for (const auto& e : entries) {
    out += e.name + "\t" + e.tag + "\t" + e.summary + "\t" + e.defaults.dump() + "\n";
  }
  return out;
}

struct RunOverrides {
  std::optional<std::string> config_path;
  std::vector<std::pair<std::string, std::string>> values;  // key, value
};

// Loads the config, applies overrides and runs the selected experiments.
inline int run_command(const std::string& experiment, const RunOverrides& ov, std::ostream& out,
                       std::ostream& err) {
  try {
    RunConfig base = ov.config_path ? load_config(*ov.config_path) : RunConfig{};
    for (const auto& [key, value] : ov.values) set_config_value(base, key, value);
    if (!experiment.empty()) base.experiment = experiment;
    validate_config(base);

    const std::vector<std::string> names =
        base.experiment == "all" ? experiment_names() : std::vector<std::string>{base.experiment};
    bool all_pass = true;
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& name : names) {
      const RunConfig resolved = resolve_config(base, name);
      const ExperimentReport report = run_experiment(resolved);
      for (const auto& w : report.warnings) err << "warning: " << name << ": " << w << "\n";
      const auto files = write_report(report, resolved);
      all_pass = all_pass && report.pass();
      summary.push_back({{"experiment", name}, {"verdict", report.pass() ? "pass" : "fail"}, {"files", files}});
    }
    out << summary.dump() << "\n";
    return all_pass ? kExitPass : kExitFail;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Littlewood-Paley / Besov experiments for Camassa-Holm type equations", "besovlab"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run one experiment or all of them");
  std::string experiment;
  std::vector<std::string> choices = experiment_names();
  choices.push_back("all");
  run->add_option("experiment", experiment, "experiment name or 'all'")
      ->required()
      ->check(CLI::IsMember(choices));

  RunOverrides ov;
  std::string config_path;
  run->add_option("--config", config_path, "key = value config file");
  struct Flag {
    const char* flag;
    const char* key;
    const char* help;
    std::string value;
  };
  std::vector<Flag> flags{
      {"--out", "out", "output directory", {}},
      {"--format", "format", "csv|json|both", {}},
      {"--grid-n", "grid_n", "number of grid points (power of two)", {}},
      {"--grid-l", "grid_l", "period length", {}},
      {"--seed", "seed", "seed", {}},
      {"--k", "k", "packet spacing k", {}},
      {"--n", "n", "packet index list, e.g. 1,2", {}},
      {"--i", "i", "packet shift index", {}},
      {"--sign", "sign", "packet shift sign (+1|-1)", {}},
      {"--sigma", "sigma", "regularity sigma", {}},
      {"--p", "p", "integrability p (number or inf)", {}},
      {"--epsilon", "epsilon", "discontinuity epsilon", {}},
      {"--model", "model", "ch|b-family|dp|novikov", {}},
      {"--b", "b", "b-family parameter", {}},
      {"--t", "t", "time list, e.g. 1e-5,1e-4,1e-3", {}},
      {"--j", "j", "block list for Novikov runs", {}},
      {"--t-end", "t_end", "conservation run length", {}},
      {"--cfl", "cfl_safety", "CFL safety factor", {}},
  };
  for (auto& f : flags) run->add_option(f.flag, f.value, f.help);

  auto* list = app.add_subcommand("list", "list the experiments");
  bool as_json = false;
  list->add_flag("--json", as_json, "machine-readable catalog");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitPass;
    }
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  if (list->parsed()) {
    out << catalog_text(as_json);
    return kExitPass;
  }
  if (run->count("--config") > 0) ov.config_path = config_path;
  for (const auto& f : flags) {
    if (run->count(f.flag) > 0) ov.values.emplace_back(f.key, f.value);
  }
  return run_command(experiment, ov, out, err);
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int a = 1; a < argc; ++a) args.emplace_back(argv[a]);
  return run_cli(std::move(args), out, err);
}

}  // namespace besovlab
