#pragma once

// RunConfig: the key = value run description shared by config files and
// command-line overrides.
//
//   # comment
//   experiment = ch-lower-bound
//   grid_n = 1048576
//   n = 1, 2
//   p = inf

#include <cerrno>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "besovlab/error.hpp"
#include "besovlab/experiments.hpp"
#include "besovlab/pde_models.hpp"
#include "besovlab/report.hpp"
#include "json.hpp"

namespace besovlab {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"localization", "ch-lower-bound", "novikov-lower-bound",
                                              "remainder",    "discontinuity",  "conservation"};
  return names;
}

struct RunConfig {
  std::string experiment = "all";
  double grid_l = 512.0;
  std::uint64_t grid_n = std::uint64_t{1} << 20;
  std::string out = "results";
  std::string format = "json";
  std::uint64_t seed = 0;

  int k = 5;
  std::optional<std::vector<int>> n;  // default depends on the experiment
  std::optional<int> i;
  int sign = 1;
  double sigma = 4.0;
  double p = 2.0;
  double epsilon = 0.05;
  std::string model = "ch";
  double b = 2.0;
  std::optional<std::vector<double>> t;
  std::optional<std::vector<int>> j;  // default depends on the experiment
  double t_end = 0.01;
  double cfl_safety = 0.3;

  Thresholds thresholds;

  bool operator==(const RunConfig& o) const;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

[[noreturn]] inline void bad_value(const std::string& key, const std::string& value, const char* want) {
  fail(ErrorKind::Configuration, "key '" + key + "': expected " + want + ", got '" + value + "'");
}

inline double parse_double(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "infinity") return kInfinity;
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE) bad_value(key, v, "a number");
  return d;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

inline std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& s : split_list(v)) out.push_back(parse_int<int>(key, s));
  if (out.empty()) bad_value(key, v, "a non-empty integer list");
  return out;
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(parse_double(key, s));
  if (out.empty()) bad_value(key, v, "a non-empty number list");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string s;
  for (std::size_t a = 0; a < v.size(); ++a) {
    if (a) s += ", ";
    if constexpr (std::is_same_v<T, double>) {
      s += format_number(v[a]);
    } else {
      s += std::to_string(v[a]);
    }
  }
  return s;
}

struct KeyHandler {
  std::function<void(RunConfig&, const std::string&)> set;
  // nullopt when the key is unset (optional fields).
  std::function<std::optional<std::string>(const RunConfig&)> get;
};

template <typename M>
KeyHandler double_key(M RunConfig::*field, const char* key) {
  return {[=](RunConfig& c, const std::string& v) { c.*field = parse_double(key, v); },
          [=](const RunConfig& c) -> std::optional<std::string> { return format_number(c.*field); }};
}

inline KeyHandler threshold_key(double Thresholds::*field, const char* key) {
  return {[=](RunConfig& c, const std::string& v) { c.thresholds.*field = parse_double(key, v); },
          [=](const RunConfig& c) -> std::optional<std::string> { return format_number(c.thresholds.*field); }};
}

// Ordered table of every accepted key.
inline const std::vector<std::pair<std::string, KeyHandler>>& config_keys() {
  using Opt = std::optional<std::string>;
  static const std::vector<std::pair<std::string, KeyHandler>> keys{
      {"experiment",
       {[](RunConfig& c, const std::string& v) { c.experiment = v; }, [](const RunConfig& c) -> Opt { return c.experiment; }}},
      {"grid_l", double_key(&RunConfig::grid_l, "grid_l")},
      {"grid_n",
       {[](RunConfig& c, const std::string& v) { c.grid_n = parse_int<std::uint64_t>("grid_n", v); },
        [](const RunConfig& c) -> Opt { return std::to_string(c.grid_n); }}},
      {"out", {[](RunConfig& c, const std::string& v) { c.out = v; }, [](const RunConfig& c) -> Opt { return c.out; }}},
      {"format",
       {[](RunConfig& c, const std::string& v) { c.format = v; }, [](const RunConfig& c) -> Opt { return c.format; }}},
      {"seed",
       {[](RunConfig& c, const std::string& v) { c.seed = parse_int<std::uint64_t>("seed", v); },
        [](const RunConfig& c) -> Opt { return std::to_string(c.seed); }}},
      {"k",
       {[](RunConfig& c, const std::string& v) { c.k = parse_int<int>("k", v); },
        [](const RunConfig& c) -> Opt { return std::to_string(c.k); }}},
      {"n",
       {[](RunConfig& c, const std::string& v) { c.n = parse_int_list("n", v); },
        [](const RunConfig& c) -> Opt { return c.n ? Opt(join(*c.n)) : std::nullopt; }}},
      {"i",
       {[](RunConfig& c, const std::string& v) { c.i = parse_int<int>("i", v); },
        [](const RunConfig& c) -> Opt { return c.i ? Opt(std::to_string(*c.i)) : std::nullopt; }}},
      {"sign",
       {[](RunConfig& c, const std::string& v) { c.sign = parse_int<int>("sign", v); },
        [](const RunConfig& c) -> Opt { return std::to_string(c.sign); }}},
      {"sigma", double_key(&RunConfig::sigma, "sigma")},
      {"p", double_key(&RunConfig::p, "p")},
      {"epsilon", double_key(&RunConfig::epsilon, "epsilon")},
      {"model",
       {[](RunConfig& c, const std::string& v) { c.model = v; }, [](const RunConfig& c) -> Opt { return c.model; }}},
      {"b", double_key(&RunConfig::b, "b")},
      {"t",
       {[](RunConfig& c, const std::string& v) { c.t = parse_double_list("t", v); },
        [](const RunConfig& c) -> Opt { return c.t ? Opt(join(*c.t)) : std::nullopt; }}},
      {"j",
       {[](RunConfig& c, const std::string& v) { c.j = parse_int_list("j", v); },
        [](const RunConfig& c) -> Opt { return c.j ? Opt(join(*c.j)) : std::nullopt; }}},
      {"t_end", double_key(&RunConfig::t_end, "t_end")},
      {"cfl_safety", double_key(&RunConfig::cfl_safety, "cfl_safety")},
      {"localization_tol", threshold_key(&Thresholds::localization, "localization_tol")},
      {"decomposition_tol", threshold_key(&Thresholds::decomposition, "decomposition_tol")},
      {"c_star", threshold_key(&Thresholds::c_star, "c_star")},
      {"stability", threshold_key(&Thresholds::stability, "stability")},
      {"i2_margin", threshold_key(&Thresholds::i2_margin, "i2_margin")},
      {"i2_bound", threshold_key(&Thresholds::i2_bound, "i2_bound")},
      {"rho_variation", threshold_key(&Thresholds::rho_variation, "rho_variation")},
      {"remainder_window", threshold_key(&Thresholds::remainder_window, "remainder_window")},
      {"first_window", threshold_key(&Thresholds::first_window, "first_window")},
      {"c1", threshold_key(&Thresholds::c1, "c1")},
      {"non_decay", threshold_key(&Thresholds::non_decay, "non_decay")},
      {"h1_drift", threshold_key(&Thresholds::h1_drift, "h1_drift")},
      {"momentum_drift", threshold_key(&Thresholds::momentum_drift, "momentum_drift")},
      {"refinement", threshold_key(&Thresholds::refinement, "refinement")},
  };
  return keys;
}

}  // namespace detail

inline bool RunConfig::operator==(const RunConfig& o) const {
  for (const auto& [key, h] : detail::config_keys()) {
    if (h.get(*this) != h.get(o)) return false;
  }
  return true;
}

inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  for (const auto& [name, h] : detail::config_keys()) {
    if (name == key) {
      h.set(c, detail::trim(value));
      return;
    }
  }
  fail(ErrorKind::Configuration, "unknown key '" + key + "'");
}

inline RunConfig parse_config(std::string_view text, const std::string& origin = "config") {
  RunConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(lineno) + ": ";
    if (eq == std::string::npos) fail(ErrorKind::Configuration, where + "expected 'key = value'");
    try {
      set_config_value(c, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      fail(e.kind(), where + e.message());
    }
  }
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    fail(ErrorKind::Configuration, "config file not found: " + path.string());
  }
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Configuration, "cannot read config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

// Every set key, one "key = value" line each; parse_config inverts it exactly.
inline std::string serialize_config(const RunConfig& c) {
  std::string out;
  for (const auto& [key, h] : detail::config_keys()) {
    if (auto v = h.get(c)) out += key + " = " + *v + "\n";
  }
  return out;
}

inline nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, h] : detail::config_keys()) {
    if (auto v = h.get(c)) j[key] = *v;
  }
  return j;
}

inline ModelKind parse_model(const std::string& name, double b) {
  if (name == "ch" || name == "camassa-holm") return CamassaHolm{};
  if (name == "b-family") return BFamily{b};
  if (name == "dp" || name == "degasperis-procesi") return degasperis_procesi();
  if (name == "novikov") return Novikov{};
  fail(ErrorKind::Configuration, "key 'model': expected ch|b-family|dp|novikov, got '" + name + "'");
}

inline void validate_config(const RunConfig& c) {
  const auto& names = experiment_names();
  if (c.experiment != "all" && std::find(names.begin(), names.end(), c.experiment) == names.end()) {
    fail(ErrorKind::Configuration, "key 'experiment': unknown experiment '" + c.experiment + "'");
  }
  if (c.format != "csv" && c.format != "json" && c.format != "both") {
    fail(ErrorKind::Configuration, "key 'format': expected csv|json|both, got '" + c.format + "'");
  }
  if (!(c.grid_l > 0.0) || !std::isfinite(c.grid_l)) fail(ErrorKind::Configuration, "key 'grid_l': must be positive");
  parse_model(c.model, c.b);
}

// Fills the experiment-dependent defaults.
inline RunConfig resolve_config(RunConfig c, const std::string& experiment) {
  c.experiment = experiment;
  if (!c.n) c.n = experiment == "localization" ? std::vector<int>{2} : std::vector<int>{1, 2};
  if (!c.j) c.j = experiment == "novikov-lower-bound" ? std::vector<int>{4, 5, 6, 7, 8} : std::vector<int>{6, 8};
  if (!c.t) c.t = std::vector<double>{1e-5, 1e-4, 1e-3};
  return c;
}

inline ExperimentReport run_experiment(const RunConfig& resolved) {
  const Grid grid(resolved.grid_l, static_cast<std::size_t>(resolved.grid_n));
  const ModelKind model = parse_model(resolved.model, resolved.b);
  const Thresholds& th = resolved.thresholds;
  const std::string& name = resolved.experiment;
  if (name == "localization") {
    return exp_localization(grid, {resolved.k, *resolved.n, resolved.i, resolved.sign}, th);
  }
  if (name == "ch-lower-bound") {
    return exp_ch_lower_bound(grid, {resolved.k, resolved.sigma, resolved.p, *resolved.n}, th);
  }
  if (name == "novikov-lower-bound") {
    return exp_novikov_lower_bound(grid, {resolved.sigma, *resolved.j}, th);
  }
  if (name == "remainder") {
    RemainderParams prm;
    prm.model = model;
    prm.sigma = resolved.sigma;
    prm.p = resolved.p;
    prm.k = resolved.k;
    prm.t_list = *resolved.t;
    prm.cfl_safety = resolved.cfl_safety;
    return exp_remainder_scaling(grid, prm, th);
  }
  if (name == "discontinuity") {
    DiscontinuityParams prm;
    prm.model = model;
    prm.k = resolved.k;
    prm.n_list = *resolved.n;
    prm.j_list = *resolved.j;
    prm.epsilon = resolved.epsilon;
    prm.sigma = resolved.sigma;
    prm.p = resolved.p;
    prm.cfl_safety = resolved.cfl_safety;
    return exp_discontinuity(grid, prm, th);
  }
  if (name == "conservation") {
    ConservationParams prm;
    prm.model = model;
    prm.t_end = resolved.t_end;
    prm.k = resolved.k;
    prm.sigma = resolved.sigma;
    prm.cfl_safety = resolved.cfl_safety;
    return exp_conservation(grid, prm, th);
  }
  fail(ErrorKind::Configuration, "unknown experiment '" + name + "'");
}

}  // namespace besovlab
