#pragma once

// Structured experiment reports: measured values with their thresholds, a
// verdict, and JSON / CSV serialization.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace besovlab {

enum class Check { AtLeast, AtMost, Within, Info };

struct Measurement {
  std::string quantity;
  std::string index;  // n, j, t or a label; empty when the value is global
  double value = 0.0;
  Check check = Check::Info;
  double lo = 0.0;
  double hi = 0.0;
  // The check is expected to fail (a control that must not show the effect).
  bool expected_negative = false;

  bool meets_threshold() const {
    switch (check) {
      case Check::AtLeast: return value >= lo;
      case Check::AtMost: return value <= hi;
      case Check::Within: return value >= lo && value <= hi;
      case Check::Info: return true;
    }
    return false;
  }

  // Contribution to the verdict.
  bool passes() const {
    if (check == Check::Info) return true;
    return expected_negative ? !meets_threshold() : meets_threshold();
  }

  std::string threshold_string() const;
};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // Shortest text that parses back to the same double.
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string Measurement::threshold_string() const {
  switch (check) {
    case Check::AtLeast: return ">=" + format_number(lo);
    case Check::AtMost: return "<=" + format_number(hi);
    case Check::Within: return "[" + format_number(lo) + ";" + format_number(hi) + "]";
    case Check::Info: return "info";
  }
  return "";
}

inline Measurement at_least(std::string q, std::string idx, double v, double lo) {
  return {std::move(q), std::move(idx), v, Check::AtLeast, lo, 0.0, false};
}
inline Measurement at_most(std::string q, std::string idx, double v, double hi) {
  return {std::move(q), std::move(idx), v, Check::AtMost, 0.0, hi, false};
}
inline Measurement within(std::string q, std::string idx, double v, double lo, double hi) {
  return {std::move(q), std::move(idx), v, Check::Within, lo, hi, false};
}
inline Measurement info(std::string q, std::string idx, double v) {
  return {std::move(q), std::move(idx), v, Check::Info, 0.0, 0.0, false};
}

struct ExperimentReport {
  std::string name;
  std::string tag;  // statement checked, e.g. "Lemma 3.2"
  nlohmann::json parameters = nlohmann::json::object();
  std::vector<Measurement> measurements;
  std::vector<std::string> notes;
  std::vector<std::string> warnings;
  std::string grid_fingerprint;
  std::string partition_fingerprint;
  bool degenerate = false;  // inputs make the check vacuous; forces a fail

  bool pass() const {
    if (degenerate) return false;
    for (const auto& m : measurements) {
      if (!m.passes()) return false;
    }
    return true;
  }

  const Measurement* find(const std::string& quantity, const std::string& index = "") const {
    for (const auto& m : measurements) {
      if (m.quantity == quantity && m.index == index) return &m;
    }
    return nullptr;
  }

  double value(const std::string& quantity, const std::string& index = "") const {
    const Measurement* m = find(quantity, index);
    return m ? m->value : std::nan("");
  }

  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& m : measurements) {
      nlohmann::json row = {{"quantity", m.quantity}, {"index", m.index}, {"threshold", m.threshold_string()},
                            {"pass", m.passes()}};
      // JSON has no NaN or infinity.
      if (std::isfinite(m.value)) {
        row["measured"] = m.value;
      } else {
        row["measured"] = format_number(m.value);
      }
      if (m.expected_negative) row["expected_negative"] = true;
      rows.push_back(std::move(row));
    }
    return {{"experiment", name},
            {"statement", tag},
            {"verdict", pass() ? "pass" : "fail"},
            {"degenerate", degenerate},
            {"parameters", parameters},
            {"grid", grid_fingerprint},
            {"partition", partition_fingerprint},
            {"measurements", rows},
            {"notes", notes},
            {"warnings", warnings}};
  }

  // quantity,index,measured,threshold,pass
  std::string to_csv() const {
    std::ostringstream os;
    os << "quantity,index,measured,threshold,pass\n";
    for (const auto& m : measurements) {
      os << m.quantity << ',' << m.index << ',' << format_number(m.value) << ',' << m.threshold_string() << ','
         << (m.passes() ? "true" : "false") << '\n';
    }
    return os.str();
  }
};

}  // namespace besovlab
