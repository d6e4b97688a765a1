#pragma once

#include <cstdio>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace besovlab {

enum class ErrorKind {
  InvalidField,
  Asymmetry,
  InvalidParameter,
  Resolution,
  OutOfBand,
  TailEnergy,
  Domain,
  Precondition,
  CflViolation,
  BlowUp,
  MaxSteps,
  Configuration,
  DegenerateInput,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidField: return "invalid-field";
    case ErrorKind::Asymmetry: return "asymmetry";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::OutOfBand: return "out-of-band";
    case ErrorKind::TailEnergy: return "tail-energy";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::CflViolation: return "cfl-violation";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::MaxSteps: return "max-steps";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::DegenerateInput: return "degenerate-input";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), message_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  // what() without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

// Compact number for messages.
inline std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

// Warnings go to stderr unless a WarningCapture is active on this thread.
namespace detail {
inline std::vector<std::string>*& warning_sink() {
  thread_local std::vector<std::string>* sink = nullptr;
  return sink;
}
}  // namespace detail

inline void warn(std::string_view message) {
  if (auto* sink = detail::warning_sink()) {
    sink->emplace_back(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

// Collects warnings raised on the current thread for the lifetime of the object.
class WarningCapture {
 public:
  WarningCapture() : previous_(std::exchange(detail::warning_sink(), &messages_)) {}
  ~WarningCapture() { detail::warning_sink() = previous_; }
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  const std::vector<std::string>& messages() const { return messages_; }

 private:
  std::vector<std::string> messages_;
  std::vector<std::string>* previous_;
};

}  // namespace besovlab
