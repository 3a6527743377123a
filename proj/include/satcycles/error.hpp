#pragma once

#include <stdexcept>
#include <string>

namespace satcycles {

enum class ErrorCode {
  center_regime,    // analytic center, no isolated cycles to count
  bad_regime,       // operation needs ab < 0
  count_unstable,   // two grid refinements disagree on the root count
  no_convergence,
  order_violated,
  bracket_failed,
  at_bifurcation,
  switch_cap,       // zone-switch safety cap hit inside advance()
  io_failure,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::center_regime: return "center_regime";
    case ErrorCode::bad_regime: return "bad_regime";
    case ErrorCode::count_unstable: return "count_unstable";
    case ErrorCode::no_convergence: return "no_convergence";
    case ErrorCode::order_violated: return "order_violated";
    case ErrorCode::bracket_failed: return "bracket_failed";
    case ErrorCode::at_bifurcation: return "at_bifurcation";
    case ErrorCode::switch_cap: return "switch_cap";
    case ErrorCode::io_failure: return "io_failure";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace satcycles
