#pragma once

#include <stdexcept>
#include <string>

namespace relayopt {

enum class ErrorCode {
  invalid_scenario,
  degenerate_geometry,
  rate_infeasible,
  target_infeasible,
  model_contract,
  oracle_too_large,
  internal_consistency,
};

/// Library error with a machine-readable code; the CLI maps codes to exit
/// statuses (invalid input = 2, infeasible target = 3, internal = 4).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_scenario: return "InvalidScenario";
    case ErrorCode::degenerate_geometry: return "DegenerateGeometry";
    case ErrorCode::rate_infeasible: return "RateInfeasible";
    case ErrorCode::target_infeasible: return "TargetInfeasible";
    case ErrorCode::model_contract: return "ModelContract";
    case ErrorCode::oracle_too_large: return "OracleTooLarge";
    case ErrorCode::internal_consistency: return "InternalConsistency";
  }
  return "Error";
}

}  // namespace relayopt
