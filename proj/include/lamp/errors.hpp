#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lamp {

// Machine-readable error codes, shared by validation, the service (HTTP
// bodies) and the CLI (exit codes / printed names).
enum class Errc {
  ok = 0,
  unknown_keyword,
  malformed_address,
  invalid_interval,
  type_location_mismatch,
  duplicate_policy_id,
  unknown_policy_id,
  dimension_mismatch,
  redactor_failure,
  infeasible_spec,
  parse_error,
  io_error,
};

constexpr std::string_view to_string(Errc e) {
  switch (e) {
    case Errc::ok: return "Ok";
    case Errc::unknown_keyword: return "UnknownKeyword";
    case Errc::malformed_address: return "MalformedAddress";
    case Errc::invalid_interval: return "InvalidInterval";
    case Errc::type_location_mismatch: return "TypeLocationMismatch";
    case Errc::duplicate_policy_id: return "DuplicatePolicyId";
    case Errc::unknown_policy_id: return "UnknownPolicyId";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::redactor_failure: return "RedactorFailure";
    case Errc::infeasible_spec: return "InfeasibleSpec";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IoError";
  }
  return "Unknown";
}

class LampError : public std::runtime_error {
 public:
  LampError(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

// CLI convention: 0 success, 1 validation failure, 2 I/O failure.
constexpr int exit_code_for(Errc e) {
  switch (e) {
    case Errc::ok:
      return 0;
    case Errc::io_error:
      return 2;
    default:
      return 1;
  }
}

}  // namespace lamp
