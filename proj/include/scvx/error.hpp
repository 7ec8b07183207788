#pragma once

#include <stdexcept>
#include <string>

namespace scvx {

enum class ErrorCode {
  dimension_mismatch,
  invalid_argument,
  norm_singularity,
  non_convex,
  licq_violation,
  infeasible_anchor,
  infeasible_scenario,
  solver_failure,
  unsupported_model,
};

const char* to_string(ErrorCode code);

/// Error carrying a machine-readable code and, where one applies, the index of
/// the offending element (constraint row, step, list position). index < 0 means
/// no particular element.
class ScvxError : public std::runtime_error {
 public:
  ScvxError(ErrorCode code, const std::string& message, int index = -1);

  ErrorCode code() const noexcept { return code_; }
  int index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  int index_;
};

}  // namespace scvx
