#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cluesynth {

enum class ErrorCode {
  duplicate_name,
  registry_frozen,
  unknown_function,
  syntax_error,
  sort_error,
  vacuous_grammar,
  missing_weight,
  unpriced_rule,
  no_finite_start,
  annotation_outside_grammar,
  non_finite_objective,
  no_annotations_found,
  fingerprint_mismatch,
  malformed_input,
  io_error,
  invalid_argument,
};

std::string_view error_code_name(ErrorCode code);

/// Exception type for every non-evaluation failure in the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  /// what() without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace cluesynth
