#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gridqa {

enum class ErrorCode {
  // Data loading
  ParseError,
  ValidationError,
  SchemaViolation,
  IoError,
  // Store access
  UnknownVertex,
  UnknownAttribute,
  TypeMismatch,
  // Question analysis
  EmptyQuestion,
  UnparseableInput,
  NoTargetFound,
  DanglingQualifier,
  // Reasoning and compilation
  NoPath,
  UnresolvedTarget,
  InconsistentPlan,
  // Sessions
  UnknownSession,
};

std::string_view to_string(ErrorCode code);

/// Pipeline stage an error belongs to, used by the evaluation report.
enum class ErrorStage { Data, Parsing, Reasoning, Session };

ErrorStage stage_of(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  ErrorStage stage() const noexcept { return stage_of(code_); }

 private:
  ErrorCode code_;
};

}  // namespace gridqa
