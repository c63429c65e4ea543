#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace domainkit {

enum class ErrorCode {
  // ingest
  DecodeError,
  EmptyAfterExtraction,
  UnknownTokenizer,
  // filters
  LexiconMissing,
  // dedup
  EmptyShingleSet,
  // mixer
  InsufficientGeneralData,
  EmptyDomain,
  EmptyInput,
  // sftgen
  MalformedResponse,
  CategoryOutOfSet,
  CountOutOfRange,
  RoleOrderViolation,
  OptionMismatch,
  ArityError,
  BudgetExhausted,
  TransportError,
  // evalharness
  SchemaError,
  ExemplarShortfall,
  ExemplarLeakage,
  LogprobUnsupported,
  DatasetMismatch,
  // pipeline
  ConfigError,
  StageFailure,
  DigestMismatch,
  UnknownSchema,
  IoError,
};

std::string_view error_code_name(ErrorCode code);

// Process exit status for a failure of the given class: 2 validation, 3 stage
// failure, 4 endpoint budget exhaustion.
int exit_code_for(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace domainkit
