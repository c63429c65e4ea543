#include "domainkit/common/error.hpp"

namespace domainkit {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::EmptyAfterExtraction: return "EmptyAfterExtraction";
    case ErrorCode::UnknownTokenizer: return "UnknownTokenizer";
    case ErrorCode::LexiconMissing: return "LexiconMissing";
    case ErrorCode::EmptyShingleSet: return "EmptyShingleSet";
    case ErrorCode::InsufficientGeneralData: return "InsufficientGeneralData";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
    case ErrorCode::CategoryOutOfSet: return "CategoryOutOfSet";
    case ErrorCode::CountOutOfRange: return "CountOutOfRange";
    case ErrorCode::RoleOrderViolation: return "RoleOrderViolation";
    case ErrorCode::OptionMismatch: return "OptionMismatch";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::BudgetExhausted: return "BudgetExhausted";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ExemplarShortfall: return "ExemplarShortfall";
    case ErrorCode::ExemplarLeakage: return "ExemplarLeakage";
    case ErrorCode::LogprobUnsupported: return "LogprobUnsupported";
    case ErrorCode::DatasetMismatch: return "DatasetMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::StageFailure: return "StageFailure";
    case ErrorCode::DigestMismatch: return "DigestMismatch";
    case ErrorCode::UnknownSchema: return "UnknownSchema";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::BudgetExhausted:
      return 4;
    case ErrorCode::ConfigError:
    case ErrorCode::SchemaError:
    case ErrorCode::UnknownSchema:
    case ErrorCode::UnknownTokenizer:
    case ErrorCode::LexiconMissing:
    case ErrorCode::DatasetMismatch:
    case ErrorCode::ExemplarShortfall:
    case ErrorCode::ExemplarLeakage:
      return 2;
    default:
      return 3;
  }
}

}  // namespace domainkit
