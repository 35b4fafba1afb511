#pragma once

#include <stdexcept>
#include <string>

namespace deepread {

/// Machine-readable failure categories. The CLI prints the category name on
/// stderr and tool wrappers embed it in error observations, so the values
/// double as the stable external error vocabulary.
enum class ErrorCode {
  EmptyDocument,
  DuplicateDocument,
  InvalidDocument,
  EmptyCollection,
  UnknownDocument,
  UnknownSection,
  ParagraphOutOfRange,
  EmptyQuery,
  RemoteRankerUnavailable,
  IncompatibleIndex,
  IncompatibleTrajectory,
  MissingTemplate,
  PolicyUnavailable,
  ProtocolError,
  JudgeUnparseable,
  JudgeUnavailable,
  IncompleteMatrix,
  KeyMismatch,
  RoundLimit,
  IoError,
  ParseError,
  ConfigError,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::DuplicateDocument: return "DuplicateDocument";
    case ErrorCode::InvalidDocument: return "InvalidDocument";
    case ErrorCode::EmptyCollection: return "EmptyCollection";
    case ErrorCode::UnknownDocument: return "UnknownDocument";
    case ErrorCode::UnknownSection: return "UnknownSection";
    case ErrorCode::ParagraphOutOfRange: return "ParagraphOutOfRange";
    case ErrorCode::EmptyQuery: return "EmptyQuery";
    case ErrorCode::RemoteRankerUnavailable: return "RemoteRankerUnavailable";
    case ErrorCode::IncompatibleIndex: return "IncompatibleIndex";
    case ErrorCode::IncompatibleTrajectory: return "IncompatibleTrajectory";
    case ErrorCode::MissingTemplate: return "MissingTemplate";
    case ErrorCode::PolicyUnavailable: return "PolicyUnavailable";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::JudgeUnparseable: return "JudgeUnparseable";
    case ErrorCode::JudgeUnavailable: return "JudgeUnavailable";
    case ErrorCode::IncompleteMatrix: return "IncompleteMatrix";
    case ErrorCode::KeyMismatch: return "KeyMismatch";
    case ErrorCode::RoundLimit: return "RoundLimit";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }
  const char* code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace deepread
