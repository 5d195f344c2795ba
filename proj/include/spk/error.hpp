#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spk {

enum class ErrorKind {
  IndexOutOfRange,
  DuplicateEntry,
  DimensionMismatch,
  ParseError,
  UnsupportedFormat,
  IoError,
  TableFull,
  CapacityMismatch,
  PlanMismatch,
  ResolverFailure,
  BadConfig,
  NotSquare,
  NegativeEntry,
  LabelOutOfRange,
  DownloadError,
  MismatchError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::DuplicateEntry: return "DuplicateEntry";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::TableFull: return "TableFull";
    case ErrorKind::CapacityMismatch: return "CapacityMismatch";
    case ErrorKind::PlanMismatch: return "PlanMismatch";
    case ErrorKind::ResolverFailure: return "ResolverFailure";
    case ErrorKind::BadConfig: return "BadConfig";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::DownloadError: return "DownloadError";
    case ErrorKind::MismatchError: return "MismatchError";
  }
  return "Unknown";
}

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace spk
