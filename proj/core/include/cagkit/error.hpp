#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace cagkit {

// Every engine failure carries exactly one of these codes. The string form
// (to_string) is the stable machine-readable code used on the wire.
enum class ErrorCode {
  InvalidArgument,
  MissingField,
  BeliefOutOfRange,
  SelfLoop,
  EmptyEvidence,
  BadRegionPath,
  BadDateOrder,
  InvalidValue,
  MalformedLine,
  FileNotFound,
  IoError,
  MismatchedStatement,
  InvalidQuery,
  EmptyQuery,
  NoPathFound,
  DimensionMismatch,
  EmptyEmbeddingFile,
  UnknownModel,
  UnknownNode,
  UnknownEdge,
  UnknownStatement,
  WouldCreateCycle,
  VersionConflict,
  SelfImport,
  DegenerateBoxes,
  StoreUnavailable,
  PortInUse,
  Unauthorized,
  NotFound,
  BadRequest,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, nlohmann::json details = nullptr)
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const nlohmann::json& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  nlohmann::json details_;
};

}  // namespace cagkit
