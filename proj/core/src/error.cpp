#include "cagkit/error.hpp"

namespace cagkit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::BeliefOutOfRange: return "BeliefOutOfRange";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::EmptyEvidence: return "EmptyEvidence";
    case ErrorCode::BadRegionPath: return "BadRegionPath";
    case ErrorCode::BadDateOrder: return "BadDateOrder";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::MismatchedStatement: return "MismatchedStatement";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::EmptyQuery: return "EmptyQuery";
    case ErrorCode::NoPathFound: return "NoPathFound";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyEmbeddingFile: return "EmptyEmbeddingFile";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::UnknownStatement: return "UnknownStatement";
    case ErrorCode::WouldCreateCycle: return "WouldCreateCycle";
    case ErrorCode::VersionConflict: return "VersionConflict";
    case ErrorCode::SelfImport: return "SelfImport";
    case ErrorCode::DegenerateBoxes: return "DegenerateBoxes";
    case ErrorCode::StoreUnavailable: return "StoreUnavailable";
    case ErrorCode::PortInUse: return "PortInUse";
    case ErrorCode::Unauthorized: return "Unauthorized";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::BadRequest: return "BadRequest";
  }
  return "Unknown";
}

}  // namespace cagkit
