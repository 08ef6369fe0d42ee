#include "ecs/errors.hpp"

namespace ecs {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedHeader: return "MalformedHeader";
    case ErrorKind::NonNumericCell: return "NonNumericCell";
    case ErrorKind::RaggedRow: return "RaggedRow";
    case ErrorKind::EmptyTable: return "EmptyTable";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::DuplicateChartId: return "DuplicateChartId";
    case ErrorKind::GroundTruthParseFailure: return "GroundTruthParseFailure";
    case ErrorKind::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::MissingAlignment: return "MissingAlignment";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::MismatchedCorpora: return "MismatchedCorpora";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

ParseError::ParseError(ErrorKind kind, std::size_t row, std::size_t col, const std::string& detail)
    : Error(kind, "row " + std::to_string(row) + ", col " + std::to_string(col) + ": " + detail),
      row_(row),
      col_(col) {}

}  // namespace ecs
