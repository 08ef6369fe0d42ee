#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ecs {

enum class ErrorKind {
  MalformedHeader,
  NonNumericCell,
  RaggedRow,
  EmptyTable,
  EmptyCorpus,
  DuplicateChartId,
  GroundTruthParseFailure,
  EmptyGroundTruth,
  EmptyInput,
  MissingAlignment,
  DegenerateInput,
  MismatchedCorpora,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse failures locate the offending cell. Rows and columns are 1-based data
// coordinates: row 1 is the first line after the header, column 1 is the x-axis.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, std::size_t row, std::size_t col, const std::string& detail);

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

}  // namespace ecs
