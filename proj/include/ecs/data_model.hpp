#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecs {

struct Point {
  std::string x_label;
  std::optional<double> value;

  bool operator==(const Point&) const = default;
};

// One table column. Points keep file row order and are never re-sorted.
struct TimeSeries {
  std::string label;
  std::vector<Point> points;

  // Non-missing values in row order. Alignment and the downstream statistics
  // operate on this subsequence.
  std::vector<double> values_present() const;
  std::size_t present_count() const;

  bool operator==(const TimeSeries&) const = default;
};

using StratumTags = std::map<std::string, std::string>;

struct ChartTable {
  std::string chart_id;
  std::vector<TimeSeries> series;
  StratumTags meta;
  // series label -> "count_like" | "rate_like" | "unknown", from the sidecar
  std::map<std::string, std::string> label_class_overrides;
  std::vector<std::string> warnings;

  std::size_t row_count() const;
  // True when no series holds a single present value.
  bool has_no_data() const;

  bool operator==(const ChartTable& other) const {
    return chart_id == other.chart_id && series == other.series;
  }
};

enum class TableFormat { Tsv, Csv };

TableFormat parse_format(std::string_view name);
std::string_view extension_for(TableFormat format);

struct ParseOptions {
  TableFormat format = TableFormat::Tsv;
  // Prediction mode: ragged rows are padded/truncated to the header width
  // with a warning, and markdown code fences around the table are skipped.
  bool lenient = false;
};

ChartTable parse_table(std::string_view bytes, const ParseOptions& options);

// Serializes with "nan" for missing cells and shortest round-trip numbers.
std::string serialize_table(const ChartTable& table, TableFormat format = TableFormat::Tsv);

// Parses one numeric cell. std::nullopt means a missing marker ("nan", "na"
// or empty, any case); throws ParseError(NonNumericCell) for anything else
// that is not a finite real.
std::optional<double> parse_cell(std::string_view cell, std::size_t row, std::size_t col);

struct ParseFailure {
  std::string chart_id;
  std::string path;
  std::string message;
};

enum class CorpusRole { GroundTruth, Predictions };

struct Corpus {
  std::map<std::string, ChartTable> charts;
  std::map<std::string, ParseFailure> failures;

  std::size_t size() const { return charts.size() + failures.size(); }
  bool contains(const std::string& chart_id) const {
    return charts.count(chart_id) != 0 || failures.count(chart_id) != 0;
  }
};

// Reads every `*.tsv` / `*.csv` file (per format, extension case-insensitive)
// in `dir`. Ground-truth parse failures throw GroundTruthParseFailure;
// prediction failures are recorded in Corpus::failures.
Corpus load_corpus(const std::filesystem::path& dir, TableFormat format, CorpusRole role);

struct ChartMetadata {
  StratumTags tags;
  std::map<std::string, std::string> label_class_overrides;
};

using MetadataSidecar = std::map<std::string, ChartMetadata>;

// JSON (object keyed by chart_id) or CSV (header row with a `chart_id`
// column), chosen by file extension.
MetadataSidecar load_metadata(const std::filesystem::path& path);
MetadataSidecar parse_metadata_json(std::string_view text);
MetadataSidecar parse_metadata_csv(std::string_view text);

void apply_metadata(Corpus& corpus, const MetadataSidecar& sidecar);

std::string read_file(const std::filesystem::path& path);

}  // namespace ecs
