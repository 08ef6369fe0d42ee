#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ecs/harness.hpp"
#include "json.hpp"

namespace ecs {

enum class ReportFormat { Json, Csv };

ReportFormat parse_report_format(std::string_view name);

inline constexpr const char* kFixedTimestamp = "1970-01-01T00:00:00Z";

// UTC ISO 8601 time of the call, or kFixedTimestamp.
std::string report_timestamp(bool fixed_clock);

struct Report {
  std::string mode;  // evaluate | sweep | agreement | downstream | decompose
  EvaluationOptions options;
  bool fixed_clock = false;
  std::string ground_truth;                                  // as given on the command line
  std::vector<std::pair<std::string, std::string>> corpora;  // name, path
  std::vector<CorpusEvaluation> evaluations;
  std::optional<DownstreamReport> downstream;
  std::optional<std::vector<SweepRow>> sweep;
  std::optional<AgreementReport> agreement;
  std::vector<std::string> warnings;
};

nlohmann::ordered_json to_json(const Report& report);
std::string render_json(const Report& report);

// (section, csv text) pairs in a fixed order. Sections that do not apply to
// the report's mode are left out.
std::vector<std::pair<std::string, std::string>> render_csv(const Report& report);

// JSON goes to `out` or `stdout_stream`. CSV sections go to
// `<out without extension>_<section>.csv`, or to `stdout_stream` separated by
// "# <section>" lines.
void write_report(const Report& report, ReportFormat format, const std::optional<std::filesystem::path>& out,
                  std::ostream& stdout_stream);

}  // namespace ecs
