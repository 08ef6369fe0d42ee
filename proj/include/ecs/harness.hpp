#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecs/alignment.hpp"
#include "ecs/data_model.hpp"
#include "ecs/decomposition.hpp"
#include "ecs/downstream_stats.hpp"
#include "ecs/keyvalue_metrics.hpp"
#include "ecs/series_matching.hpp"

namespace ecs {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kReportSchemaVersion = "1";

struct MetricSet {
  bool ecs = true;
  bool dtw = true;
  bool rms = true;
  bool scrm = true;

  // Comma-separated subset of ecs,dtw,rms,scrm.
  static MetricSet parse(const std::string& list);
  std::string to_string() const;
};

struct EvaluationOptions {
  AlignmentParams params;
  double nls_threshold = kDefaultNlsThreshold;
  MetricSet metrics;
  std::vector<std::string> group_by{"chart_type", "cumulative", "set", "source"};
  unsigned threads = 0;  // 0: hardware concurrency, 1: serial
  bool collect_downstream = false;
};

void validate(const EvaluationOptions& options);

enum class PredictionStatus { Ok, Missing, ParseFailed, Empty };
const char* to_string(PredictionStatus s);

struct SeriesScore {
  std::string gt_label;
  MatchKind kind = MatchKind::GtUnmatched;
  std::optional<std::string> pred_label;
  std::optional<double> nls;
  double ecs = 0.0;
  double dtw = 0.0;
  bool clamped = false;
  std::size_t n_match = 0;
  std::size_t n_insert = 0;
  std::size_t n_delete = 0;
};

struct ChartScore {
  std::string chart_id;
  PredictionStatus status = PredictionStatus::Ok;
  std::vector<SeriesScore> per_series;  // ground-truth order
  std::vector<std::string> unmatched_predictions;
  double ecs_chart = 0.0;
  double dtw_chart = 0.0;
  KVScore rms;
  KVScore scrm;
  ChartType chart_type = ChartType::Line;
  Decomposition decomposition;
  StratumTags tags;
  std::size_t series_length = 0;  // ground-truth row count
  std::vector<std::string> warnings;
};

// Unweighted means of chart-level values.
struct ScoreSummary {
  std::size_t charts = 0;
  double ecs = 0.0;
  double dtw = 0.0;
  KVScore rms;
  KVScore scrm;
  Decomposition decomposition;
};

ScoreSummary summarize(const std::vector<const ChartScore*>& charts);

using GroupSummaries = std::map<std::string, std::map<std::string, ScoreSummary>>;

struct CorpusEvaluation {
  std::string name;
  std::vector<ChartScore> charts;  // sorted by chart_id
  ScoreSummary summary;
  GroupSummaries groups;
  std::vector<SeriesStatRecord> downstream_records;
  std::vector<std::string> warnings;
};

// Scores one chart. `pred` is nullptr for a missing or unparseable prediction.
ChartScore score_chart(const ChartTable& gt, const ChartTable* pred, PredictionStatus status,
                       const EvaluationOptions& options, std::vector<SeriesStatRecord>* records = nullptr);

CorpusEvaluation evaluate_corpus(const Corpus& gt, const Corpus& pred, const std::string& name,
                                 const EvaluationOptions& options);

struct DownstreamReport {
  std::vector<SeriesStatRecord> records;
  std::vector<CorrelationRow> correlations;
  std::map<Statistic, std::size_t> eligible;
  std::map<Statistic, std::map<FilterReason, std::size_t>> filter_counts;
  std::vector<std::string> warnings;
};

DownstreamReport build_downstream(const std::vector<CorpusEvaluation>& evaluations);

struct SweepGrid {
  std::vector<double> theta{0.001, 0.005, 0.01, 0.02, 0.05, 0.1};
  std::vector<double> lambda{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> nls{0.0, 0.3, 0.5, 0.7, 0.9};
};

struct SweepRow {
  std::string parameter;  // "theta" | "lambda" | "nls"
  double value = 0.0;
  AlignmentParams params;
  double nls_threshold = kDefaultNlsThreshold;
  std::map<std::string, double> ecs_by_corpus;
  double spread = 0.0;
  std::vector<std::string> ranking;  // best first; ties by name
};

using NamedCorpus = std::pair<std::string, const Corpus*>;

// One hyperparameter varied at a time, the other two held at `base`.
std::vector<SweepRow> sweep(const Corpus& gt, const std::vector<NamedCorpus>& predictions, const SweepGrid& grid,
                            const EvaluationOptions& base);

struct AgreementStats {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
};

struct AgreementReport {
  std::vector<ChartScore> charts;
  AgreementStats overall;
  std::map<std::string, std::map<std::string, AgreementStats>> strata;
};

std::string series_length_stratum(std::size_t length);
double median_of(std::vector<double> values);

// corpus_a takes the ground-truth role. Throws MismatchedCorpora when the
// chart id sets differ.
AgreementReport agreement(const Corpus& corpus_a, const Corpus& corpus_b, const EvaluationOptions& options);

}  // namespace ecs
