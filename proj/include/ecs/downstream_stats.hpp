#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ecs/data_model.hpp"

namespace ecs {

enum class LabelClass { CountLike, RateLike, Unknown };

const char* to_string(LabelClass c);
LabelClass parse_label_class(std::string_view text);

struct LabelKeywords {
  std::vector<std::string> rate{"rate", "per 100", "percent", "%", "ratio", "proportion", "incidence rate",
                                "positivity"};
  std::vector<std::string> count{"case", "death", "hospitalization", "admission", "count", "number"};
};

// Keyword classification on the normalized label; rate keywords take
// precedence. An override (keyed by the raw label) wins when present.
LabelClass classify_label(std::string_view label, const LabelKeywords& keywords = {},
                          const std::map<std::string, std::string>* overrides = nullptr);

// Reasons a statistic is absent for a series.
enum class FilterReason {
  RateLike,
  UnknownLabel,
  ZeroGtSum,
  NoDefinedPeak,
  EmptyPrediction,
  ZeroPredictedPeak,
  PhaseTooShort,
  InsufficientPairs,
  DegenerateTrajectory,
};

const char* to_string(FilterReason r);

template <typename T>
struct Filtered {
  std::optional<T> value;
  std::optional<FilterReason> reason;  // set iff value is absent

  static Filtered ok(T v) { return Filtered{v, std::nullopt}; }
  static Filtered reject(FilterReason r) { return Filtered{std::nullopt, r}; }
};

inline constexpr std::size_t kMinAscendingPhase = 3;

// All statistics index the present-value subsequences of each series.
Filtered<double> total_count_error(std::span<const double> p, std::span<const double> t, LabelClass gt_class);
Filtered<std::size_t> peak_timing_error(std::span<const double> p, std::span<const double> t);
Filtered<double> peak_magnitude_error(std::span<const double> p, std::span<const double> t);
Filtered<double> growth_rate_fidelity(std::span<const double> p, std::span<const double> t);

// Smallest index attaining the maximum; requires a non-empty input.
std::size_t first_argmax(std::span<const double> values);

// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);
double pearson(std::span<const double> x, std::span<const double> y);
// Pearson correlation of the average-rank vectors. Throws DegenerateInput when
// either rank vector is constant, InvalidArgument on length mismatch or n < 3.
double spearman(std::span<const double> x, std::span<const double> y);

enum class Statistic { TotalCount, PeakTiming, PeakMagnitude, GrowthRate };
inline constexpr Statistic kStatistics[] = {Statistic::TotalCount, Statistic::PeakTiming, Statistic::PeakMagnitude,
                                            Statistic::GrowthRate};
const char* to_string(Statistic s);
// -1 for error statistics (higher metric, smaller error), +1 for growth fidelity.
int expected_sign(Statistic s);

struct SeriesStatRecord {
  std::string corpus;
  std::string chart_id;
  std::string gt_label;
  double ecs = 0.0;
  double dtw = 0.0;
  std::optional<double> total_count_err;
  std::optional<std::size_t> peak_timing_err;
  std::optional<double> peak_magnitude_err;
  std::optional<double> growth_rate_fidelity;
  std::map<Statistic, FilterReason> filter_flags;

  std::optional<double> value(Statistic s) const;
};

SeriesStatRecord compute_series_stats(const TimeSeries& p, const TimeSeries& t, LabelClass gt_class);

struct CorrelationRow {
  Statistic statistic;
  std::optional<double> r_ecs;  // absent when the rank vector is degenerate
  std::optional<double> r_dtw;
  std::size_t n = 0;
  int expected_sign = 0;
};

// One row per statistic with at least 3 eligible records; records are sorted
// by (chart_id, gt_label, corpus) before folding.
std::vector<CorrelationRow> correlate_metrics(std::vector<SeriesStatRecord> records,
                                              std::vector<std::string>* warnings = nullptr);

}  // namespace ecs
