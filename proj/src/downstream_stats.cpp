#include "ecs/downstream_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "ecs/errors.hpp"
#include "ecs/text.hpp"

namespace ecs {

const char* to_string(LabelClass c) {
  switch (c) {
    case LabelClass::CountLike: return "count_like";
    case LabelClass::RateLike: return "rate_like";
    case LabelClass::Unknown: return "unknown";
  }
  return "unknown";
}

LabelClass parse_label_class(std::string_view text) {
  const auto lower = text::ascii_lower(text::trim(text));
  if (lower == "count_like" || lower == "count") return LabelClass::CountLike;
  if (lower == "rate_like" || lower == "rate") return LabelClass::RateLike;
  if (lower == "unknown") return LabelClass::Unknown;
  throw Error(ErrorKind::InvalidArgument, "unknown label class '" + std::string(text) + "'");
}

LabelClass classify_label(std::string_view label, const LabelKeywords& keywords,
                          const std::map<std::string, std::string>* overrides) {
  if (overrides != nullptr) {
    const auto it = overrides->find(std::string(label));
    if (it != overrides->end()) return parse_label_class(it->second);
  }
  const auto norm = text::normalize_label(label);
  auto contains_any = [&](const std::vector<std::string>& words) {
    return std::any_of(words.begin(), words.end(),
                       [&](const std::string& w) { return norm.find(w) != std::string::npos; });
  };
  if (contains_any(keywords.rate)) return LabelClass::RateLike;
  if (contains_any(keywords.count)) return LabelClass::CountLike;
  return LabelClass::Unknown;
}

const char* to_string(FilterReason r) {
  switch (r) {
    case FilterReason::RateLike: return "rate_like";
    case FilterReason::UnknownLabel: return "unknown_label";
    case FilterReason::ZeroGtSum: return "zero_gt_sum";
    case FilterReason::NoDefinedPeak: return "no_defined_peak";
    case FilterReason::EmptyPrediction: return "empty_prediction";
    case FilterReason::ZeroPredictedPeak: return "zero_predicted_peak";
    case FilterReason::PhaseTooShort: return "phase_too_short";
    case FilterReason::InsufficientPairs: return "insufficient_pairs";
    case FilterReason::DegenerateTrajectory: return "degenerate_trajectory";
  }
  return "unknown";
}

std::size_t first_argmax(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

namespace {

double sum_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

double max_of(std::span<const double> v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

Filtered<double> total_count_error(std::span<const double> p, std::span<const double> t, LabelClass gt_class) {
  if (gt_class == LabelClass::RateLike) return Filtered<double>::reject(FilterReason::RateLike);
  if (gt_class == LabelClass::Unknown) return Filtered<double>::reject(FilterReason::UnknownLabel);
  const double s_gt = sum_of(t);
  if (!(s_gt > 0.0)) return Filtered<double>::reject(FilterReason::ZeroGtSum);
  return Filtered<double>::ok(std::fabs(sum_of(p) - s_gt) / s_gt);
}

Filtered<std::size_t> peak_timing_error(std::span<const double> p, std::span<const double> t) {
  if (t.empty() || !(max_of(t) > 0.0)) return Filtered<std::size_t>::reject(FilterReason::NoDefinedPeak);
  if (p.empty()) return Filtered<std::size_t>::reject(FilterReason::EmptyPrediction);
  const std::size_t a = first_argmax(p);
  const std::size_t b = first_argmax(t);
  return Filtered<std::size_t>::ok(a > b ? a - b : b - a);
}

Filtered<double> peak_magnitude_error(std::span<const double> p, std::span<const double> t) {
  if (t.empty() || !(max_of(t) > 0.0)) return Filtered<double>::reject(FilterReason::NoDefinedPeak);
  if (p.empty()) return Filtered<double>::reject(FilterReason::EmptyPrediction);
  const double peak_p = max_of(p);
  if (!(peak_p > 0.0)) return Filtered<double>::reject(FilterReason::ZeroPredictedPeak);
  const double peak_t = max_of(t);
  return Filtered<double>::ok(std::fabs(peak_p - peak_t) / peak_t);
}

Filtered<double> growth_rate_fidelity(std::span<const double> p, std::span<const double> t) {
  if (t.empty() || !(max_of(t) > 0.0)) return Filtered<double>::reject(FilterReason::NoDefinedPeak);
  const std::size_t peak = first_argmax(t);
  std::size_t start = 0;
  while (!(t[start] > 0.0)) ++start;  // terminates: t[peak] > 0
  if (peak - start + 1 < kMinAscendingPhase) return Filtered<double>::reject(FilterReason::PhaseTooShort);
  if (p.empty()) return Filtered<double>::reject(FilterReason::EmptyPrediction);

  std::vector<double> lp, lt;
  for (std::size_t i = start; i <= peak && i < p.size(); ++i) {
    if (p[i] <= -1.0 || t[i] <= -1.0) return Filtered<double>::reject(FilterReason::DegenerateTrajectory);
    lp.push_back(std::log(p[i] + 1.0));
    lt.push_back(std::log(t[i] + 1.0));
  }
  if (lp.size() < kMinAscendingPhase) return Filtered<double>::reject(FilterReason::InsufficientPairs);
  try {
    return Filtered<double>::ok(pearson(lp, lt));
  } catch (const Error&) {
    return Filtered<double>::reject(FilterReason::DegenerateTrajectory);
  }
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t k = i;
    while (k + 1 < n && values[order[k + 1]] == values[order[i]]) ++k;
    // positions i..k (0-based) share rank mean((i+1)..(k+1))
    const double rank = 0.5 * static_cast<double>(i + k + 2);
    for (std::size_t r = i; r <= k; ++r) ranks[order[r]] = rank;
    i = k + 1;
  }
  return ranks;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw Error(ErrorKind::InvalidArgument, "pearson needs equal non-empty inputs");
  const double n = static_cast<double>(x.size());
  const double mx = sum_of(x) / n;
  const double my = sum_of(y) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::DegenerateInput, "constant input has no correlation");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::InvalidArgument, "spearman inputs differ in length");
  if (x.size() < 3) throw Error(ErrorKind::InvalidArgument, "spearman needs at least 3 observations");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

const char* to_string(Statistic s) {
  switch (s) {
    case Statistic::TotalCount: return "total_count_error";
    case Statistic::PeakTiming: return "peak_timing_error";
    case Statistic::PeakMagnitude: return "peak_magnitude_error";
    case Statistic::GrowthRate: return "growth_rate_fidelity";
  }
  return "unknown";
}

int expected_sign(Statistic s) { return s == Statistic::GrowthRate ? 1 : -1; }

std::optional<double> SeriesStatRecord::value(Statistic s) const {
  switch (s) {
    case Statistic::TotalCount: return total_count_err;
    case Statistic::PeakTiming:
      if (peak_timing_err) return static_cast<double>(*peak_timing_err);
      return std::nullopt;
    case Statistic::PeakMagnitude: return peak_magnitude_err;
    case Statistic::GrowthRate: return growth_rate_fidelity;
  }
  return std::nullopt;
}

SeriesStatRecord compute_series_stats(const TimeSeries& p, const TimeSeries& t, LabelClass gt_class) {
  const auto pv = p.values_present();
  const auto tv = t.values_present();
  SeriesStatRecord rec;
  rec.gt_label = t.label;

  auto take = [&rec](Statistic s, auto filtered, auto& slot) {
    if (filtered.value) {
      slot = *filtered.value;
    } else {
      rec.filter_flags[s] = *filtered.reason;
    }
  };
  take(Statistic::TotalCount, total_count_error(pv, tv, gt_class), rec.total_count_err);
  take(Statistic::PeakTiming, peak_timing_error(pv, tv), rec.peak_timing_err);
  take(Statistic::PeakMagnitude, peak_magnitude_error(pv, tv), rec.peak_magnitude_err);
  take(Statistic::GrowthRate, growth_rate_fidelity(pv, tv), rec.growth_rate_fidelity);
  return rec;
}

std::vector<CorrelationRow> correlate_metrics(std::vector<SeriesStatRecord> records,
                                              std::vector<std::string>* warnings) {
  std::sort(records.begin(), records.end(), [](const SeriesStatRecord& a, const SeriesStatRecord& b) {
    return std::tie(a.chart_id, a.gt_label, a.corpus) < std::tie(b.chart_id, b.gt_label, b.corpus);
  });

  std::vector<CorrelationRow> rows;
  for (const Statistic stat : kStatistics) {
    std::vector<double> values, ecs, dtw;
    for (const auto& r : records) {
      if (const auto v = r.value(stat)) {
        values.push_back(*v);
        ecs.push_back(r.ecs);
        dtw.push_back(r.dtw);
      }
    }
    if (values.size() < 3) {
      if (warnings) {
        warnings->push_back(std::string(to_string(stat)) + ": only " + std::to_string(values.size()) +
                            " eligible series, correlation omitted");
      }
      continue;
    }
    CorrelationRow row{stat, std::nullopt, std::nullopt, values.size(), expected_sign(stat)};
    auto correlate = [&](const std::vector<double>& metric, const char* name) -> std::optional<double> {
      try {
        return spearman(metric, values);
      } catch (const Error& e) {
        if (warnings) warnings->push_back(std::string(to_string(stat)) + " vs " + name + ": " + e.what());
        return std::nullopt;
      }
    };
    row.r_ecs = correlate(ecs, "ecs");
    row.r_dtw = correlate(dtw, "dtw");
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ecs
