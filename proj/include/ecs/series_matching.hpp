#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecs/data_model.hpp"

namespace ecs {

inline constexpr double kDefaultNlsThreshold = 0.5;

// Unit-cost edit distance over Unicode scalar values.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

// Normalized Levenshtein similarity on already-normalized text:
// 1 - d(a, b) / max(|a|, |b|), and 1 when both are empty.
double nls_raw(std::string_view a, std::string_view b);

// nls_raw after text::normalize_label on both sides.
double nls(std::string_view a, std::string_view b);

enum class MatchKind { Paired, GtUnmatched, PredUnmatched };

const char* to_string(MatchKind kind);

struct SeriesMatch {
  MatchKind kind = MatchKind::Paired;
  std::optional<std::size_t> gt_index;
  std::optional<std::size_t> pred_index;
  std::string gt_label;                 // empty for PredUnmatched
  std::optional<std::string> pred_label;
  std::optional<double> nls;            // present iff paired
};

// One-to-one pairing maximizing total NLS over pairs with NLS strictly above
// `threshold`. Among optimal assignments, ground-truth series take the smallest
// available prediction index first (lexicographic on gt order). Output lists
// every ground-truth series in order (paired or unmatched), then unpaired
// predictions in order.
std::vector<SeriesMatch> match_series(const std::vector<TimeSeries>& gt, const std::vector<TimeSeries>& pred,
                                      double threshold = kDefaultNlsThreshold);

// Same, on labels directly.
std::vector<SeriesMatch> match_labels(const std::vector<std::string>& gt, const std::vector<std::string>& pred,
                                      double threshold = kDefaultNlsThreshold);

}  // namespace ecs
