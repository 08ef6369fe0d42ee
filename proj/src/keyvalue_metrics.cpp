#include "ecs/keyvalue_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ecs/assignment.hpp"
#include "ecs/errors.hpp"
#include "ecs/series_matching.hpp"
#include "ecs/text.hpp"

namespace ecs {

ChartType parse_chart_type(std::string_view text) {
  const auto lower = text::ascii_lower(text::trim(text));
  if (lower == "bar") return ChartType::Bar;
  if (lower == "line") return ChartType::Line;
  if (lower == "both" || lower == "mixed") return ChartType::Both;
  throw Error(ErrorKind::InvalidArgument, "unknown chart type '" + std::string(text) + "'");
}

const char* to_string(ChartType type) {
  switch (type) {
    case ChartType::Bar: return "bar";
    case ChartType::Line: return "line";
    case ChartType::Both: return "both";
  }
  return "line";
}

double scrm_tolerance(ChartType type) { return type == ChartType::Bar ? 0.05 : 0.10; }

std::vector<CellEntry> table_to_cells(const ChartTable& table) {
  std::vector<CellEntry> cells;
  for (const auto& series : table.series) {
    const auto label = text::normalize_label(series.label);
    for (const auto& point : series.points) {
      if (!point.value) continue;
      cells.push_back(CellEntry{label + kKeySeparator + point.x_label, *point.value});
    }
  }
  return cells;
}

namespace {

struct DecodedKeys {
  std::vector<std::u32string> keys;
  explicit DecodedKeys(const std::vector<CellEntry>& cells) {
    keys.reserve(cells.size());
    for (const auto& c : cells) keys.push_back(text::decode_utf8(c.key));
  }
};

double key_similarity(const std::u32string& a, const std::u32string& b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  if (a == b) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

KVScore finish(double total, std::size_t n_pred, std::size_t n_gt) {
  KVScore s;
  if (n_pred == 0 && n_gt == 0) {
    s.precision = s.recall = s.f1 = 1.0;
    return s;
  }
  s.precision = n_pred == 0 ? 0.0 : total / static_cast<double>(n_pred);
  s.recall = n_gt == 0 ? 0.0 : total / static_cast<double>(n_gt);
  s.f1 = s.precision + s.recall == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

// Builds the candidate edge set with `score(pred_idx, gt_idx, key_sim)`; the
// value test runs first so Levenshtein is skipped for pairs it already rules out.
template <typename ValueGate, typename Score>
KVScore assign_and_score(const std::vector<CellEntry>& pred, const std::vector<CellEntry>& gt, ValueGate gate,
                         Score score) {
  const DecodedKeys pk(pred), gk(gt);
  std::vector<WeightedEdge> edges;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = 0; j < gt.size(); ++j) {
      if (!gate(pred[i].value, gt[j].value)) continue;
      const double s = score(pred[i].value, gt[j].value, key_similarity(pk.keys[i], gk.keys[j]));
      if (s > 0.0) edges.push_back(WeightedEdge{static_cast<uint32_t>(i), static_cast<uint32_t>(j), s});
    }
  }
  const auto assignment = max_weight_assignment_sparse(pred.size(), gt.size(), edges);
  return finish(assignment.total, pred.size(), gt.size());
}

double value_scale(double gt_value) { return std::max(std::fabs(gt_value), kRelativeEpsilon); }

}  // namespace

KVScore rms_score(const std::vector<CellEntry>& pred, const std::vector<CellEntry>& gt) {
  return assign_and_score(
      pred, gt, [](double vp, double vg) { return std::fabs(vp - vg) / value_scale(vg) < 1.0; },
      [](double vp, double vg, double key_sim) {
        return key_sim * (1.0 - std::min(1.0, std::fabs(vp - vg) / value_scale(vg)));
      });
}

KVScore scrm_score(const std::vector<CellEntry>& pred, const std::vector<CellEntry>& gt, ChartType type) {
  const double tol = scrm_tolerance(type);
  return assign_and_score(
      pred, gt, [tol](double vp, double vg) { return std::fabs(vp - vg) <= tol * value_scale(vg); },
      [](double, double, double key_sim) { return key_sim > kScrmKeyThreshold ? 1.0 : 0.0; });
}

}  // namespace ecs
