#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ecs/data_model.hpp"

namespace ecs {

// Composite key separator (ASCII unit separator); never part of a label.
inline constexpr char kKeySeparator = '\x1F';
inline constexpr double kRelativeEpsilon = 1e-9;
inline constexpr double kScrmKeyThreshold = 0.5;

struct CellEntry {
  std::string key;  // normalized series label + kKeySeparator + x label
  double value = 0.0;
};

struct KVScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

enum class ChartType { Bar, Line, Both };

ChartType parse_chart_type(std::string_view text);
const char* to_string(ChartType type);
// 5% for bar charts, 10% for line and mixed charts.
double scrm_tolerance(ChartType type);

std::vector<CellEntry> table_to_cells(const ChartTable& table);

// Relative mapping similarity: pair score
//   nls(key_p, key_g) * (1 - min(1, |v_p - v_g| / max(|v_g|, eps)))
// summed over a maximum-total one-to-one assignment.
KVScore rms_score(const std::vector<CellEntry>& pred, const std::vector<CellEntry>& gt);

// Binary pair score: key nls > 0.5 and |v_p - v_g| <= tol * max(|v_g|, eps).
KVScore scrm_score(const std::vector<CellEntry>& pred, const std::vector<CellEntry>& gt, ChartType type);

}  // namespace ecs
