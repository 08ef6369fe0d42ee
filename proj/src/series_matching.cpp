#include "ecs/series_matching.hpp"

#include <algorithm>

#include "ecs/assignment.hpp"
#include "ecs/text.hpp"

namespace ecs {

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(text::decode_utf8(a), text::decode_utf8(b));
}

double nls_raw(std::string_view a, std::string_view b) {
  const auto ua = text::decode_utf8(a);
  const auto ub = text::decode_utf8(b);
  const std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(ua, ub)) / static_cast<double>(longest);
}

double nls(std::string_view a, std::string_view b) {
  return nls_raw(text::normalize_label(a), text::normalize_label(b));
}

const char* to_string(MatchKind kind) {
  switch (kind) {
    case MatchKind::Paired: return "paired";
    case MatchKind::GtUnmatched: return "gt_unmatched";
    case MatchKind::PredUnmatched: return "pred_unmatched";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kExactSearchMaxPred = 16;
constexpr double kTieTolerance = 1e-12;

// best[g][mask]: the best total obtainable by gt series g.. given the
// predictions in `mask` are taken. Forward reconstruction then prefers the
// smallest admissible prediction index at each gt position.
std::vector<int> lexicographic_optimum(const std::vector<double>& w, std::size_t g_count, std::size_t p_count) {
  const std::size_t states = std::size_t{1} << p_count;
  std::vector<double> best((g_count + 1) * states, 0.0);
  auto at = [&](std::size_t g, std::size_t mask) -> double& { return best[g * states + mask]; };

  for (std::size_t g = g_count; g-- > 0;) {
    for (std::size_t mask = 0; mask < states; ++mask) {
      double value = at(g + 1, mask);
      for (std::size_t p = 0; p < p_count; ++p) {
        const double weight = w[g * p_count + p];
        if (weight <= 0.0 || (mask >> p & 1u)) continue;
        value = std::max(value, weight + at(g + 1, mask | std::size_t{1} << p));
      }
      at(g, mask) = value;
    }
  }

  std::vector<int> choice(g_count, -1);
  std::size_t mask = 0;
  for (std::size_t g = 0; g < g_count; ++g) {
    const double target = at(g, mask) - kTieTolerance;
    for (std::size_t p = 0; p < p_count; ++p) {
      const double weight = w[g * p_count + p];
      if (weight <= 0.0 || (mask >> p & 1u)) continue;
      if (weight + at(g + 1, mask | std::size_t{1} << p) >= target) {
        choice[g] = static_cast<int>(p);
        mask |= std::size_t{1} << p;
        break;
      }
    }
  }
  return choice;
}

}  // namespace

std::vector<SeriesMatch> match_labels(const std::vector<std::string>& gt, const std::vector<std::string>& pred,
                                      double threshold) {
  const std::size_t g_count = gt.size();
  const std::size_t p_count = pred.size();
  std::vector<std::string> gt_norm, pred_norm;
  for (const auto& s : gt) gt_norm.push_back(text::normalize_label(s));
  for (const auto& s : pred) pred_norm.push_back(text::normalize_label(s));

  // Admissible weights; 0 marks "not admissible". nls > threshold >= 0 keeps
  // every admissible weight strictly positive.
  std::vector<double> sim(g_count * p_count, 0.0), w(g_count * p_count, 0.0);
  for (std::size_t g = 0; g < g_count; ++g) {
    for (std::size_t p = 0; p < p_count; ++p) {
      const double s = nls_raw(gt_norm[g], pred_norm[p]);
      sim[g * p_count + p] = s;
      if (s > threshold) w[g * p_count + p] = s;
    }
  }

  std::vector<int> choice;
  if (p_count <= kExactSearchMaxPred) {
    choice = lexicographic_optimum(w, g_count, p_count);
  } else {
    choice = max_weight_assignment(w, g_count, p_count).row_to_col;
  }

  std::vector<SeriesMatch> out;
  std::vector<bool> pred_taken(p_count, false);
  for (std::size_t g = 0; g < g_count; ++g) {
    SeriesMatch m;
    m.gt_index = g;
    m.gt_label = gt[g];
    if (choice[g] >= 0) {
      const auto p = static_cast<std::size_t>(choice[g]);
      pred_taken[p] = true;
      m.kind = MatchKind::Paired;
      m.pred_index = p;
      m.pred_label = pred[p];
      m.nls = sim[g * p_count + p];
    } else {
      m.kind = MatchKind::GtUnmatched;
    }
    out.push_back(std::move(m));
  }
  for (std::size_t p = 0; p < p_count; ++p) {
    if (pred_taken[p]) continue;
    SeriesMatch m;
    m.kind = MatchKind::PredUnmatched;
    m.pred_index = p;
    m.pred_label = pred[p];
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<SeriesMatch> match_series(const std::vector<TimeSeries>& gt, const std::vector<TimeSeries>& pred,
                                      double threshold) {
  std::vector<std::string> gl, pl;
  for (const auto& s : gt) gl.push_back(s.label);
  for (const auto& s : pred) pl.push_back(s.label);
  return match_labels(gl, pl, threshold);
}

}  // namespace ecs
