#include "ecs/decomposition.hpp"

#include <algorithm>
#include <array>

#include "ecs/errors.hpp"

namespace ecs {

namespace {

constexpr std::size_t kFieldCount = std::size(kDecompositionFields);

}  // namespace

double Decomposition::sum() const {
  return ecs + numerical_error + surplus_datapoints + missed_datapoints + label_mismatch + missed_series +
         no_data_extracted;
}

double& field(Decomposition& d, std::size_t index) {
  switch (index) {
    case 0: return d.ecs;
    case 1: return d.numerical_error;
    case 2: return d.surplus_datapoints;
    case 3: return d.missed_datapoints;
    case 4: return d.label_mismatch;
    case 5: return d.missed_series;
    case 6: return d.no_data_extracted;
  }
  throw Error(ErrorKind::InvalidArgument, "decomposition field index out of range");
}

double field(const Decomposition& d, std::size_t index) { return field(const_cast<Decomposition&>(d), index); }

double ordered_mean(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(values.size());
}

double series_ecs_from_alignment(const AlignmentResult& alignment) {
  const double raw = 1.0 - alignment.cost / static_cast<double>(alignment.path_length());
  return raw < 0.0 ? 0.0 : raw;
}

Decomposition decompose_chart(const ChartTable& gt, const ChartTable* pred, const std::vector<SeriesMatch>& matches,
                              const AlignmentMap& alignments, const AlignmentParams& params) {
  Decomposition out;
  if (gt.series.empty()) throw Error(ErrorKind::EmptyGroundTruth, "chart '" + gt.chart_id + "' has no series");
  if (pred == nullptr || pred->has_no_data()) {
    out.no_data_extracted = 1.0;
    return out;
  }

  const bool surplus_predictions = std::any_of(matches.begin(), matches.end(), [](const SeriesMatch& m) {
    return m.kind == MatchKind::PredUnmatched;
  });

  // Per-series shares, one entry per ground-truth series in order.
  std::array<std::vector<double>, kFieldCount> shares;
  for (auto& s : shares) s.assign(gt.series.size(), 0.0);

  for (const auto& match : matches) {
    if (match.kind == MatchKind::PredUnmatched) continue;
    const std::size_t g = *match.gt_index;
    if (match.kind == MatchKind::GtUnmatched) {
      shares[surplus_predictions ? 4 : 5][g] = 1.0;
      continue;
    }
    const auto it = alignments.find(g);
    if (it == alignments.end()) {
      throw Error(ErrorKind::MissingAlignment, "no alignment for ground-truth series '" + match.gt_label + "'");
    }
    const auto& a = it->second;
    const double length = static_cast<double>(a.path_length());
    const double raw = 1.0 - a.cost / length;
    double numerical = a.sub_cost_total / length;
    double surplus = params.lambda * static_cast<double>(a.n_insert) / length;
    double missed = params.lambda * static_cast<double>(a.n_delete) / length;
    if (raw < 0.0) {
      // Clamped score: the losses exceed one unit, rescale them onto it.
      const double loss = numerical + surplus + missed;
      numerical /= loss;
      surplus /= loss;
      missed /= loss;
    }
    shares[0][g] = series_ecs_from_alignment(a);
    shares[1][g] = numerical;
    shares[2][g] = surplus;
    shares[3][g] = missed;
  }

  for (std::size_t f = 0; f < kFieldCount; ++f) field(out, f) = ordered_mean(shares[f]);
  return out;
}

bool is_known_group_tag(const std::string& tag) {
  return tag == "chart_type" || tag == "cumulative" || tag == "set" || tag == "source";
}

std::map<std::string, std::map<std::string, GroupedDecomposition>> aggregate_decompositions(
    const std::vector<Decomposition>& decompositions, const std::vector<StratumTags>& tags,
    const std::vector<std::string>& group_by, std::vector<std::string>* warnings) {
  if (decompositions.size() != tags.size()) {
    throw Error(ErrorKind::InvalidArgument, "one tag set per decomposition is required");
  }
  std::map<std::string, std::map<std::string, GroupedDecomposition>> out;
  for (const auto& tag : group_by) {
    if (!is_known_group_tag(tag)) {
      if (warnings) warnings->push_back("unknown group tag '" + tag + "' ignored");
      continue;
    }
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t c = 0; c < decompositions.size(); ++c) {
      const auto it = tags[c].find(tag);
      members[it == tags[c].end() ? kUnknownTagValue : it->second].push_back(c);
    }
    auto& groups = out[tag];
    for (const auto& [value, idx] : members) {
      GroupedDecomposition g;
      g.count = idx.size();
      for (std::size_t f = 0; f < kFieldCount; ++f) {
        std::vector<double> column;
        column.reserve(idx.size());
        for (auto c : idx) column.push_back(field(decompositions[c], f));
        field(g.mean, f) = ordered_mean(column);
      }
      groups.emplace(value, g);
    }
  }
  return out;
}

}  // namespace ecs
