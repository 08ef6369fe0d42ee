#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "ecs/alignment.hpp"
#include "ecs/data_model.hpp"
#include "ecs/series_matching.hpp"

namespace ecs {

// Where a chart's unit of score mass went. The seven fields sum to 1.
struct Decomposition {
  double ecs = 0.0;
  double numerical_error = 0.0;
  double surplus_datapoints = 0.0;
  double missed_datapoints = 0.0;
  double label_mismatch = 0.0;
  double missed_series = 0.0;
  double no_data_extracted = 0.0;

  double sum() const;
};

inline constexpr const char* kDecompositionFields[] = {
    "ecs", "numerical_error", "surplus_datapoints", "missed_datapoints",
    "label_mismatch", "missed_series", "no_data_extracted"};

// Field access by position in kDecompositionFields.
double& field(Decomposition& d, std::size_t index);
double field(const Decomposition& d, std::size_t index);

// Ground-truth series index -> its ERP alignment.
using AlignmentMap = std::map<std::size_t, AlignmentResult>;

// `pred` is nullptr when the prediction file is missing or failed to parse.
// Every paired match must have an entry in `alignments` (MissingAlignment
// otherwise). Each ground-truth series carries weight 1/G.
Decomposition decompose_chart(const ChartTable& gt, const ChartTable* pred, const std::vector<SeriesMatch>& matches,
                              const AlignmentMap& alignments, const AlignmentParams& params);

// ECS of one paired series recomputed from its alignment, as used by the harness.
double series_ecs_from_alignment(const AlignmentResult& alignment);

// Mean of a list of values accumulated in order then divided by the count.
// The harness and the decomposition both aggregate through this so the chart
// ECS they report is bit-identical.
double ordered_mean(const std::vector<double>& values);

struct GroupedDecomposition {
  std::size_t count = 0;
  Decomposition mean;
};

// tag name -> tag value -> unweighted mean. Charts without a tag land in the
// "unknown" bucket for that tag. Tag names outside chart_type / cumulative /
// set / source are skipped and reported through `warnings`.
std::map<std::string, std::map<std::string, GroupedDecomposition>> aggregate_decompositions(
    const std::vector<Decomposition>& decompositions, const std::vector<StratumTags>& tags,
    const std::vector<std::string>& group_by, std::vector<std::string>* warnings = nullptr);

bool is_known_group_tag(const std::string& tag);
inline constexpr const char* kUnknownTagValue = "unknown";

}  // namespace ecs
