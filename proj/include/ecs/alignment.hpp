#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ecs/data_model.hpp"
#include "ecs/kernels.hpp"

namespace ecs {

inline constexpr double kDefaultTheta = 0.01;
inline constexpr double kDefaultLambda = 1.0;

struct AlignmentParams {
  double theta = kDefaultTheta;    // tolerance, as a fraction of the y range
  double lambda = kDefaultLambda;  // gap penalty per inserted or deleted point
};

// Rejects non-positive or non-finite theta / lambda.
void validate(const AlignmentParams& params);

// Y range of the ground-truth series; every substitution is scaled by it.
struct NormalizationContext {
  double y_min = 0.0;
  double y_max = 0.0;

  double range() const { return y_max - y_min; }
  // Extrema over the given values; throws EmptyInput when there are none.
  static NormalizationContext from_values(std::span<const double> values);
};

enum class EditOp : uint8_t { Match, Insert, Delete };

// i indexes the prediction, j the ground truth (both 0-based). Insert steps
// carry only i (a surplus predicted point), Delete steps only j (a missed
// ground-truth point).
struct EditStep {
  EditOp op;
  std::size_t i;
  std::size_t j;

  bool operator==(const EditStep&) const = default;
};

struct AlignmentResult {
  double cost = 0.0;
  std::size_t n_match = 0;
  std::size_t n_insert = 0;
  std::size_t n_delete = 0;
  double sub_cost_total = 0.0;
  std::vector<EditStep> path;  // from (0,0) to (M,N)

  std::size_t path_length() const { return n_match + n_insert + n_delete; }
};

double substitution_cost(double p, double t, const NormalizationContext& ctx, double theta);

// ERP alignment of present-value sequences. Ties on the optimal path are
// broken by preferring match, then delete (advance ground truth), then
// insert (advance prediction), walking back from (M,N).
AlignmentResult erp_align(std::span<const double> p, std::span<const double> t, const NormalizationContext& ctx,
                          const AlignmentParams& params, const kernels::KernelTable& kernels = kernels::active());

// ECS similarity of one predicted series against its ground truth. Missing
// values are dropped on both sides before alignment. Throws EmptyGroundTruth
// when `t` has no present value.
double ecs_series(const TimeSeries& p, const TimeSeries& t, const AlignmentParams& params);

struct EcsOutcome {
  double ecs = 0.0;
  bool clamped = false;  // raw score was negative (lambda > 1) and was clamped to 0
  AlignmentResult alignment;
};

EcsOutcome ecs_align(const TimeSeries& p, const TimeSeries& t, const AlignmentParams& params,
                     const kernels::KernelTable& kernels = kernels::active());
EcsOutcome ecs_align_values(std::span<const double> p, std::span<const double> t, const AlignmentParams& params,
                            const kernels::KernelTable& kernels = kernels::active());

struct DtwResult {
  double cost = 0.0;
  std::size_t path_length = 0;
  double similarity = 0.0;
};

// Boundary-to-boundary DTW over substitution_cost: every cell on the warping
// path pays its substitution cost, no gap charge. similarity = 1 - cost / path
// length. Throws EmptyInput when either side is empty.
DtwResult dtw_align(std::span<const double> p, std::span<const double> t, const NormalizationContext& ctx,
                    double theta, const kernels::KernelTable& kernels = kernels::active());

double dtw_series(const TimeSeries& p, const TimeSeries& t, const AlignmentParams& params);

}  // namespace ecs
