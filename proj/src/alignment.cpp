#include "ecs/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ecs/errors.hpp"

namespace ecs {

void validate(const AlignmentParams& params) {
  if (!(params.theta > 0.0) || !std::isfinite(params.theta)) {
    throw Error(ErrorKind::InvalidArgument, "theta must be a positive finite number");
  }
  if (!(params.lambda > 0.0) || !std::isfinite(params.lambda)) {
    throw Error(ErrorKind::InvalidArgument, "lambda must be a positive finite number");
  }
}

NormalizationContext NormalizationContext::from_values(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "normalization needs at least one value");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return NormalizationContext{*lo, *hi};
}

double substitution_cost(double p, double t, const NormalizationContext& ctx, double theta) {
  double out = 0.0;
  kernels::scalar().substitution_row(p, &t, 1, ctx.range(), theta, &out);
  return out;
}

namespace {

// Row-major (M+1) x (N+1) traceback codes.
class TracebackMatrix {
 public:
  TracebackMatrix(std::size_t rows, std::size_t cols) : cols_(cols), codes_(rows * cols) {}

  uint8_t* row(std::size_t i) { return codes_.data() + i * cols_; }
  uint8_t at(std::size_t i, std::size_t j) const { return codes_[i * cols_ + j]; }

 private:
  std::size_t cols_;
  std::vector<uint8_t> codes_;
};

// Applies the in-row dependency left to right. `pending` holds the best of the
// diagonal and vertical candidates with its code; the horizontal candidate wins
// when strictly better, or when equal and the pending code is kInsert.
inline bool prefer_horizontal(double horizontal, double pending, uint8_t pending_code) {
  return horizontal < pending || (horizontal == pending && pending_code == kernels::kInsert);
}

}  // namespace

AlignmentResult erp_align(std::span<const double> p, std::span<const double> t, const NormalizationContext& ctx,
                          const AlignmentParams& params, const kernels::KernelTable& kernels) {
  const std::size_t m = p.size();
  const std::size_t n = t.size();
  const double lambda = params.lambda;
  const double range = ctx.range();

  TracebackMatrix trace(m + 1, n + 1);
  std::vector<double> prev(n + 1), cur(n + 1), sub(n);

  prev[0] = 0.0;
  uint8_t* top = trace.row(0);
  for (std::size_t j = 1; j <= n; ++j) {
    prev[j] = prev[j - 1] + lambda;
    top[j] = kernels::kDelete;
  }

  for (std::size_t i = 1; i <= m; ++i) {
    uint8_t* dir = trace.row(i);
    cur[0] = prev[0] + lambda;
    dir[0] = kernels::kInsert;
    kernels.substitution_row(p[i - 1], t.data(), n, range, params.theta, sub.data());
    kernels.erp_row(prev.data(), sub.data(), lambda, cur.data(), dir, n);
    for (std::size_t j = 1; j <= n; ++j) {
      const double horizontal = cur[j - 1] + lambda;
      if (prefer_horizontal(horizontal, cur[j], dir[j])) {
        cur[j] = horizontal;
        dir[j] = kernels::kDelete;
      }
    }
    std::swap(prev, cur);
  }

  AlignmentResult result;
  result.cost = prev[n];
  result.path.reserve(m + n);
  std::size_t i = m;
  std::size_t j = n;
  while (i > 0 || j > 0) {
    switch (trace.at(i, j)) {
      case kernels::kDiagonal:
        --i;
        --j;
        result.path.push_back({EditOp::Match, i, j});
        result.sub_cost_total += substitution_cost(p[i], t[j], ctx, params.theta);
        ++result.n_match;
        break;
      case kernels::kDelete:
        --j;
        result.path.push_back({EditOp::Delete, i, j});
        ++result.n_delete;
        break;
      default:
        --i;
        result.path.push_back({EditOp::Insert, i, j});
        ++result.n_insert;
        break;
    }
  }
  std::reverse(result.path.begin(), result.path.end());
  return result;
}

EcsOutcome ecs_align_values(std::span<const double> p, std::span<const double> t, const AlignmentParams& params,
                            const kernels::KernelTable& kernels) {
  if (t.empty()) throw Error(ErrorKind::EmptyGroundTruth, "ground-truth series has no present values");
  const auto ctx = NormalizationContext::from_values(t);

  EcsOutcome out;
  out.alignment = erp_align(p, t, ctx, params, kernels);
  const double raw = 1.0 - out.alignment.cost / static_cast<double>(out.alignment.path_length());
  out.clamped = raw < 0.0;
  out.ecs = out.clamped ? 0.0 : raw;
  return out;
}

EcsOutcome ecs_align(const TimeSeries& p, const TimeSeries& t, const AlignmentParams& params,
                     const kernels::KernelTable& kernels) {
  const auto pv = p.values_present();
  const auto tv = t.values_present();
  if (tv.empty()) {
    throw Error(ErrorKind::EmptyGroundTruth, "ground-truth series '" + t.label + "' has no present values");
  }
  return ecs_align_values(pv, tv, params, kernels);
}

double ecs_series(const TimeSeries& p, const TimeSeries& t, const AlignmentParams& params) {
  return ecs_align(p, t, params).ecs;
}

DtwResult dtw_align(std::span<const double> p, std::span<const double> t, const NormalizationContext& ctx,
                    double theta, const kernels::KernelTable& kernels) {
  if (p.empty() || t.empty()) throw Error(ErrorKind::EmptyInput, "DTW needs at least one value on each side");
  const std::size_t m = p.size();
  const std::size_t n = t.size();
  const double inf = std::numeric_limits<double>::infinity();
  const double range = ctx.range();

  TracebackMatrix trace(m + 1, n + 1);
  std::vector<double> prev(n + 1, inf), cur(n + 1), sub(n);
  prev[0] = 0.0;

  for (std::size_t i = 1; i <= m; ++i) {
    uint8_t* dir = trace.row(i);
    cur[0] = inf;
    kernels.dtw_row(prev.data(), cur.data(), dir, n);
    kernels.substitution_row(p[i - 1], t.data(), n, range, theta, sub.data());
    for (std::size_t j = 1; j <= n; ++j) {
      if (prefer_horizontal(cur[j - 1], cur[j], dir[j])) {
        cur[j] = cur[j - 1];
        dir[j] = kernels::kDelete;
      }
      cur[j] += sub[j - 1];
    }
    std::swap(prev, cur);
  }

  DtwResult result;
  result.cost = prev[n];
  std::size_t i = m;
  std::size_t j = n;
  while (i > 0 && j > 0) {
    ++result.path_length;
    switch (trace.at(i, j)) {
      case kernels::kDiagonal: --i; --j; break;
      case kernels::kDelete: --j; break;
      default: --i; break;
    }
  }
  result.similarity = std::clamp(1.0 - result.cost / static_cast<double>(result.path_length), 0.0, 1.0);
  return result;
}

double dtw_series(const TimeSeries& p, const TimeSeries& t, const AlignmentParams& params) {
  const auto pv = p.values_present();
  const auto tv = t.values_present();
  if (pv.empty() || tv.empty()) throw Error(ErrorKind::EmptyInput, "DTW needs present values on both sides");
  return dtw_align(pv, tv, NormalizationContext::from_values(tv), params.theta).similarity;
}

}  // namespace ecs
