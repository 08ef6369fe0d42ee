// NEON variants for AArch64, where Advanced SIMD is part of the baseline ISA.

#include "ecs/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

#include <cmath>
#include <limits>

namespace ecs::kernels {

namespace {

constexpr std::size_t kLanes = 2;

void substitution_row(double p, const double* t, std::size_t n, double range, double theta, double* out) {
  const float64x2_t one = vdupq_n_f64(1.0);
  const float64x2_t vp = vdupq_n_f64(p);
  std::size_t j = 0;
  if (range > 0.0) {
    const float64x2_t vrange = vdupq_n_f64(range);
    const float64x2_t vtheta = vdupq_n_f64(theta);
    for (; j + kLanes <= n; j += kLanes) {
      const float64x2_t delta = vdivq_f64(vabsq_f64(vsubq_f64(vp, vld1q_f64(t + j))), vrange);
      vst1q_f64(out + j, vbslq_f64(vcleq_f64(delta, vtheta), delta, one));
    }
    for (; j < n; ++j) {
      const double delta = std::fabs(p - t[j]) / range;
      out[j] = delta <= theta ? delta : 1.0;
    }
  } else {
    const float64x2_t zero = vdupq_n_f64(0.0);
    for (; j + kLanes <= n; j += kLanes) {
      vst1q_f64(out + j, vbslq_f64(vceqq_f64(vp, vld1q_f64(t + j)), zero, one));
    }
    for (; j < n; ++j) out[j] = p == t[j] ? 0.0 : 1.0;
  }
}

inline void store_dirs(uint8_t* dir, uint64x2_t take_diag) {
  dir[0] = vgetq_lane_u64(take_diag, 0) ? kDiagonal : kInsert;
  dir[1] = vgetq_lane_u64(take_diag, 1) ? kDiagonal : kInsert;
}

void erp_row(const double* prev, const double* sub, double lambda, double* cur, uint8_t* dir, std::size_t n) {
  const float64x2_t vlambda = vdupq_n_f64(lambda);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const float64x2_t diag = vaddq_f64(vld1q_f64(prev + j), vld1q_f64(sub + j));
    const float64x2_t vert = vaddq_f64(vld1q_f64(prev + j + 1), vlambda);
    const uint64x2_t take_diag = vcleq_f64(diag, vert);
    vst1q_f64(cur + j + 1, vbslq_f64(take_diag, diag, vert));
    store_dirs(dir + j + 1, take_diag);
  }
  for (; j < n; ++j) {
    const double diag = prev[j] + sub[j];
    const double vert = prev[j + 1] + lambda;
    cur[j + 1] = diag <= vert ? diag : vert;
    dir[j + 1] = diag <= vert ? kDiagonal : kInsert;
  }
}

void dtw_row(const double* prev, double* cur, uint8_t* dir, std::size_t n) {
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const float64x2_t diag = vld1q_f64(prev + j);
    const float64x2_t vert = vld1q_f64(prev + j + 1);
    const uint64x2_t take_diag = vcleq_f64(diag, vert);
    vst1q_f64(cur + j + 1, vbslq_f64(take_diag, diag, vert));
    store_dirs(dir + j + 1, take_diag);
  }
  for (; j < n; ++j) {
    cur[j + 1] = prev[j] <= prev[j + 1] ? prev[j] : prev[j + 1];
    dir[j + 1] = prev[j] <= prev[j + 1] ? kDiagonal : kInsert;
  }
}

std::size_t assignment_relax(const double* cost_row, double u_row, const double* v, double* minv, int32_t* way,
                             const uint8_t* used, int32_t from, std::size_t m, double* delta) {
  const double inf = std::numeric_limits<double>::infinity();
  const float64x2_t vinf = vdupq_n_f64(inf);
  const float64x2_t vu = vdupq_n_f64(u_row);
  float64x2_t vbest = vinf;
  std::size_t j = 0;
  for (; j + kLanes <= m; j += kLanes) {
    const uint64_t lane_free[2] = {used[j] ? 0ull : ~0ull, used[j + 1] ? 0ull : ~0ull};
    const uint64x2_t free_lane = vld1q_u64(lane_free);
    const float64x2_t reduced = vsubq_f64(vsubq_f64(vld1q_f64(cost_row + j), vu), vld1q_f64(v + j));
    const float64x2_t old = vld1q_f64(minv + j);
    const uint64x2_t improve = vandq_u64(vcltq_f64(reduced, old), free_lane);
    const float64x2_t updated = vbslq_f64(improve, reduced, old);
    vst1q_f64(minv + j, updated);
    if (vgetq_lane_u64(improve, 0)) way[j] = from;
    if (vgetq_lane_u64(improve, 1)) way[j + 1] = from;
    vbest = vminq_f64(vbest, vbslq_f64(free_lane, updated, vinf));
  }
  double best = vminvq_f64(vbest);
  for (; j < m; ++j) {
    if (used[j]) continue;
    const double reduced = (cost_row[j] - u_row) - v[j];
    if (reduced < minv[j]) {
      minv[j] = reduced;
      way[j] = from;
    }
    best = minv[j] < best ? minv[j] : best;
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (!used[k] && minv[k] == best) {
      *delta = minv[k];
      return k;
    }
  }
  *delta = inf;
  return m;
}

constexpr KernelTable kNeon{"neon", substitution_row, erp_row, dtw_row, assignment_relax};

}  // namespace

const KernelTable* neon() { return &kNeon; }

}  // namespace ecs::kernels

#else

namespace ecs::kernels {
const KernelTable* neon() { return nullptr; }
}  // namespace ecs::kernels

#endif
