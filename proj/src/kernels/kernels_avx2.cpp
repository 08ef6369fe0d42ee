// AVX2 variants. This translation unit is compiled with -mavx2 on x86-64; the
// table is only handed out after a runtime CPUID check.

#include "ecs/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include <array>
#include <cmath>
#include <cstring>
#include <limits>

namespace ecs::kernels {

namespace {

constexpr std::size_t kLanes = 4;

// Byte k of entry b is kDiagonal when bit k of the compare mask is set, else `other`.
constexpr std::array<uint32_t, 16> make_dir_lut(uint8_t other) {
  std::array<uint32_t, 16> lut{};
  for (uint32_t b = 0; b < 16; ++b) {
    uint32_t word = 0;
    for (uint32_t k = 0; k < 4; ++k) {
      const uint32_t code = (b >> k) & 1u ? uint32_t{kDiagonal} : uint32_t{other};
      word |= code << (8 * k);
    }
    lut[b] = word;
  }
  return lut;
}

constexpr auto kInsertLut = make_dir_lut(kInsert);

inline void store_dirs(uint8_t* dir, int mask) {
  std::memcpy(dir, &kInsertLut[static_cast<std::size_t>(mask)], 4);
}

void substitution_row(double p, const double* t, std::size_t n, double range, double theta, double* out) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d vp = _mm256_set1_pd(p);
  std::size_t j = 0;
  if (range > 0.0) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d vrange = _mm256_set1_pd(range);
    const __m256d vtheta = _mm256_set1_pd(theta);
    for (; j + kLanes <= n; j += kLanes) {
      const __m256d diff = _mm256_andnot_pd(sign, _mm256_sub_pd(vp, _mm256_loadu_pd(t + j)));
      const __m256d delta = _mm256_div_pd(diff, vrange);
      const __m256d within = _mm256_cmp_pd(delta, vtheta, _CMP_LE_OQ);
      _mm256_storeu_pd(out + j, _mm256_blendv_pd(one, delta, within));
    }
    for (; j < n; ++j) {
      const double delta = std::fabs(p - t[j]) / range;
      out[j] = delta <= theta ? delta : 1.0;
    }
  } else {
    const __m256d zero = _mm256_setzero_pd();
    for (; j + kLanes <= n; j += kLanes) {
      const __m256d eq = _mm256_cmp_pd(vp, _mm256_loadu_pd(t + j), _CMP_EQ_OQ);
      _mm256_storeu_pd(out + j, _mm256_blendv_pd(one, zero, eq));
    }
    for (; j < n; ++j) out[j] = p == t[j] ? 0.0 : 1.0;
  }
}

void erp_row(const double* prev, const double* sub, double lambda, double* cur, uint8_t* dir, std::size_t n) {
  const __m256d vlambda = _mm256_set1_pd(lambda);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d diag = _mm256_add_pd(_mm256_loadu_pd(prev + j), _mm256_loadu_pd(sub + j));
    const __m256d vert = _mm256_add_pd(_mm256_loadu_pd(prev + j + 1), vlambda);
    const __m256d take_diag = _mm256_cmp_pd(diag, vert, _CMP_LE_OQ);
    _mm256_storeu_pd(cur + j + 1, _mm256_blendv_pd(vert, diag, take_diag));
    store_dirs(dir + j + 1, _mm256_movemask_pd(take_diag));
  }
  for (; j < n; ++j) {
    const double diag = prev[j] + sub[j];
    const double vert = prev[j + 1] + lambda;
    if (diag <= vert) {
      cur[j + 1] = diag;
      dir[j + 1] = kDiagonal;
    } else {
      cur[j + 1] = vert;
      dir[j + 1] = kInsert;
    }
  }
}

void dtw_row(const double* prev, double* cur, uint8_t* dir, std::size_t n) {
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d diag = _mm256_loadu_pd(prev + j);
    const __m256d vert = _mm256_loadu_pd(prev + j + 1);
    const __m256d take_diag = _mm256_cmp_pd(diag, vert, _CMP_LE_OQ);
    _mm256_storeu_pd(cur + j + 1, _mm256_blendv_pd(vert, diag, take_diag));
    store_dirs(dir + j + 1, _mm256_movemask_pd(take_diag));
  }
  for (; j < n; ++j) {
    if (prev[j] <= prev[j + 1]) {
      cur[j + 1] = prev[j];
      dir[j + 1] = kDiagonal;
    } else {
      cur[j + 1] = prev[j + 1];
      dir[j + 1] = kInsert;
    }
  }
}

std::size_t assignment_relax(const double* cost_row, double u_row, const double* v, double* minv, int32_t* way,
                             const uint8_t* used, int32_t from, std::size_t m, double* delta) {
  const double inf = std::numeric_limits<double>::infinity();
  const __m256d vinf = _mm256_set1_pd(inf);
  const __m256d vu = _mm256_set1_pd(u_row);
  __m256d vbest = vinf;
  std::size_t j = 0;
  for (; j + kLanes <= m; j += kLanes) {
    uint32_t used4 = 0;
    std::memcpy(&used4, used + j, 4);
    const __m256i used64 = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(static_cast<int>(used4)));
    const __m256d free_lane = _mm256_castsi256_pd(_mm256_cmpeq_epi64(used64, _mm256_setzero_si256()));

    const __m256d reduced = _mm256_sub_pd(_mm256_sub_pd(_mm256_loadu_pd(cost_row + j), vu), _mm256_loadu_pd(v + j));
    const __m256d old = _mm256_loadu_pd(minv + j);
    const __m256d improve = _mm256_and_pd(_mm256_cmp_pd(reduced, old, _CMP_LT_OQ), free_lane);
    const __m256d updated = _mm256_blendv_pd(old, reduced, improve);
    _mm256_storeu_pd(minv + j, updated);

    const int bits = _mm256_movemask_pd(improve);
    if (bits) {
      for (std::size_t k = 0; k < kLanes; ++k) {
        if (bits & (1 << k)) way[j + k] = from;
      }
    }
    vbest = _mm256_min_pd(vbest, _mm256_blendv_pd(vinf, updated, free_lane));
  }

  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, vbest);
  double best = inf;
  for (double x : lanes) best = x < best ? x : best;

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

constexpr KernelTable kAvx2{"avx2", substitution_row, erp_row, dtw_row, assignment_relax};

}  // namespace

const KernelTable* avx2() {
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &kAvx2 : nullptr;
}

}  // namespace ecs::kernels

#else

namespace ecs::kernels {
const KernelTable* avx2() { return nullptr; }
}  // namespace ecs::kernels

#endif
