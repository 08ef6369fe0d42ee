#include <cmath>
#include <limits>

#include "ecs/kernels.hpp"

namespace ecs::kernels {

namespace {

void substitution_row(double p, const double* t, std::size_t n, double range, double theta, double* out) {
  if (range > 0.0) {
    for (std::size_t j = 0; j < n; ++j) {
      const double delta = std::fabs(p - t[j]) / range;
      out[j] = delta <= theta ? delta : 1.0;
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) out[j] = p == t[j] ? 0.0 : 1.0;
  }
}

void erp_row(const double* prev, const double* sub, double lambda, double* cur, uint8_t* dir, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
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
  for (std::size_t j = 0; j < n; ++j) {
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
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_j = m;
  for (std::size_t j = 0; j < m; ++j) {
    if (used[j]) continue;
    const double reduced = (cost_row[j] - u_row) - v[j];
    if (reduced < minv[j]) {
      minv[j] = reduced;
      way[j] = from;
    }
    if (best_j == m || minv[j] < best) {
      best = minv[j];
      best_j = j;
    }
  }
  *delta = best;
  return best_j;
}

constexpr KernelTable kScalar{"scalar", substitution_row, erp_row, dtw_row, assignment_relax};

}  // namespace

const KernelTable& scalar() { return kScalar; }

}  // namespace ecs::kernels
