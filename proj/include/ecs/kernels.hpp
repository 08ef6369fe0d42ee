#pragma once

// Data-parallel inner loops of the alignment and assignment solvers.
//
// Every kernel has a scalar reference implementation; SIMD variants (AVX2 on
// x86-64, NEON on AArch64) are selected at runtime and must produce bit-identical
// outputs, including the direction codes used for traceback. Only IEEE
// operations with a single correctly-rounded result (add, sub, div, abs, min,
// compare) appear in these loops, and the project builds with
// -ffp-contract=off, so lane-wise and scalar evaluation round the same way.

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace ecs::kernels {

// Traceback codes; the numeric order is the tie-break preference.
enum Step : uint8_t {
  kDiagonal = 0,  // match (i-1, j-1)
  kDelete = 1,    // advance j only: ground-truth point left unmatched
  kInsert = 2,    // advance i only: surplus predicted point
};

struct KernelTable {
  std::string_view name;

  // out[j] = D_theta(p, t[j]) for j < n. With range > 0, delta = |p - t[j]| / range
  // and the result is delta when delta <= theta, else 1. With range == 0 the
  // result is 0 on exact equality, else 1.
  void (*substitution_row)(double p, const double* t, std::size_t n, double range, double theta, double* out);

  // ERP row relaxation without the in-row (delete) dependency. For j < n:
  //   diag = prev[j] + sub[j], vert = prev[j + 1] + lambda
  //   cur[j + 1] = min(diag, vert), dir[j + 1] = diag <= vert ? kDiagonal : kInsert
  void (*erp_row)(const double* prev, const double* sub, double lambda, double* cur, uint8_t* dir, std::size_t n);

  // DTW row relaxation, same layout, no gap charge:
  //   cur[j + 1] = min(prev[j], prev[j + 1]), dir = prev[j] <= prev[j + 1] ? kDiagonal : kInsert
  void (*dtw_row)(const double* prev, double* cur, uint8_t* dir, std::size_t n);

  // One Dijkstra relaxation of the shortest-augmenting-path assignment solver
  // over m columns. For each column j with used[j] == 0:
  //   reduced = (cost_row[j] - u_row) - v[j]
  //   if reduced < minv[j]: minv[j] = reduced, way[j] = from
  // Returns the first free column whose minv is minimal and stores that minimum
  // in *delta. Returns m when no column is free.
  std::size_t (*assignment_relax)(const double* cost_row, double u_row, const double* v, double* minv,
                                  int32_t* way, const uint8_t* used, int32_t from, std::size_t m, double* delta);
};

const KernelTable& scalar();
// nullptr when not compiled in or not supported by the running CPU.
const KernelTable* avx2();
const KernelTable* neon();

// Best available table. ECS_KERNELS=scalar|avx2|neon in the environment forces
// a choice (falls back to scalar when the requested variant is unavailable).
const KernelTable& active();

// Every table usable on this machine, scalar first. Equivalence tests iterate this.
std::vector<const KernelTable*> available();

}  // namespace ecs::kernels
