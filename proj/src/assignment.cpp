#include "ecs/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace ecs {

namespace {

// Min-cost assignment of every row (n <= m) to a distinct column.
// Returns col index per row.
std::vector<int> solve_min_cost(const std::vector<double>& cost, std::size_t n, std::size_t m,
                                const kernels::KernelTable& kernels) {
  const double inf = std::numeric_limits<double>::infinity();
  // 1-based bookkeeping; column 0 is the virtual source.
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int32_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<uint8_t> used(m + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = static_cast<int32_t>(i);
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), uint8_t{0});
    do {
      used[j0] = 1;
      const auto i0 = static_cast<std::size_t>(p[j0]);
      double delta = inf;
      const std::size_t j = kernels.assignment_relax(&cost[(i0 - 1) * m], u[i0], v.data() + 1, minv.data() + 1,
                                                     way.data() + 1, used.data() + 1, static_cast<int32_t>(j0), m,
                                                     &delta);
      const std::size_t j1 = j + 1;
      for (std::size_t k = 0; k <= m; ++k) {
        if (used[k]) {
          u[static_cast<std::size_t>(p[k])] += delta;
          v[k] -= delta;
        } else {
          minv[k] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const auto j1 = static_cast<std::size_t>(way[j0]);
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[static_cast<std::size_t>(p[j]) - 1] = static_cast<int>(j) - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment max_weight_assignment(std::span<const double> weights, std::size_t rows, std::size_t cols,
                                 const kernels::KernelTable& kernels) {
  Assignment result;
  result.row_to_col.assign(rows, -1);
  if (rows == 0 || cols == 0) return result;

  const bool transpose = rows > cols;
  const std::size_t n = transpose ? cols : rows;
  const std::size_t m = transpose ? rows : cols;
  std::vector<double> cost(n * m);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double w = std::max(weights[r * cols + c], 0.0);
      if (transpose) {
        cost[c * m + r] = -w;
      } else {
        cost[r * m + c] = -w;
      }
    }
  }

  const auto assigned = solve_min_cost(cost, n, m, kernels);
  for (std::size_t a = 0; a < n; ++a) {
    const int b = assigned[a];
    if (b < 0) continue;
    const std::size_t r = transpose ? static_cast<std::size_t>(b) : a;
    const std::size_t c = transpose ? a : static_cast<std::size_t>(b);
    if (weights[r * cols + c] > 0.0) result.row_to_col[r] = static_cast<int>(c);
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (result.row_to_col[r] >= 0) result.total += weights[r * cols + static_cast<std::size_t>(result.row_to_col[r])];
  }
  return result;
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

Assignment max_weight_assignment_sparse(std::size_t rows, std::size_t cols, std::span<const WeightedEdge> edges,
                                        const kernels::KernelTable& kernels) {
  Assignment result;
  result.row_to_col.assign(rows, -1);

  DisjointSets sets(rows + cols);
  for (const auto& e : edges) {
    if (e.weight > 0.0) sets.unite(e.row, rows + e.col);
  }

  // Component root -> member rows / cols, in index order.
  std::vector<std::vector<uint32_t>> comp_rows(rows + cols), comp_cols(rows + cols);
  for (uint32_t r = 0; r < rows; ++r) comp_rows[sets.find(r)].push_back(r);
  for (uint32_t c = 0; c < cols; ++c) comp_cols[sets.find(rows + c)].push_back(c);

  std::vector<std::vector<const WeightedEdge*>> comp_edges(rows + cols);
  for (const auto& e : edges) {
    if (e.weight > 0.0) comp_edges[sets.find(e.row)].push_back(&e);
  }

  std::vector<uint32_t> local_row(rows), local_col(cols);
  for (std::size_t root = 0; root < rows + cols; ++root) {
    const auto& rs = comp_rows[root];
    const auto& cs = comp_cols[root];
    if (rs.empty() || cs.empty()) continue;
    for (uint32_t k = 0; k < rs.size(); ++k) local_row[rs[k]] = k;
    for (uint32_t k = 0; k < cs.size(); ++k) local_col[cs[k]] = k;

    std::vector<double> dense(rs.size() * cs.size(), 0.0);
    for (const auto* e : comp_edges[root]) {
      auto& cell = dense[local_row[e->row] * cs.size() + local_col[e->col]];
      cell = std::max(cell, e->weight);
    }
    const auto sub = max_weight_assignment(dense, rs.size(), cs.size(), kernels);
    for (std::size_t k = 0; k < rs.size(); ++k) {
      if (sub.row_to_col[k] >= 0) {
        result.row_to_col[rs[k]] = static_cast<int>(cs[static_cast<std::size_t>(sub.row_to_col[k])]);
      }
    }
    result.total += sub.total;
  }
  return result;
}

}  // namespace ecs
