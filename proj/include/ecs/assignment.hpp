#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ecs/kernels.hpp"

namespace ecs {

struct Assignment {
  std::vector<int> row_to_col;  // -1 when the row is left unassigned
  double total = 0.0;
};

// Exact maximum-weight one-to-one assignment on a dense rows x cols matrix
// (row-major). Entries <= 0 are treated as absent edges and never assigned.
// Shortest-augmenting-path Hungarian method, O(min^2 * max).
Assignment max_weight_assignment(std::span<const double> weights, std::size_t rows, std::size_t cols,
                                 const kernels::KernelTable& kernels = kernels::active());

struct WeightedEdge {
  uint32_t row;
  uint32_t col;
  double weight;
};

// Same optimum over a sparse candidate set: the bipartite graph of positive
// edges is split into connected components and each is solved densely.
Assignment max_weight_assignment_sparse(std::size_t rows, std::size_t cols, std::span<const WeightedEdge> edges,
                                        const kernels::KernelTable& kernels = kernels::active());

}  // namespace ecs
