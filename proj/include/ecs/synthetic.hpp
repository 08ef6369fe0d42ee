#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ecs/data_model.hpp"

namespace ecs {

// ISO date `offset` days after 2020-03-01.
std::string iso_date(int offset);

// Right-skewed epidemic curve of `n` rounded counts.
std::vector<double> gamma_epicurve(std::size_t n, std::uint64_t seed);

struct SyntheticSuite {
  Corpus ground_truth;
  // exact, shift, noise, truncation (in that order)
  std::vector<std::pair<std::string, Corpus>> predictions;
};

inline constexpr std::uint64_t kDefaultSyntheticSeed = 20200301;

// Single-series charts of 20..59 daily points with date x labels. Chart tags
// alternate bar/line and cumulative yes/no.
SyntheticSuite make_synthetic_suite(std::size_t charts = 40, std::uint64_t seed = kDefaultSyntheticSeed);

// Writes one table per chart plus a `meta.json` sidecar holding the tags.
void write_corpus(const std::filesystem::path& dir, const Corpus& corpus, TableFormat format);

}  // namespace ecs
