#pragma once
// Brute-force reference implementations. They share no code with the library
// and favour obviousness over speed; only use them on small inputs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline double sub_cost(double p, double t, double range, double theta) {
  if (range == 0.0) return p == t ? 0.0 : 1.0;
  const double d = std::fabs(p - t) / range;
  return d <= theta ? d : 1.0;
}

inline double range_of(const std::vector<double>& t) {
  if (t.empty()) return 0.0;
  return *std::max_element(t.begin(), t.end()) - *std::min_element(t.begin(), t.end());
}

// One monotone edit path. 'M' consumes p[i] and t[j], 'I' consumes p[i],
// 'D' consumes t[j].
struct EditPath {
  std::string moves;
  double cost = 0.0;
};

// Every monotone edit path from (0,0) to (|p|,|t|), costs summed in path order.
inline std::vector<EditPath> all_erp_paths(const std::vector<double>& p, const std::vector<double>& t, double range,
                                           double theta, double lambda) {
  std::vector<EditPath> out;
  std::string moves;
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
    if (i == p.size() && j == t.size()) {
      out.push_back({moves, acc});
      return;
    }
    if (i < p.size() && j < t.size()) {
      moves.push_back('M');
      walk(i + 1, j + 1, acc + sub_cost(p[i], t[j], range, theta));
      moves.pop_back();
    }
    if (i < p.size()) {
      moves.push_back('I');
      walk(i + 1, j, acc + lambda);
      moves.pop_back();
    }
    if (j < t.size()) {
      moves.push_back('D');
      walk(i, j + 1, acc + lambda);
      moves.pop_back();
    }
  };
  walk(0, 0, 0.0);
  return out;
}

inline double erp_cost(const std::vector<double>& p, const std::vector<double>& t, double theta, double lambda) {
  const auto paths = all_erp_paths(p, t, range_of(t), theta, lambda);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& path : paths) best = std::min(best, path.cost);
  return best;
}

// Minimum over all warping paths from (0,0) to (|p|-1,|t|-1), every visited
// cell paying its substitution cost. Requires non-empty inputs.
inline double dtw_cost(const std::vector<double>& p, const std::vector<double>& t, double theta) {
  const double range = range_of(t);
  double best = std::numeric_limits<double>::infinity();
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
    const double here = acc + sub_cost(p[i], t[j], range, theta);
    if (i + 1 == p.size() && j + 1 == t.size()) {
      best = std::min(best, here);
      return;
    }
    if (i + 1 < p.size() && j + 1 < t.size()) walk(i + 1, j + 1, here);
    if (i + 1 < p.size()) walk(i + 1, j, here);
    if (j + 1 < t.size()) walk(i, j + 1, here);
  };
  walk(0, 0, 0.0);
  return best;
}

// Plain Wagner-Fischer over code units of any sequence type.
template <typename Seq>
std::size_t levenshtein(const Seq& a, const Seq& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

// Maximum total over one-to-one assignments using only entries > 0, by
// enumerating permutations of the padded square matrix.
inline double max_assignment(const std::vector<double>& w, std::size_t rows, std::size_t cols) {
  const std::size_t n = std::max(rows, cols);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = 0.0;
  do {
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (perm[r] < cols && w[r * cols + perm[r]] > 0.0) total += w[r * cols + perm[r]];
    }
    best = std::max(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Rank of x[i] = 1 + (#smaller) + (#equal - 1) / 2.
inline std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t smaller = 0, equal = 0;
    for (double v : x) {
      if (v < x[i]) ++smaller;
      if (v == x[i]) ++equal;
    }
    r[i] = 1.0 + static_cast<double>(smaller) + (static_cast<double>(equal) - 1.0) / 2.0;
  }
  return r;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const long double n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

}  // namespace oracle
