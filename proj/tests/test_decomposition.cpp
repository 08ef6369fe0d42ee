#include <gtest/gtest.h>

#include <random>

#include "ecs/decomposition.hpp"
#include "ecs/errors.hpp"

using namespace ecs;

namespace {

TimeSeries series(const std::string& label, const std::vector<double>& v) {
  TimeSeries s;
  s.label = label;
  for (std::size_t i = 0; i < v.size(); ++i) s.points.push_back({std::to_string(i), v[i]});
  return s;
}

ChartTable chart(std::vector<TimeSeries> s) {
  ChartTable t;
  t.chart_id = "c";
  t.series = std::move(s);
  return t;
}

Decomposition run(const ChartTable& gt, const ChartTable* pred, const AlignmentParams& params = {}) {
  const auto matches = pred ? match_series(gt.series, pred->series) : match_series(gt.series, {});
  AlignmentMap alignments;
  for (const auto& m : matches) {
    if (m.kind != MatchKind::Paired) continue;
    alignments.emplace(*m.gt_index, ecs_align(pred->series[*m.pred_index], gt.series[*m.gt_index], params).alignment);
  }
  return decompose_chart(gt, pred, matches, alignments, params);
}

}  // namespace

TEST(Decomposition, PerfectChart) {
  const auto gt = chart({series("cases", {1, 2, 3})});
  const auto d = run(gt, &gt);
  EXPECT_EQ(d.ecs, 1.0);
  EXPECT_EQ(d.sum(), 1.0);
}

TEST(Decomposition, NoData) {
  const auto gt = chart({series("cases", {1, 2, 3})});
  EXPECT_EQ(run(gt, nullptr).no_data_extracted, 1.0);
  ChartTable empty = chart({series("cases", {})});
  EXPECT_EQ(run(gt, &empty).no_data_extracted, 1.0);
}

TEST(Decomposition, LabelMismatchVersusMissedSeries) {
  const auto gt = chart({series("cases", {1, 2}), series("deaths", {0, 1})});
  const auto renamed = chart({series("cases", {1, 2}), series("fatalities", {0, 1})});
  const auto d = run(gt, &renamed);
  EXPECT_EQ(d.ecs, 0.5);
  EXPECT_EQ(d.label_mismatch, 0.5);
  EXPECT_EQ(d.missed_series, 0.0);

  const auto dropped = chart({series("cases", {1, 2})});
  const auto e = run(gt, &dropped);
  EXPECT_EQ(e.missed_series, 0.5);
  EXPECT_EQ(e.label_mismatch, 0.0);
}

TEST(Decomposition, PointLevelShares) {
  const auto gt = chart({series("cases", {0, 10, 20, 30})});
  const auto pred = chart({series("cases", {0, 10, 20, 30, 99})});  // one surplus point
  const auto d = run(gt, &pred);
  EXPECT_DOUBLE_EQ(d.ecs, 0.8);
  EXPECT_DOUBLE_EQ(d.surplus_datapoints, 0.2);
  const auto shorter = chart({series("cases", {0, 10})});
  const auto e = run(gt, &shorter);
  EXPECT_DOUBLE_EQ(e.missed_datapoints, 0.5);
  const auto off = chart({series("cases", {0, 10, 20.15, 30})});  // 0.15 / 30 = 0.005
  const auto f = run(gt, &off);
  EXPECT_NEAR(f.numerical_error, 0.00125, 1e-12);
  EXPECT_NEAR(f.sum(), 1.0, 1e-12);
}

TEST(Decomposition, ClampedLossesAreRescaled) {
  const auto gt = chart({series("cases", {0, 1, 2, 3})});
  const auto pred = chart({series("cases", {50})});
  const auto d = run(gt, &pred, {0.01, 4.0});
  EXPECT_EQ(d.ecs, 0.0);
  EXPECT_NEAR(d.sum(), 1.0, 1e-12);
  for (std::size_t f = 0; f < std::size(kDecompositionFields); ++f) EXPECT_GE(field(d, f), 0.0);
}

TEST(Decomposition, MissingAlignmentThrows) {
  const auto gt = chart({series("cases", {1})});
  const auto matches = match_series(gt.series, gt.series);
  try {
    decompose_chart(gt, &gt, matches, {}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingAlignment);
  }
}

TEST(Decomposition, RandomChartsSumToOne) {
  std::mt19937_64 rng(61);
  const char* labels[] = {"cases", "deaths", "tests", "icu", "hosp"};
  for (int iter = 0; iter < 300; ++iter) {
    std::vector<TimeSeries> g, p;
    for (std::size_t s = 1 + rng() % 3; s > 0; --s) {
      std::vector<double> v(1 + rng() % 8);
      for (auto& x : v) x = static_cast<double>(rng() % 50);
      g.push_back(series(labels[rng() % 5], v));
    }
    for (std::size_t s = rng() % 4; s > 0; --s) {
      std::vector<double> v(rng() % 8);
      for (auto& x : v) x = static_cast<double>(rng() % 50);
      p.push_back(series(labels[rng() % 5], v));
    }
    const auto gt = chart(g), pred = chart(p);
    const AlignmentParams params{0.01, 0.25 * static_cast<double>(1 + rng() % 16)};
    const auto d = run(gt, &pred, params);
    EXPECT_NEAR(d.sum(), 1.0, 1e-9);
  }
}

TEST(Aggregate, GroupsAndUnknownTags) {
  Decomposition a, b, c;
  a.ecs = 1.0;
  b.ecs = 0.5;
  b.missed_series = 0.5;
  c.no_data_extracted = 1.0;
  std::vector<std::string> warnings;
  const auto groups = aggregate_decompositions({a, b, c}, {{{"chart_type", "bar"}}, {{"chart_type", "bar"}}, {}},
                                               {"chart_type", "colour"}, &warnings);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_EQ(groups.count("colour"), 0u);
  const auto& bar = groups.at("chart_type").at("bar");
  EXPECT_EQ(bar.count, 2u);
  EXPECT_EQ(bar.mean.ecs, 0.75);
  EXPECT_EQ(groups.at("chart_type").at(kUnknownTagValue).mean.no_data_extracted, 1.0);
  EXPECT_THROW(aggregate_decompositions({a}, {}, {"set"}), Error);
}

TEST(OrderedMean, Basics) {
  EXPECT_EQ(ordered_mean({}), 0.0);
  EXPECT_EQ(ordered_mean({1.0, 0.0}), 0.5);
}
