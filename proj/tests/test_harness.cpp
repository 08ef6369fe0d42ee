#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "ecs/errors.hpp"
#include "ecs/harness.hpp"
#include "ecs/report.hpp"
#include "ecs/synthetic.hpp"

using namespace ecs;

namespace {

TimeSeries series(const std::string& label, const std::vector<std::optional<double>>& v) {
  TimeSeries s;
  s.label = label;
  for (std::size_t i = 0; i < v.size(); ++i) s.points.push_back({iso_date(static_cast<int>(i)), v[i]});
  return s;
}

ChartTable chart(const std::string& id, std::vector<TimeSeries> s, StratumTags tags = {}) {
  ChartTable t;
  t.chart_id = id;
  t.series = std::move(s);
  t.meta = std::move(tags);
  return t;
}

Corpus corpus(std::vector<ChartTable> charts) {
  Corpus c;
  for (auto& t : charts) c.charts.emplace(t.chart_id, std::move(t));
  return c;
}

EvaluationOptions serial() {
  EvaluationOptions o;
  o.threads = 1;
  return o;
}

}  // namespace

TEST(MetricSet, ParseAndPrint) {
  const auto m = MetricSet::parse("ECS, scrm");
  EXPECT_TRUE(m.ecs);
  EXPECT_FALSE(m.dtw);
  EXPECT_FALSE(m.rms);
  EXPECT_TRUE(m.scrm);
  EXPECT_EQ(m.to_string(), "ecs,scrm");
  EXPECT_THROW(MetricSet::parse("ecs,bleu"), Error);
}

TEST(Options, Validation) {
  EvaluationOptions o;
  o.nls_threshold = 1.0;
  EXPECT_THROW(validate(o), Error);
  o.nls_threshold = 0.0;
  EXPECT_NO_THROW(validate(o));
}

TEST(ScoreChart, PerfectChartScoresOneEverywhere) {
  const auto gt = chart("c", {series("Cases", {1, 2, 3}), series("Deaths", {0, 1, 0})}, {{"chart_type", "bar"}});
  const auto s = score_chart(gt, &gt, PredictionStatus::Ok, serial());
  EXPECT_EQ(s.ecs_chart, 1.0);
  EXPECT_EQ(s.dtw_chart, 1.0);
  EXPECT_EQ(s.rms.f1, 1.0);
  EXPECT_EQ(s.scrm.f1, 1.0);
  EXPECT_EQ(s.decomposition.ecs, 1.0);
  EXPECT_EQ(s.chart_type, ChartType::Bar);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(ScoreChart, UnmatchedSeriesCountAsZero) {
  const auto gt = chart("c", {series("Cases", {1, 2, 3}), series("Deaths", {0, 1, 0})});
  const auto pred = chart("c", {series("cases", {1, 2, 3}), series("Tests", {5, 5, 5})});
  const auto s = score_chart(gt, &pred, PredictionStatus::Ok, serial());
  ASSERT_EQ(s.per_series.size(), 2u);
  EXPECT_EQ(s.per_series[1].kind, MatchKind::GtUnmatched);
  EXPECT_EQ(s.ecs_chart, 0.5);
  EXPECT_EQ(s.ecs_chart, s.decomposition.ecs);
  EXPECT_EQ(s.decomposition.label_mismatch, 0.5);
  EXPECT_EQ(s.unmatched_predictions, std::vector<std::string>{"Tests"});
}

TEST(ScoreChart, MissingPredictionIsNoData) {
  const auto gt = chart("c", {series("Cases", {1, 2, 3})});
  const auto s = score_chart(gt, nullptr, PredictionStatus::Missing, serial());
  EXPECT_EQ(s.status, PredictionStatus::Missing);
  EXPECT_EQ(s.ecs_chart, 0.0);
  EXPECT_EQ(s.decomposition.no_data_extracted, 1.0);
  EXPECT_EQ(s.rms.f1, 0.0);

  const auto empty = chart("c", {series("Cases", {std::nullopt, std::nullopt})});
  const auto e = score_chart(gt, &empty, PredictionStatus::Ok, serial());
  EXPECT_EQ(e.status, PredictionStatus::Empty);
  EXPECT_EQ(e.decomposition.no_data_extracted, 1.0);
}

TEST(ScoreChart, EmptyGroundTruthSeriesAborts) {
  const auto gt = chart("c", {series("Cases", {std::nullopt})});
  try {
    score_chart(gt, &gt, PredictionStatus::Ok, serial());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyGroundTruth);
  }
}

TEST(ScoreChart, UnknownChartTypeWarns) {
  const auto gt = chart("c", {series("Cases", {1})}, {{"chart_type", "pie"}});
  const auto s = score_chart(gt, &gt, PredictionStatus::Ok, serial());
  EXPECT_EQ(s.chart_type, ChartType::Line);
  EXPECT_EQ(s.warnings.size(), 1u);
}

TEST(Evaluate, CorpusMeanIsUnweighted) {
  const auto gt = corpus({chart("a", {series("Cases", {1, 2, 3})}), chart("b", {series("Cases", {1, 2, 3})})});
  const auto pred = corpus({chart("a", {series("Cases", {1, 2, 3})})});
  const auto e = evaluate_corpus(gt, pred, "p", serial());
  EXPECT_EQ(e.summary.ecs, 0.5);
  EXPECT_EQ(e.charts[1].status, PredictionStatus::Missing);
  EXPECT_EQ(e.charts[1].decomposition.no_data_extracted, 1.0);
}

TEST(Evaluate, ExtraPredictionsWarnAndFailuresAreRecorded) {
  const auto gt = corpus({chart("a", {series("Cases", {1, 2, 3})})});
  auto pred = corpus({chart("z", {series("Cases", {1})})});
  pred.failures.emplace("a", ParseFailure{"a", "a.tsv", "bad"});
  const auto e = evaluate_corpus(gt, pred, "p", serial());
  EXPECT_EQ(e.charts[0].status, PredictionStatus::ParseFailed);
  ASSERT_EQ(e.warnings.size(), 1u);
  EXPECT_NE(e.warnings[0].find("'z'"), std::string::npos);
}

TEST(Evaluate, GroundTruthProblemsPropagate) {
  Corpus gt;
  EXPECT_THROW(evaluate_corpus(gt, gt, "p", serial()), Error);
  gt.failures.emplace("a", ParseFailure{"a", "a.tsv", "bad"});
  try {
    evaluate_corpus(gt, Corpus{}, "p", serial());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GroundTruthParseFailure);
  }
}

TEST(Evaluate, GroupMeansRecompose) {
  const auto suite = make_synthetic_suite(23, 5);
  const auto e = evaluate_corpus(suite.ground_truth, suite.predictions[2].second, "noise", serial());
  for (const auto& [tag, values] : e.groups) {
    double weighted = 0.0;
    std::size_t n = 0;
    for (const auto& [value, s] : values) {
      weighted += s.ecs * static_cast<double>(s.charts);
      n += s.charts;
    }
    EXPECT_EQ(n, 23u);
    EXPECT_NEAR(weighted / static_cast<double>(n), e.summary.ecs, 1e-9) << tag;
  }
}

TEST(Evaluate, ParallelMatchesSerial) {
  const auto suite = make_synthetic_suite(30, 9);
  auto par = serial();
  par.threads = 4;
  Report a, b;
  a.mode = b.mode = "evaluate";
  a.fixed_clock = b.fixed_clock = true;
  a.evaluations.push_back(evaluate_corpus(suite.ground_truth, suite.predictions[2].second, "noise", serial()));
  b.evaluations.push_back(evaluate_corpus(suite.ground_truth, suite.predictions[2].second, "noise", par));
  EXPECT_EQ(render_json(a), render_json(b));
}

TEST(Sweep, ShapeAndIdentity) {
  const auto gt = corpus({chart("a", {series("Cases", {1, 5, 3})}), chart("b", {series("Deaths", {0, 2})})});
  const std::vector<NamedCorpus> preds{{"same", &gt}};
  const auto rows = sweep(gt, preds, SweepGrid{}, serial());
  ASSERT_EQ(rows.size(), 16u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.ecs_by_corpus.at("same"), 1.0);
    EXPECT_EQ(r.spread, 0.0);
    if (r.parameter != "theta") {
      EXPECT_EQ(r.params.theta, kDefaultTheta);
    }
    if (r.parameter != "lambda") {
      EXPECT_EQ(r.params.lambda, kDefaultLambda);
    }
    if (r.parameter != "nls") {
      EXPECT_EQ(r.nls_threshold, kDefaultNlsThreshold);
    }
  }
}

TEST(Sweep, RankingTiesByName) {
  const auto gt = corpus({chart("a", {series("Cases", {1, 5, 3})})});
  const auto half = corpus({chart("a", {series("Cases", {1, 5})})});
  const std::vector<NamedCorpus> preds{{"z", &gt}, {"b", &half}, {"a", &gt}};
  SweepGrid grid;
  grid.theta = {0.01};
  grid.lambda.clear();
  grid.nls.clear();
  const auto rows = sweep(gt, preds, grid, serial());
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].ranking, (std::vector<std::string>{"a", "z", "b"}));
}

TEST(Agreement, StatsAndStrata) {
  std::vector<std::optional<double>> v10(10, 1.0), v50(50, 1.0), v200(200, 1.0);
  const auto a = corpus({chart("a", {series("x", v10)}), chart("b", {series("x", v50)}),
                         chart("c", {series("x", v200)})});
  const auto r = agreement(a, a, serial());
  EXPECT_EQ(r.overall.mean, 1.0);
  EXPECT_EQ(r.overall.median, 1.0);
  const auto& len = r.strata.at("series_length");
  EXPECT_EQ(len.at("<=20").n, 1u);
  EXPECT_EQ(len.at("21-100").n, 1u);
  EXPECT_EQ(len.at(">100").n, 1u);

  const auto other = corpus({chart("a", {series("x", v10)})});
  try {
    agreement(a, other, serial());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MismatchedCorpora);
  }
}

TEST(Agreement, MeanAndMedian) {
  EXPECT_EQ(median_of({0.8, 1.0}), 0.9);
  EXPECT_EQ(median_of({3, 1, 2}), 2.0);
  EXPECT_EQ(series_length_stratum(20), "<=20");
  EXPECT_EQ(series_length_stratum(21), "21-100");
  EXPECT_EQ(series_length_stratum(101), ">100");
}

TEST(Downstream, PerfectAndEmptyCorpora) {
  std::vector<ChartTable> charts;
  for (int i = 0; i < 4; ++i) {
    charts.push_back(chart("c" + std::to_string(i), {series("Reported cases", {0, 1, 4, 9 + i, 3})}));
  }
  const auto gt = corpus(charts);
  Corpus empty;
  auto opts = serial();
  opts.collect_downstream = true;
  const auto perfect = evaluate_corpus(gt, gt, "perfect", opts);
  const auto none = evaluate_corpus(gt, empty, "none", opts);
  const auto report = build_downstream({perfect, none});
  ASSERT_EQ(report.records.size(), 4u);
  for (const auto& r : report.records) {
    EXPECT_EQ(r.corpus, "perfect");
    EXPECT_EQ(*r.total_count_err, 0.0);
    EXPECT_DOUBLE_EQ(*r.growth_rate_fidelity, 1.0);
  }
  EXPECT_EQ(report.eligible.at(Statistic::TotalCount), 4u);

  const auto only_empty = build_downstream({none});
  EXPECT_TRUE(only_empty.records.empty());
  EXPECT_TRUE(only_empty.correlations.empty());
  EXPECT_EQ(only_empty.warnings.size(), 4u);
}

TEST(Report, JsonHasTopLevelSections) {
  const auto suite = make_synthetic_suite(3, 1);
  Report r;
  r.mode = "evaluate";
  r.fixed_clock = true;
  r.evaluations.push_back(evaluate_corpus(suite.ground_truth, suite.predictions[1].second, "shift", serial()));
  const auto j = to_json(r);
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"meta", "charts", "corpus", "groups", "downstream", "sweep"}));
  EXPECT_EQ(j["meta"]["generated_at"], kFixedTimestamp);
  EXPECT_EQ(j["meta"]["decisions"]["min_ascending_phase"], 3);
  EXPECT_EQ(j["charts"].size(), 3u);
  EXPECT_TRUE(j["sweep"].is_null());
}

TEST(Report, CsvSectionsAndDecomposeView) {
  const auto suite = make_synthetic_suite(3, 1);
  Report r;
  r.mode = "decompose";
  r.fixed_clock = true;
  r.evaluations.push_back(evaluate_corpus(suite.ground_truth, suite.predictions[3].second, "trunc", serial()));
  const auto sections = render_csv(r);
  std::vector<std::string> names;
  for (const auto& [n, text] : sections) names.push_back(n);
  EXPECT_EQ(names, (std::vector<std::string>{"meta", "charts", "corpus", "groups"}));
  EXPECT_EQ(sections[1].second.find("rms_f1"), std::string::npos);
  EXPECT_NE(sections[1].second.find("decomposition_missed_datapoints"), std::string::npos);
}

TEST(Report, FormatParsing) {
  EXPECT_EQ(parse_report_format("JSON"), ReportFormat::Json);
  EXPECT_THROW(parse_report_format("xml"), Error);
  EXPECT_NE(report_timestamp(false), kFixedTimestamp);
}

TEST(Synthetic, DatesAndDeterminism) {
  EXPECT_EQ(iso_date(0), "2020-03-01");
  EXPECT_EQ(iso_date(31), "2020-04-01");
  EXPECT_EQ(iso_date(306), "2021-01-01");
  const auto a = make_synthetic_suite(5, 3), b = make_synthetic_suite(5, 3);
  EXPECT_EQ(serialize_table(a.predictions[2].second.charts.begin()->second),
            serialize_table(b.predictions[2].second.charts.begin()->second));
  EXPECT_EQ(a.predictions.size(), 4u);
}

#ifdef ECS_EVAL_PATH
namespace {

struct Workspace {
  std::filesystem::path root;
  Workspace() {
    root = std::filesystem::temp_directory_path() / ("ecs_cli_" + std::to_string(::getpid()));
    std::filesystem::remove_all(root);
    write_corpus(root / "gt", make_synthetic_suite(6, 2).ground_truth, TableFormat::Tsv);
    const auto suite = make_synthetic_suite(6, 2);
    write_corpus(root / "noise", suite.predictions[2].second, TableFormat::Tsv);
  }
  ~Workspace() { std::filesystem::remove_all(root); }
  int run(const std::string& args) const {
    const std::string cmd = std::string(ECS_EVAL_PATH) + " " + args + " >" + (root / "stdout").string() + " 2>" +
                            (root / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string slurp(const std::string& name) const {
    std::ifstream in(root / name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

}  // namespace

TEST(Cli, ExitCodes) {
  Workspace w;
  const std::string gt = "--ground-truth " + (w.root / "gt").string();
  const std::string pred = " --predictions noise=" + (w.root / "noise").string();
  EXPECT_EQ(w.run("evaluate " + gt + pred + " --fixed-clock"), 0);
  EXPECT_NE(w.slurp("stdout").find("\"corpus\""), std::string::npos);
  EXPECT_EQ(w.run(""), 1);
  EXPECT_EQ(w.run("evaluate " + gt + pred + " --theta abc"), 1);
  EXPECT_EQ(w.run("evaluate " + gt + pred + " --metrics ecs,bleu"), 1);
  EXPECT_EQ(w.run("evaluate " + gt + " --predictions noise"), 1);
  EXPECT_EQ(w.run("evaluate --ground-truth " + (w.root / "missing").string() + pred), 2);
  std::ofstream(w.root / "gt" / "zz_bad.tsv") << "x\ta\n1\toops\n";
  EXPECT_EQ(w.run("evaluate " + gt + pred), 2);
}

TEST(Cli, FixedClockRunsAreByteIdentical) {
  Workspace w;
  const std::string args = "evaluate --ground-truth " + (w.root / "gt").string() + " --meta " +
                           (w.root / "gt" / "meta.json").string() + " --predictions noise=" +
                           (w.root / "noise").string() + " --fixed-clock --out ";
  ASSERT_EQ(w.run(args + (w.root / "a.json").string() + " --threads 1"), 0);
  ASSERT_EQ(w.run(args + (w.root / "b.json").string() + " --threads 3"), 0);
  EXPECT_EQ(w.slurp("a.json"), w.slurp("b.json"));
  EXPECT_NE(w.slurp("a.json").find("\"chart_type\": \"bar\""), std::string::npos);
}

TEST(Cli, CsvReportWritesOneFilePerSection) {
  Workspace w;
  ASSERT_EQ(w.run("downstream --ground-truth " + (w.root / "gt").string() + " --predictions noise=" +
                  (w.root / "noise").string() + " --report-format csv --out " + (w.root / "rep.csv").string()),
            0);
  for (const char* s : {"meta", "charts", "series", "corpus", "groups", "downstream", "correlations", "filters"}) {
    EXPECT_TRUE(std::filesystem::exists(w.root / ("rep_" + std::string(s) + ".csv"))) << s;
  }
}
#endif
