#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <unistd.h>

#include "ecs/data_model.hpp"
#include "ecs/errors.hpp"

using namespace ecs;

namespace {

ChartTable tsv(std::string_view s, bool lenient = false) { return parse_table(s, {TableFormat::Tsv, lenient}); }
ChartTable csv(std::string_view s, bool lenient = false) { return parse_table(s, {TableFormat::Csv, lenient}); }

template <typename Fn>
ErrorKind kind_of(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::Io;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("ecs_dm_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  void write(const std::string& name, const std::string& content) const {
    std::ofstream(path / name, std::ios::binary) << content;
  }
};

}  // namespace

TEST(ParseTable, TsvBasic) {
  const auto t = tsv("date\tCases\tDeaths\n2020-01-01\t5\t1\n2020-01-02\t7\tnan\n");
  ASSERT_EQ(t.series.size(), 2u);
  EXPECT_EQ(t.series[0].label, "Cases");
  EXPECT_EQ(t.series[1].label, "Deaths");
  EXPECT_EQ(t.row_count(), 2u);
  EXPECT_EQ(t.series[0].points[1].x_label, "2020-01-02");
  EXPECT_EQ(*t.series[0].points[1].value, 7.0);
  EXPECT_FALSE(t.series[1].points[1].value.has_value());
  EXPECT_EQ(t.series[1].present_count(), 1u);
}

TEST(ParseTable, MissingMarkersAnyCase) {
  const auto t = tsv("x\ta\n1\tNaN\n2\tNA\n3\t\n4\tnan\n");
  EXPECT_EQ(t.row_count(), 4u);
  EXPECT_EQ(t.series[0].present_count(), 0u);
}

TEST(ParseTable, SlashNaIsNotAMarker) {
  try {
    tsv("x\ta\n1\tn/a\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonNumericCell);
    EXPECT_EQ(e.row(), 1u);
    EXPECT_EQ(e.col(), 2u);
  }
}

TEST(ParseTable, NumberSpellings) {
  EXPECT_EQ(*parse_cell("1,234", 1, 2), 1234.0);
  EXPECT_EQ(*parse_cell("12.5%", 1, 2), 12.5);
  EXPECT_EQ(*parse_cell("+3", 1, 2), 3.0);
  EXPECT_EQ(*parse_cell("-0.5", 1, 2), -0.5);
  EXPECT_EQ(*parse_cell(".25", 1, 2), 0.25);
  EXPECT_EQ(*parse_cell("1e3", 1, 2), 1000.0);
  EXPECT_FALSE(parse_cell("  ", 1, 2));
  for (const char* bad : {"inf", "-inf", "abc", "1.2.3", "%", "1e999", "12 cases"}) {
    EXPECT_THROW(parse_cell(bad, 1, 2), ParseError) << bad;
  }
}

TEST(ParseTable, ErrorsLocateTheCell) {
  try {
    tsv("x\ta\tb\n1\t2\t3\n2\t4\toops\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.col(), 3u);
  }
}

TEST(ParseTable, StructuralErrors) {
  EXPECT_EQ(kind_of([] { tsv("x\ta\t\n1\t2\t3\n"); }), ErrorKind::MalformedHeader);
  EXPECT_EQ(kind_of([] { tsv("x\n1\n"); }), ErrorKind::MalformedHeader);
  EXPECT_EQ(kind_of([] { tsv("x\ta\n"); }), ErrorKind::EmptyTable);
  EXPECT_EQ(kind_of([] { tsv(""); }), ErrorKind::EmptyTable);
  EXPECT_EQ(kind_of([] { tsv("x\ta\tb\n1\t2\n"); }), ErrorKind::RaggedRow);
}

TEST(ParseTable, LenientPadsRaggedRowsAndSkipsFences) {
  const auto t = tsv("```tsv\nx\ta\tb\n1\t2\n2\t3\t4\t5\n```\n", true);
  ASSERT_EQ(t.series.size(), 2u);
  EXPECT_EQ(t.row_count(), 2u);
  EXPECT_FALSE(t.series[1].points[0].value);
  EXPECT_EQ(*t.series[1].points[1].value, 4.0);
  EXPECT_EQ(t.warnings.size(), 2u);
}

TEST(ParseTable, BomCrlfAndBlankLines) {
  const auto t = tsv("\xEF\xBB\xBFx\ta\r\n\r\n1\t2\r\n\n2\t3\r\n");
  EXPECT_EQ(t.row_count(), 2u);
  EXPECT_EQ(t.series[0].label, "a");
}

TEST(ParseTable, CsvQuoting) {
  const auto t = csv("date,\"Cases, confirmed\",\"He said \"\"hi\"\"\"\n\"Jan 1, 2020\",\"1,200\",3\n");
  ASSERT_EQ(t.series.size(), 2u);
  EXPECT_EQ(t.series[0].label, "Cases, confirmed");
  EXPECT_EQ(t.series[1].label, "He said \"hi\"");
  EXPECT_EQ(t.series[0].points[0].x_label, "Jan 1, 2020");
  EXPECT_EQ(*t.series[0].points[0].value, 1200.0);
}

TEST(ParseTable, CsvEmbeddedNewline) {
  const auto t = csv("x,\"two\nlines\"\n1,2\n");
  EXPECT_EQ(t.series[0].label, "two\nlines");
  EXPECT_EQ(t.row_count(), 1u);
}

TEST(ParseTable, NoDataWhenEveryCellMissing) {
  EXPECT_TRUE(tsv("x\ta\n1\tnan\n2\t\n").has_no_data());
  EXPECT_FALSE(tsv("x\ta\n1\tnan\n2\t0\n").has_no_data());
}

TEST(ParseTable, RoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> small(1, 6);
  std::uniform_real_distribution<double> value(-1e6, 1e6);
  std::bernoulli_distribution missing(0.2);
  for (int iter = 0; iter < 300; ++iter) {
    for (TableFormat fmt : {TableFormat::Tsv, TableFormat::Csv}) {
      ChartTable t;
      const int cols = small(rng), rows = small(rng);
      for (int c = 0; c < cols; ++c) {
        TimeSeries s;
        s.label = fmt == TableFormat::Csv ? "Series, \"" + std::to_string(c) + "\"" : "Series " + std::to_string(c);
        for (int r = 0; r < rows; ++r) {
          std::optional<double> v;
          if (!missing(rng)) v = value(rng);
          s.points.push_back(Point{"day " + std::to_string(r), v});
        }
        t.series.push_back(std::move(s));
      }
      const auto back = parse_table(serialize_table(t, fmt), {fmt, false});
      EXPECT_EQ(back, t);
    }
  }
}

TEST(LoadCorpus, ReadsSortedAndSkipsOthers) {
  TempDir d;
  d.write("b.tsv", "x\ta\n1\t2\n");
  d.write("a.TSV", "x\ta\n1\t3\n");
  d.write(".hidden.tsv", "garbage");
  d.write("notes.txt", "ignored");
  const auto c = load_corpus(d.path, TableFormat::Tsv, CorpusRole::GroundTruth);
  ASSERT_EQ(c.charts.size(), 2u);
  EXPECT_EQ(c.charts.begin()->first, "a");
  EXPECT_EQ(c.charts.at("a").chart_id, "a");
}

TEST(LoadCorpus, GroundTruthFailureAborts) {
  TempDir d;
  d.write("a.tsv", "x\ta\n1\tbad\n");
  EXPECT_EQ(kind_of([&] { load_corpus(d.path, TableFormat::Tsv, CorpusRole::GroundTruth); }),
            ErrorKind::GroundTruthParseFailure);
}

TEST(LoadCorpus, PredictionFailureIsRecorded) {
  TempDir d;
  d.write("a.tsv", "x\ta\n1\tbad\n");
  d.write("b.tsv", "x\ta\n1\t1\n");
  const auto c = load_corpus(d.path, TableFormat::Tsv, CorpusRole::Predictions);
  EXPECT_EQ(c.charts.size(), 1u);
  ASSERT_EQ(c.failures.size(), 1u);
  EXPECT_NE(c.failures.at("a").message.find("NonNumericCell"), std::string::npos);
  EXPECT_TRUE(c.contains("a"));
}

TEST(LoadCorpus, EmptyGroundTruthDirectory) {
  TempDir d;
  EXPECT_EQ(kind_of([&] { load_corpus(d.path, TableFormat::Tsv, CorpusRole::GroundTruth); }), ErrorKind::EmptyCorpus);
  EXPECT_EQ(load_corpus(d.path, TableFormat::Tsv, CorpusRole::Predictions).size(), 0u);
}

TEST(LoadCorpus, DuplicateIdAcrossExtensionCase) {
  TempDir d;
  d.write("a.tsv", "x\ta\n1\t2\n");
  d.write("a.Tsv", "x\ta\n1\t2\n");
  EXPECT_EQ(kind_of([&] { load_corpus(d.path, TableFormat::Tsv, CorpusRole::GroundTruth); }),
            ErrorKind::DuplicateChartId);
}

TEST(Metadata, JsonAndCsvAgree) {
  const auto j = parse_metadata_json(R"({"c1": {"chart_type": "bar", "cumulative": true, "set": "s1",
      "label_class_overrides": {"Rate of X": "count_like"}}})");
  const auto c = parse_metadata_csv(
      "chart_id,chart_type,cumulative,set,label_class_overrides\nc1,bar,yes,s1,Rate of X=count_like\n");
  ASSERT_EQ(j.count("c1"), 1u);
  EXPECT_EQ(j.at("c1").tags, c.at("c1").tags);
  EXPECT_EQ(j.at("c1").label_class_overrides, c.at("c1").label_class_overrides);
  EXPECT_EQ(j.at("c1").tags.at("cumulative"), "yes");
}

TEST(Metadata, Errors) {
  EXPECT_EQ(kind_of([] { parse_metadata_json("[1,2]"); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { parse_metadata_json("{"); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind_of([] { parse_metadata_csv("id,chart_type\n1,bar\n"); }), ErrorKind::InvalidArgument);
}

TEST(Metadata, ApplyTagsCharts) {
  Corpus corpus;
  corpus.charts["c1"] = tsv("x\ta\n1\t2\n");
  MetadataSidecar side;
  side["c1"].tags["source"] = "cdc";
  apply_metadata(corpus, side);
  EXPECT_EQ(corpus.charts["c1"].meta.at("source"), "cdc");
}
