#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecs/data_model.hpp"
#include "ecs/errors.hpp"
#include "ecs/harness.hpp"
#include "ecs/report.hpp"
#include "ecs/synthetic.hpp"
#include "ecs/text.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitGroundTruth = 2;
constexpr int kExitInternal = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GroundTruthError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Args {
  std::string ground_truth;
  std::vector<std::string> predictions;
  std::string format = "tsv";
  double theta = ecs::kDefaultTheta;
  double lambda = ecs::kDefaultLambda;
  double nls_threshold = ecs::kDefaultNlsThreshold;
  std::string metrics = "ecs,dtw,rms,scrm";
  std::string meta;
  std::string out;
  std::string report_format = "json";
  std::string group_by = "chart_type,cumulative,set,source";
  bool fixed_clock = false;
  unsigned threads = 0;

  // synth
  std::string out_dir;
  std::size_t charts = 40;
  std::uint64_t seed = ecs::kDefaultSyntheticSeed;
};

void add_common(CLI::App* sub, Args& a, bool agreement) {
  sub->add_option("--ground-truth", a.ground_truth,
                  agreement ? "First annotation corpus (ground-truth role)" : "Ground-truth directory")
      ->required();
  sub->add_option("--predictions", a.predictions,
                  agreement ? "Second annotation corpus as name=dir" : "Prediction corpus as name=dir (repeatable)")
      ->required();
  sub->add_option("--format", a.format, "Table format")->check(CLI::IsMember({"tsv", "csv"}));
  sub->add_option("--theta", a.theta, "Value tolerance");
  sub->add_option("--lambda", a.lambda, "Gap penalty");
  sub->add_option("--nls-threshold", a.nls_threshold, "Series label matching threshold");
  sub->add_option("--metrics", a.metrics, "Comma-separated subset of ecs,dtw,rms,scrm");
  sub->add_option("--meta", a.meta, "Chart metadata sidecar (json or csv)");
  sub->add_option("--out", a.out, "Report path (stdout when omitted)");
  sub->add_option("--report-format", a.report_format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--group-by", a.group_by, "Comma-separated stratum tags");
  sub->add_flag("--fixed-clock", a.fixed_clock, "Use a fixed report timestamp");
  sub->add_option("--threads", a.threads, "Worker threads (0 = hardware concurrency, 1 = serial)");
}

std::vector<std::pair<std::string, std::string>> parse_named(const std::vector<std::string>& specs) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  for (const auto& spec : specs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw UsageError("--predictions expects name=dir, got '" + spec + "'");
    }
    auto name = spec.substr(0, eq);
    if (!seen.insert(name).second) throw UsageError("duplicate prediction corpus name '" + name + "'");
    out.emplace_back(std::move(name), spec.substr(eq + 1));
  }
  return out;
}

ecs::EvaluationOptions make_options(const Args& a) {
  ecs::EvaluationOptions o;
  o.params = ecs::AlignmentParams{a.theta, a.lambda};
  o.nls_threshold = a.nls_threshold;
  o.threads = a.threads;
  o.group_by.clear();
  for (const auto& tag : ecs::text::split(a.group_by, ',')) {
    const auto t = ecs::text::trim(tag);
    if (!t.empty()) o.group_by.emplace_back(t);
  }
  try {
    o.metrics = ecs::MetricSet::parse(a.metrics);
    ecs::validate(o);
  } catch (const ecs::Error& e) {
    throw UsageError(e.what());
  }
  return o;
}

ecs::Corpus load_ground_truth(const Args& a, ecs::TableFormat format, const std::optional<ecs::MetadataSidecar>& meta) {
  try {
    auto corpus = ecs::load_corpus(a.ground_truth, format, ecs::CorpusRole::GroundTruth);
    if (meta) ecs::apply_metadata(corpus, *meta);
    return corpus;
  } catch (const std::exception& e) {
    throw GroundTruthError(e.what());
  }
}

ecs::Corpus load_predictions(const std::string& dir, ecs::TableFormat format) {
  if (!std::filesystem::is_directory(dir)) throw UsageError("prediction directory '" + dir + "' does not exist");
  return ecs::load_corpus(dir, format, ecs::CorpusRole::Predictions);
}

int run(const std::string& mode, const Args& a) {
  const auto format = ecs::parse_format(a.format);
  const auto report_format = ecs::parse_report_format(a.report_format);
  const auto named = parse_named(a.predictions);
  ecs::Report report;
  report.mode = mode;
  report.options = make_options(a);
  report.fixed_clock = a.fixed_clock;
  report.ground_truth = a.ground_truth;
  report.corpora = named;

  std::optional<ecs::MetadataSidecar> meta;
  if (!a.meta.empty()) {
    try {
      meta = ecs::load_metadata(a.meta);
    } catch (const std::exception& e) {
      throw UsageError(std::string("cannot read metadata: ") + e.what());
    }
  }
  const auto gt = load_ground_truth(a, format, meta);

  std::vector<ecs::Corpus> preds;
  for (const auto& [name, dir] : named) {
    preds.push_back(load_predictions(dir, format));
    if (meta) ecs::apply_metadata(preds.back(), *meta);
  }

  auto guarded = [](auto fn) {
    try {
      return fn();
    } catch (const ecs::Error& e) {
      if (e.kind() == ecs::ErrorKind::EmptyGroundTruth || e.kind() == ecs::ErrorKind::GroundTruthParseFailure ||
          e.kind() == ecs::ErrorKind::MismatchedCorpora) {
        throw GroundTruthError(e.what());
      }
      throw;
    }
  };

  if (mode == "agreement") {
    if (preds.size() != 1) throw UsageError("agreement takes exactly one --predictions corpus");
    report.agreement = guarded([&] { return ecs::agreement(gt, preds.front(), report.options); });
  } else if (mode == "sweep") {
    std::vector<ecs::NamedCorpus> corpora;
    for (std::size_t i = 0; i < preds.size(); ++i) corpora.emplace_back(named[i].first, &preds[i]);
    report.sweep = guarded([&] { return ecs::sweep(gt, corpora, ecs::SweepGrid{}, report.options); });
  } else {
    report.options.collect_downstream = mode == "downstream";
    for (std::size_t i = 0; i < preds.size(); ++i) {
      report.evaluations.push_back(
          guarded([&] { return ecs::evaluate_corpus(gt, preds[i], named[i].first, report.options); }));
    }
    if (mode == "downstream") report.downstream = ecs::build_downstream(report.evaluations);
  }

  std::optional<std::filesystem::path> out;
  if (!a.out.empty()) out = a.out;
  ecs::write_report(report, report_format, out, std::cout);
  return kExitOk;
}

int run_synth(const Args& a) {
  const auto format = ecs::parse_format(a.format);
  const auto suite = ecs::make_synthetic_suite(a.charts, a.seed);
  const std::filesystem::path root = a.out_dir;
  ecs::write_corpus(root / "ground_truth", suite.ground_truth, format);
  for (const auto& [name, corpus] : suite.predictions) ecs::write_corpus(root / name, corpus, format);
  std::cerr << "wrote " << suite.ground_truth.size() << " charts and " << suite.predictions.size()
            << " prediction corpora to " << root.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-series chart extraction scorer"};
  app.require_subcommand(1);
  Args args;

  const std::vector<std::pair<std::string, std::string>> modes = {
      {"evaluate", "Score prediction corpora against ground truth"},
      {"sweep", "Vary theta, lambda and the NLS threshold one at a time"},
      {"agreement", "Chart-level ECS between two annotation corpora"},
      {"downstream", "Epidemiological summary statistics and their correlation with ECS/DTW"},
      {"decompose", "Seven-way error decomposition only"},
  };
  for (const auto& [name, help] : modes) add_common(app.add_subcommand(name, help), args, name == "agreement");

  auto* synth = app.add_subcommand("synth", "Write the built-in synthetic suite (exact/shift/noise/truncation)");
  synth->add_option("--out-dir", args.out_dir, "Destination directory")->required();
  synth->add_option("--charts", args.charts, "Charts per corpus");
  synth->add_option("--seed", args.seed, "Generator seed");
  synth->add_option("--format", args.format, "Table format")->check(CLI::IsMember({"tsv", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth->parsed()) return run_synth(args);
    for (const auto& [name, help] : modes) {
      if (app.got_subcommand(name)) return run(name, args);
    }
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const GroundTruthError& e) {
    std::cerr << "ground truth error: " << e.what() << "\n";
    return kExitGroundTruth;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
