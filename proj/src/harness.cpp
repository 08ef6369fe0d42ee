#include "ecs/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "ecs/errors.hpp"
#include "ecs/text.hpp"

namespace ecs {

MetricSet MetricSet::parse(const std::string& list) {
  MetricSet m{false, false, false, false};
  for (const auto& raw : text::split(list, ',')) {
    const auto name = text::ascii_lower(text::trim(raw));
    if (name == "ecs") {
      m.ecs = true;
    } else if (name == "dtw") {
      m.dtw = true;
    } else if (name == "rms") {
      m.rms = true;
    } else if (name == "scrm") {
      m.scrm = true;
    } else if (!name.empty()) {
      throw Error(ErrorKind::InvalidArgument, "unknown metric '" + name + "'");
    }
  }
  return m;
}

std::string MetricSet::to_string() const {
  std::string out;
  auto add = [&out](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ",";
    out += name;
  };
  add(ecs, "ecs");
  add(dtw, "dtw");
  add(rms, "rms");
  add(scrm, "scrm");
  return out;
}

void validate(const EvaluationOptions& options) {
  validate(options.params);
  if (!(options.nls_threshold >= 0.0 && options.nls_threshold < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "NLS threshold must lie in [0, 1)");
  }
}

const char* to_string(PredictionStatus s) {
  switch (s) {
    case PredictionStatus::Ok: return "ok";
    case PredictionStatus::Missing: return "missing";
    case PredictionStatus::ParseFailed: return "parse_failed";
    case PredictionStatus::Empty: return "empty";
  }
  return "unknown";
}

ChartScore score_chart(const ChartTable& gt, const ChartTable* pred, PredictionStatus status,
                       const EvaluationOptions& options, std::vector<SeriesStatRecord>* records) {
  if (gt.series.empty()) throw Error(ErrorKind::EmptyGroundTruth, "chart '" + gt.chart_id + "' has no series");
  for (const auto& s : gt.series) {
    if (s.present_count() == 0) {
      throw Error(ErrorKind::EmptyGroundTruth,
                  "chart '" + gt.chart_id + "': ground-truth series '" + s.label + "' has no present values");
    }
  }

  ChartScore cs;
  cs.chart_id = gt.chart_id;
  cs.tags = gt.meta;
  cs.series_length = gt.row_count();
  if (pred != nullptr) cs.warnings = pred->warnings;

  const auto type_it = gt.meta.find("chart_type");
  if (type_it == gt.meta.end()) {
    if (options.metrics.scrm) cs.warnings.push_back("chart_type missing; SCRM uses line tolerance");
  } else {
    try {
      cs.chart_type = parse_chart_type(type_it->second);
    } catch (const Error&) {
      cs.warnings.push_back("chart_type '" + type_it->second + "' not recognized; SCRM uses line tolerance");
    }
  }

  const bool no_data = pred == nullptr || pred->has_no_data();
  if (status == PredictionStatus::Ok && no_data) status = PredictionStatus::Empty;
  cs.status = status;

  static const std::vector<TimeSeries> kNoSeries;
  const auto matches = match_series(gt.series, no_data ? kNoSeries : pred->series, options.nls_threshold);

  AlignmentMap alignments;
  std::vector<double> ecs_values, dtw_values;
  for (const auto& match : matches) {
    if (match.kind == MatchKind::PredUnmatched) {
      cs.unmatched_predictions.push_back(*match.pred_label);
      continue;
    }
    SeriesScore s;
    s.gt_label = match.gt_label;
    s.kind = match.kind;
    s.pred_label = match.pred_label;
    s.nls = match.nls;
    if (match.kind == MatchKind::Paired) {
      const auto g = *match.gt_index;
      const TimeSeries& ts = gt.series[g];
      const TimeSeries& ps = pred->series[*match.pred_index];
      auto outcome = ecs_align(ps, ts, options.params);
      s.ecs = series_ecs_from_alignment(outcome.alignment);
      s.clamped = outcome.clamped;
      s.n_match = outcome.alignment.n_match;
      s.n_insert = outcome.alignment.n_insert;
      s.n_delete = outcome.alignment.n_delete;
      if (options.metrics.dtw && ps.present_count() > 0) s.dtw = dtw_series(ps, ts, options.params);
      alignments.emplace(g, std::move(outcome.alignment));
      if (records != nullptr) {
        auto rec = compute_series_stats(ps, ts, classify_label(ts.label, {}, &gt.label_class_overrides));
        rec.chart_id = gt.chart_id;
        rec.ecs = s.ecs;
        rec.dtw = s.dtw;
        records->push_back(std::move(rec));
      }
    }
    ecs_values.push_back(s.ecs);
    dtw_values.push_back(s.dtw);
    cs.per_series.push_back(std::move(s));
  }
  cs.ecs_chart = ordered_mean(ecs_values);
  cs.dtw_chart = ordered_mean(dtw_values);
  cs.decomposition = decompose_chart(gt, no_data ? nullptr : pred, matches, alignments, options.params);

  if (options.metrics.rms || options.metrics.scrm) {
    const auto gt_cells = table_to_cells(gt);
    const auto pred_cells = no_data ? std::vector<CellEntry>{} : table_to_cells(*pred);
    if (options.metrics.rms) cs.rms = rms_score(pred_cells, gt_cells);
    if (options.metrics.scrm) cs.scrm = scrm_score(pred_cells, gt_cells, cs.chart_type);
  }
  return cs;
}

ScoreSummary summarize(const std::vector<const ChartScore*>& charts) {
  ScoreSummary s;
  s.charts = charts.size();
  auto mean = [&](auto getter) {
    std::vector<double> v;
    v.reserve(charts.size());
    for (const auto* c : charts) v.push_back(getter(*c));
    return ordered_mean(v);
  };
  s.ecs = mean([](const ChartScore& c) { return c.ecs_chart; });
  s.dtw = mean([](const ChartScore& c) { return c.dtw_chart; });
  s.rms.precision = mean([](const ChartScore& c) { return c.rms.precision; });
  s.rms.recall = mean([](const ChartScore& c) { return c.rms.recall; });
  s.rms.f1 = mean([](const ChartScore& c) { return c.rms.f1; });
  s.scrm.precision = mean([](const ChartScore& c) { return c.scrm.precision; });
  s.scrm.recall = mean([](const ChartScore& c) { return c.scrm.recall; });
  s.scrm.f1 = mean([](const ChartScore& c) { return c.scrm.f1; });
  for (std::size_t f = 0; f < std::size(kDecompositionFields); ++f) {
    field(s.decomposition, f) = mean([f](const ChartScore& c) { return field(c.decomposition, f); });
  }
  return s;
}

namespace {

unsigned resolve_threads(unsigned requested, std::size_t work) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(work, 1)));
}

// Runs fn(i) for i in [0, count) on `threads` workers. The exception thrown for
// the smallest index, if any, is rethrown so failures are deterministic too.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn fn) {
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = count;
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (i < error_index) {
            error_index = i;
            error = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

template <typename Item, typename TagsOf>
std::map<std::string, std::map<std::string, std::vector<const Item*>>> bucket_by_tags(
    const std::vector<Item>& items, const std::vector<std::string>& group_by, TagsOf tags_of,
    std::vector<std::string>& warnings) {
  std::map<std::string, std::map<std::string, std::vector<const Item*>>> out;
  for (const auto& tag : group_by) {
    if (!is_known_group_tag(tag)) {
      warnings.push_back("unknown group tag '" + tag + "' ignored");
      continue;
    }
    auto& buckets = out[tag];
    for (const auto& item : items) {
      const StratumTags& tags = tags_of(item);
      const auto it = tags.find(tag);
      buckets[it == tags.end() ? kUnknownTagValue : it->second].push_back(&item);
    }
  }
  return out;
}

}  // namespace

CorpusEvaluation evaluate_corpus(const Corpus& gt, const Corpus& pred, const std::string& name,
                                 const EvaluationOptions& options) {
  validate(options);
  if (!gt.failures.empty()) {
    throw Error(ErrorKind::GroundTruthParseFailure, gt.failures.begin()->second.message);
  }
  if (gt.charts.empty()) throw Error(ErrorKind::EmptyCorpus, "ground-truth corpus is empty");

  CorpusEvaluation eval;
  eval.name = name;
  for (const auto& [id, table] : pred.charts) {
    if (!gt.charts.count(id)) eval.warnings.push_back("prediction '" + id + "' has no ground truth; ignored");
  }
  for (const auto& [id, failure] : pred.failures) {
    if (!gt.charts.count(id)) eval.warnings.push_back("prediction '" + id + "' has no ground truth; ignored");
  }

  std::vector<const ChartTable*> gt_tables;
  for (const auto& [id, table] : gt.charts) gt_tables.push_back(&table);

  std::vector<ChartScore> scores(gt_tables.size());
  std::vector<std::vector<SeriesStatRecord>> records(gt_tables.size());
  parallel_for(gt_tables.size(), resolve_threads(options.threads, gt_tables.size()), [&](std::size_t i) {
    const ChartTable& g = *gt_tables[i];
    const ChartTable* p = nullptr;
    auto status = PredictionStatus::Missing;
    if (const auto it = pred.charts.find(g.chart_id); it != pred.charts.end()) {
      p = &it->second;
      status = PredictionStatus::Ok;
    } else if (pred.failures.count(g.chart_id)) {
      status = PredictionStatus::ParseFailed;
    }
    scores[i] = score_chart(g, p, status, options, options.collect_downstream ? &records[i] : nullptr);
  });

  eval.charts = std::move(scores);
  for (auto& chart_records : records) {
    for (auto& r : chart_records) {
      r.corpus = name;
      eval.downstream_records.push_back(std::move(r));
    }
  }

  std::vector<const ChartScore*> all;
  for (const auto& c : eval.charts) all.push_back(&c);
  eval.summary = summarize(all);
  const auto buckets =
      bucket_by_tags(eval.charts, options.group_by, [](const ChartScore& c) -> const StratumTags& { return c.tags; },
                     eval.warnings);
  for (const auto& [tag, values] : buckets) {
    for (const auto& [value, members] : values) eval.groups[tag][value] = summarize(members);
  }
  return eval;
}

DownstreamReport build_downstream(const std::vector<CorpusEvaluation>& evaluations) {
  DownstreamReport report;
  for (const auto& e : evaluations) {
    report.records.insert(report.records.end(), e.downstream_records.begin(), e.downstream_records.end());
  }
  std::sort(report.records.begin(), report.records.end(), [](const SeriesStatRecord& a, const SeriesStatRecord& b) {
    return std::tie(a.chart_id, a.gt_label, a.corpus) < std::tie(b.chart_id, b.gt_label, b.corpus);
  });
  for (const Statistic stat : kStatistics) {
    report.eligible[stat] = 0;
    report.filter_counts[stat];
  }
  for (const auto& r : report.records) {
    for (const Statistic stat : kStatistics) {
      if (r.value(stat)) {
        ++report.eligible[stat];
      } else {
        ++report.filter_counts[stat][r.filter_flags.at(stat)];
      }
    }
  }
  report.correlations = correlate_metrics(report.records, &report.warnings);
  return report;
}

std::vector<SweepRow> sweep(const Corpus& gt, const std::vector<NamedCorpus>& predictions, const SweepGrid& grid,
                            const EvaluationOptions& base) {
  EvaluationOptions opts = base;
  opts.metrics = MetricSet{true, false, false, false};
  opts.collect_downstream = false;
  opts.group_by.clear();

  std::vector<SweepRow> rows;
  auto run = [&](const std::string& parameter, double value, const AlignmentParams& params, double nls_threshold) {
    SweepRow row;
    row.parameter = parameter;
    row.value = value;
    row.params = params;
    row.nls_threshold = nls_threshold;
    EvaluationOptions point = opts;
    point.params = params;
    point.nls_threshold = nls_threshold;
    for (const auto& [name, corpus] : predictions) {
      row.ecs_by_corpus[name] = evaluate_corpus(gt, *corpus, name, point).summary.ecs;
    }
    if (!row.ecs_by_corpus.empty()) {
      double lo = row.ecs_by_corpus.begin()->second;
      double hi = lo;
      for (const auto& [name, ecs] : row.ecs_by_corpus) {
        lo = std::min(lo, ecs);
        hi = std::max(hi, ecs);
        row.ranking.push_back(name);
      }
      row.spread = hi - lo;
      std::stable_sort(row.ranking.begin(), row.ranking.end(), [&](const std::string& a, const std::string& b) {
        return row.ecs_by_corpus.at(a) > row.ecs_by_corpus.at(b);
      });
    }
    rows.push_back(std::move(row));
  };

  for (double theta : grid.theta) run("theta", theta, AlignmentParams{theta, base.params.lambda}, base.nls_threshold);
  for (double lambda : grid.lambda) run("lambda", lambda, AlignmentParams{base.params.theta, lambda}, base.nls_threshold);
  for (double nls : grid.nls) run("nls", nls, base.params, nls);
  return rows;
}

std::string series_length_stratum(std::size_t length) {
  if (length <= 20) return "<=20";
  if (length <= 100) return "21-100";
  return ">100";
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

AgreementStats agreement_stats(const std::vector<const ChartScore*>& charts) {
  std::vector<double> v;
  for (const auto* c : charts) v.push_back(c->ecs_chart);
  return AgreementStats{v.size(), ordered_mean(v), median_of(v)};
}

std::set<std::string> chart_ids(const Corpus& c) {
  std::set<std::string> ids;
  for (const auto& [id, t] : c.charts) ids.insert(id);
  for (const auto& [id, f] : c.failures) ids.insert(id);
  return ids;
}

}  // namespace

AgreementReport agreement(const Corpus& corpus_a, const Corpus& corpus_b, const EvaluationOptions& options) {
  if (chart_ids(corpus_a) != chart_ids(corpus_b)) {
    throw Error(ErrorKind::MismatchedCorpora, "the two annotation corpora cover different chart ids");
  }
  EvaluationOptions opts = options;
  opts.metrics = MetricSet{true, false, false, false};
  opts.collect_downstream = false;
  auto eval = evaluate_corpus(corpus_a, corpus_b, "agreement", opts);

  AgreementReport report;
  report.charts = std::move(eval.charts);
  std::vector<const ChartScore*> all;
  for (const auto& c : report.charts) all.push_back(&c);
  report.overall = agreement_stats(all);

  std::vector<std::string> ignored;
  const auto buckets = bucket_by_tags(report.charts, opts.group_by,
                                      [](const ChartScore& c) -> const StratumTags& { return c.tags; }, ignored);
  for (const auto& [tag, values] : buckets) {
    for (const auto& [value, members] : values) report.strata[tag][value] = agreement_stats(members);
  }
  std::map<std::string, std::vector<const ChartScore*>> by_length;
  for (const auto* c : all) by_length[series_length_stratum(c->series_length)].push_back(c);
  for (const auto& [value, members] : by_length) report.strata["series_length"][value] = agreement_stats(members);
  return report;
}

}  // namespace ecs
