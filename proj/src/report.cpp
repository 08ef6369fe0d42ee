#include "ecs/report.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ecs/errors.hpp"
#include "ecs/text.hpp"

namespace ecs {

using nlohmann::ordered_json;

ReportFormat parse_report_format(std::string_view name) {
  const auto lower = text::ascii_lower(text::trim(name));
  if (lower == "json") return ReportFormat::Json;
  if (lower == "csv") return ReportFormat::Csv;
  throw Error(ErrorKind::InvalidArgument, "unknown report format '" + std::string(name) + "'");
}

std::string report_timestamp(bool fixed_clock) {
  if (fixed_clock) return kFixedTimestamp;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace {

ordered_json decisions() {
  ordered_json d;
  d["normalization"] = "ground_truth_y_range";
  d["tie_break"] = "diagonal, then delete, then insert";
  d["ecs_clamp"] = "max(0, 1 - cost / path_length)";
  d["dtw_normalization"] = "backtracked path length";
  d["label_mismatch_rule"] =
      "unmatched ground-truth series count as label_mismatch when any predicted series is unmatched, "
      "otherwise as missed_series";
  d["clamped_losses"] = "rescaled to sum to one";
  d["nls_labels"] = "case-folded, trimmed, whitespace collapsed";
  d["growth_log_pseudo_count"] = 1;
  d["min_ascending_phase"] = kMinAscendingPhase;
  d["rms"] = "nls(key) * (1 - min(1, |dv| / max(|v_gt|, 1e-9))), optimal one-to-one assignment";
  d["scrm"] = "binary: nls(key) > 0.5 and |dv| <= tol * max(|v_gt|, 1e-9); tol 0.05 bar, 0.10 line/mixed";
  d["corpus_mean"] = "unweighted mean over charts";
  return d;
}

ordered_json kv_json(const KVScore& s) {
  return ordered_json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

ordered_json decomposition_json(const Decomposition& d) {
  ordered_json j;
  for (std::size_t f = 0; f < std::size(kDecompositionFields); ++f) j[kDecompositionFields[f]] = field(d, f);
  return j;
}

template <typename T>
ordered_json opt_json(const std::optional<T>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

bool decompose_only(const Report& r) { return r.mode == "decompose"; }

void put_metrics(ordered_json& j, const MetricSet& m, bool decompose, double ecs, double dtw, const KVScore& rms,
                 const KVScore& scrm, const Decomposition& d) {
  if (!decompose) {
    if (m.ecs) j["ecs"] = ecs;
    if (m.dtw) j["dtw"] = dtw;
    if (m.rms) j["rms"] = kv_json(rms);
    if (m.scrm) j["scrm"] = kv_json(scrm);
  }
  j["decomposition"] = decomposition_json(d);
}

ordered_json chart_json(const Report& r, const std::string& corpus, const ChartScore& c) {
  const auto& m = r.options.metrics;
  const bool decompose = decompose_only(r);
  ordered_json j;
  j["corpus"] = corpus;
  j["chart_id"] = c.chart_id;
  j["status"] = to_string(c.status);
  j["chart_type"] = to_string(c.chart_type);
  j["tags"] = c.tags;
  j["series_length"] = c.series_length;
  put_metrics(j, m, decompose, c.ecs_chart, c.dtw_chart, c.rms, c.scrm, c.decomposition);
  if (!decompose) {
    ordered_json series = ordered_json::array();
    for (const auto& s : c.per_series) {
      ordered_json e;
      e["gt_label"] = s.gt_label;
      e["match"] = to_string(s.kind);
      e["pred_label"] = opt_json(s.pred_label);
      e["nls"] = opt_json(s.nls);
      if (m.ecs) {
        e["ecs"] = s.ecs;
        e["clamped"] = s.clamped;
      }
      if (m.dtw) e["dtw"] = s.dtw;
      e["n_match"] = s.n_match;
      e["n_insert"] = s.n_insert;
      e["n_delete"] = s.n_delete;
      series.push_back(std::move(e));
    }
    j["per_series"] = std::move(series);
    j["unmatched_predictions"] = c.unmatched_predictions;
  }
  j["warnings"] = c.warnings;
  return j;
}

ordered_json summary_json(const Report& r, const ScoreSummary& s) {
  ordered_json j;
  j["charts"] = s.charts;
  put_metrics(j, r.options.metrics, decompose_only(r), s.ecs, s.dtw, s.rms, s.scrm, s.decomposition);
  return j;
}

ordered_json agreement_stats_json(const AgreementStats& s) {
  return ordered_json{{"n", s.n}, {"mean", s.mean}, {"median", s.median}};
}

ordered_json meta_json(const Report& r) {
  ordered_json j;
  j["tool_version"] = kToolVersion;
  j["schema_version"] = kReportSchemaVersion;
  j["generated_at"] = report_timestamp(r.fixed_clock);
  j["mode"] = r.mode;
  j["ground_truth"] = r.ground_truth;
  ordered_json corpora = ordered_json::array();
  for (const auto& [name, path] : r.corpora) corpora.push_back(ordered_json{{"name", name}, {"path", path}});
  j["predictions"] = std::move(corpora);
  j["params"] = ordered_json{{"theta", r.options.params.theta},
                             {"lambda", r.options.params.lambda},
                             {"nls_threshold", r.options.nls_threshold}};
  j["metrics"] = r.options.metrics.to_string();
  j["group_by"] = r.options.group_by;
  j["decisions"] = decisions();
  std::vector<std::string> warnings = r.warnings;
  for (const auto& e : r.evaluations) {
    for (const auto& w : e.warnings) warnings.push_back(e.name + ": " + w);
  }
  if (r.downstream) {
    for (const auto& w : r.downstream->warnings) warnings.push_back("downstream: " + w);
  }
  j["warnings"] = std::move(warnings);
  return j;
}

ordered_json record_json(const SeriesStatRecord& rec) {
  ordered_json j;
  j["corpus"] = rec.corpus;
  j["chart_id"] = rec.chart_id;
  j["gt_label"] = rec.gt_label;
  j["ecs"] = rec.ecs;
  j["dtw"] = rec.dtw;
  for (const Statistic stat : kStatistics) j[to_string(stat)] = opt_json(rec.value(stat));
  ordered_json flags = ordered_json::object();
  for (const auto& [stat, reason] : rec.filter_flags) flags[to_string(stat)] = to_string(reason);
  j["filtered"] = std::move(flags);
  return j;
}

ordered_json downstream_json(const DownstreamReport& d) {
  ordered_json j;
  ordered_json records = ordered_json::array();
  for (const auto& rec : d.records) records.push_back(record_json(rec));
  j["records"] = std::move(records);
  ordered_json rows = ordered_json::array();
  for (const auto& row : d.correlations) {
    rows.push_back(ordered_json{{"statistic", to_string(row.statistic)},
                                {"r_ecs", opt_json(row.r_ecs)},
                                {"r_dtw", opt_json(row.r_dtw)},
                                {"n", row.n},
                                {"expected_sign", row.expected_sign}});
  }
  j["correlations"] = std::move(rows);
  ordered_json eligible;
  for (const auto& [stat, n] : d.eligible) eligible[to_string(stat)] = n;
  j["eligible"] = std::move(eligible);
  ordered_json filters;
  for (const auto& [stat, counts] : d.filter_counts) {
    ordered_json c = ordered_json::object();
    for (const auto& [reason, n] : counts) c[to_string(reason)] = n;
    filters[to_string(stat)] = std::move(c);
  }
  j["filter_counts"] = std::move(filters);
  j["warnings"] = d.warnings;
  return j;
}

ordered_json sweep_json(const std::vector<SweepRow>& rows) {
  ordered_json j = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json e;
    e["parameter"] = row.parameter;
    e["value"] = row.value;
    e["theta"] = row.params.theta;
    e["lambda"] = row.params.lambda;
    e["nls_threshold"] = row.nls_threshold;
    e["ecs"] = row.ecs_by_corpus;
    e["spread"] = row.spread;
    e["ranking"] = row.ranking;
    j.push_back(std::move(e));
  }
  return j;
}

}  // namespace

ordered_json to_json(const Report& r) {
  ordered_json j;
  j["meta"] = meta_json(r);

  ordered_json charts = ordered_json::array();
  ordered_json corpus = ordered_json::array();
  ordered_json groups = ordered_json::array();
  if (r.agreement) {
    for (const auto& c : r.agreement->charts) charts.push_back(chart_json(r, "agreement", c));
    ordered_json overall = agreement_stats_json(r.agreement->overall);
    overall["name"] = "agreement";
    corpus.push_back(std::move(overall));
    for (const auto& [tag, values] : r.agreement->strata) {
      for (const auto& [value, stats] : values) {
        ordered_json g{{"corpus", "agreement"}, {"tag", tag}, {"value", value}};
        g.update(agreement_stats_json(stats));
        groups.push_back(std::move(g));
      }
    }
  }
  for (const auto& e : r.evaluations) {
    for (const auto& c : e.charts) charts.push_back(chart_json(r, e.name, c));
    ordered_json s{{"name", e.name}};
    s.update(summary_json(r, e.summary));
    corpus.push_back(std::move(s));
    for (const auto& [tag, values] : e.groups) {
      for (const auto& [value, summary] : values) {
        ordered_json g{{"corpus", e.name}, {"tag", tag}, {"value", value}};
        g.update(summary_json(r, summary));
        groups.push_back(std::move(g));
      }
    }
  }
  j["charts"] = std::move(charts);
  j["corpus"] = std::move(corpus);
  j["groups"] = std::move(groups);
  j["downstream"] = r.downstream ? downstream_json(*r.downstream) : ordered_json(nullptr);
  j["sweep"] = r.sweep ? sweep_json(*r.sweep) : ordered_json(nullptr);
  return j;
}

std::string render_json(const Report& report) { return to_json(report).dump(2) + "\n"; }

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string opt_num(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_floating_point_v<T>) {
    return num(*v);
  } else {
    return std::to_string(*v);
  }
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << csv_field(cells[i]);
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::string tag_or_empty(const StratumTags& tags, const char* name) {
  const auto it = tags.find(name);
  return it == tags.end() ? "" : it->second;
}

std::vector<std::string> metric_header(const MetricSet& m, bool decompose) {
  std::vector<std::string> h;
  if (!decompose) {
    if (m.ecs) h.push_back("ecs");
    if (m.dtw) h.push_back("dtw");
    if (m.rms) h.insert(h.end(), {"rms_precision", "rms_recall", "rms_f1"});
    if (m.scrm) h.insert(h.end(), {"scrm_precision", "scrm_recall", "scrm_f1"});
  }
  for (const char* f : kDecompositionFields) h.push_back(std::string("decomposition_") + f);
  return h;
}

void append_metrics(std::vector<std::string>& row, const MetricSet& m, bool decompose, double ecs, double dtw,
                    const KVScore& rms, const KVScore& scrm, const Decomposition& d) {
  if (!decompose) {
    if (m.ecs) row.push_back(num(ecs));
    if (m.dtw) row.push_back(num(dtw));
    if (m.rms) row.insert(row.end(), {num(rms.precision), num(rms.recall), num(rms.f1)});
    if (m.scrm) row.insert(row.end(), {num(scrm.precision), num(scrm.recall), num(scrm.f1)});
  }
  for (std::size_t f = 0; f < std::size(kDecompositionFields); ++f) row.push_back(num(field(d, f)));
}

}  // namespace

std::vector<std::pair<std::string, std::string>> render_csv(const Report& r) {
  const auto& m = r.options.metrics;
  const bool decompose = decompose_only(r);
  std::vector<std::pair<std::string, std::string>> out;

  {
    CsvWriter w({"key", "value"});
    const auto meta = meta_json(r);
    for (const auto& [key, value] : meta.items()) {
      if (key == "decisions") {
        for (const auto& [dk, dv] : value.items()) {
          w.row({"decisions." + dk, dv.is_string() ? dv.get<std::string>() : dv.dump()});
        }
      } else if (key == "warnings") {
        for (const auto& warning : value) w.row({"warning", warning.get<std::string>()});
      } else {
        w.row({key, value.is_string() ? value.get<std::string>() : value.dump()});
      }
    }
    out.emplace_back("meta", w.str());
  }

  std::vector<std::pair<std::string, const ChartScore*>> charts;
  if (r.agreement) {
    for (const auto& c : r.agreement->charts) charts.emplace_back("agreement", &c);
  }
  for (const auto& e : r.evaluations) {
    for (const auto& c : e.charts) charts.emplace_back(e.name, &c);
  }

  {
    std::vector<std::string> header{"corpus",  "chart_id",  "status", "chart_type",   "cumulative",
                                    "set",     "source",    "series_length"};
    const auto mh = metric_header(m, decompose);
    header.insert(header.end(), mh.begin(), mh.end());
    CsvWriter w(header);
    for (const auto& [corpus, c] : charts) {
      std::vector<std::string> row{corpus,
                                   c->chart_id,
                                   to_string(c->status),
                                   to_string(c->chart_type),
                                   tag_or_empty(c->tags, "cumulative"),
                                   tag_or_empty(c->tags, "set"),
                                   tag_or_empty(c->tags, "source"),
                                   std::to_string(c->series_length)};
      append_metrics(row, m, decompose, c->ecs_chart, c->dtw_chart, c->rms, c->scrm, c->decomposition);
      w.row(row);
    }
    out.emplace_back("charts", w.str());
  }

  if (!decompose) {
    CsvWriter w({"corpus", "chart_id", "gt_label", "match", "pred_label", "nls", "ecs", "clamped", "dtw", "n_match",
                 "n_insert", "n_delete"});
    for (const auto& [corpus, c] : charts) {
      for (const auto& s : c->per_series) {
        w.row({corpus, c->chart_id, s.gt_label, to_string(s.kind), s.pred_label.value_or(""), opt_num(s.nls),
               num(s.ecs), s.clamped ? "true" : "false", num(s.dtw), std::to_string(s.n_match),
               std::to_string(s.n_insert), std::to_string(s.n_delete)});
      }
    }
    out.emplace_back("series", w.str());
  }

  if (r.agreement) {
    CsvWriter corpus({"name", "n", "mean", "median"});
    const auto& o = r.agreement->overall;
    corpus.row({"agreement", std::to_string(o.n), num(o.mean), num(o.median)});
    out.emplace_back("corpus", corpus.str());
    CsvWriter groups({"corpus", "tag", "value", "n", "mean", "median"});
    for (const auto& [tag, values] : r.agreement->strata) {
      for (const auto& [value, s] : values) {
        groups.row({"agreement", tag, value, std::to_string(s.n), num(s.mean), num(s.median)});
      }
    }
    out.emplace_back("groups", groups.str());
  } else {
    std::vector<std::string> header{"name", "charts"};
    const auto mh = metric_header(m, decompose);
    header.insert(header.end(), mh.begin(), mh.end());
    CsvWriter corpus(header);
    std::vector<std::string> gheader{"corpus", "tag", "value", "charts"};
    gheader.insert(gheader.end(), mh.begin(), mh.end());
    CsvWriter groups(gheader);
    for (const auto& e : r.evaluations) {
      std::vector<std::string> row{e.name, std::to_string(e.summary.charts)};
      const auto& s = e.summary;
      append_metrics(row, m, decompose, s.ecs, s.dtw, s.rms, s.scrm, s.decomposition);
      corpus.row(row);
      for (const auto& [tag, values] : e.groups) {
        for (const auto& [value, g] : values) {
          std::vector<std::string> grow{e.name, tag, value, std::to_string(g.charts)};
          append_metrics(grow, m, decompose, g.ecs, g.dtw, g.rms, g.scrm, g.decomposition);
          groups.row(grow);
        }
      }
    }
    out.emplace_back("corpus", corpus.str());
    out.emplace_back("groups", groups.str());
  }

  if (r.downstream) {
    const auto& d = *r.downstream;
    std::vector<std::string> header{"corpus", "chart_id", "gt_label", "ecs", "dtw"};
    for (const Statistic stat : kStatistics) header.push_back(to_string(stat));
    for (const Statistic stat : kStatistics) header.push_back(std::string(to_string(stat)) + "_filter");
    CsvWriter records(header);
    for (const auto& rec : d.records) {
      std::vector<std::string> row{rec.corpus, rec.chart_id, rec.gt_label, num(rec.ecs), num(rec.dtw)};
      for (const Statistic stat : kStatistics) row.push_back(opt_num(rec.value(stat)));
      for (const Statistic stat : kStatistics) {
        const auto it = rec.filter_flags.find(stat);
        row.push_back(it == rec.filter_flags.end() ? "" : to_string(it->second));
      }
      records.row(row);
    }
    out.emplace_back("downstream", records.str());

    CsvWriter corr({"statistic", "r_ecs", "r_dtw", "n", "expected_sign"});
    for (const auto& row : d.correlations) {
      corr.row({to_string(row.statistic), opt_num(row.r_ecs), opt_num(row.r_dtw), std::to_string(row.n),
                std::to_string(row.expected_sign)});
    }
    out.emplace_back("correlations", corr.str());

    CsvWriter filters({"statistic", "reason", "count"});
    for (const auto& [stat, counts] : d.filter_counts) {
      filters.row({to_string(stat), "eligible", std::to_string(d.eligible.at(stat))});
      for (const auto& [reason, n] : counts) filters.row({to_string(stat), to_string(reason), std::to_string(n)});
    }
    out.emplace_back("filters", filters.str());
  }

  if (r.sweep) {
    std::vector<std::string> header{"parameter", "value", "theta", "lambda", "nls_threshold"};
    std::vector<std::string> names;
    if (!r.sweep->empty()) {
      for (const auto& [name, ecs] : r.sweep->front().ecs_by_corpus) names.push_back(name);
    }
    for (const auto& n : names) header.push_back("ecs_" + n);
    header.insert(header.end(), {"spread", "ranking"});
    CsvWriter w(header);
    for (const auto& row : *r.sweep) {
      std::vector<std::string> cells{row.parameter, num(row.value), num(row.params.theta), num(row.params.lambda),
                                     num(row.nls_threshold)};
      for (const auto& n : names) cells.push_back(num(row.ecs_by_corpus.at(n)));
      cells.push_back(num(row.spread));
      std::string ranking;
      for (const auto& n : row.ranking) ranking += (ranking.empty() ? "" : ";") + n;
      cells.push_back(ranking);
      w.row(cells);
    }
    out.emplace_back("sweep", w.str());
  }
  return out;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
}

}  // namespace

void write_report(const Report& report, ReportFormat format, const std::optional<std::filesystem::path>& out,
                  std::ostream& stdout_stream) {
  if (format == ReportFormat::Json) {
    const auto text = render_json(report);
    if (out) {
      write_file(*out, text);
    } else {
      stdout_stream << text;
    }
    return;
  }
  const auto sections = render_csv(report);
  if (!out) {
    for (const auto& [name, text] : sections) stdout_stream << "# " << name << '\n' << text;
    return;
  }
  auto base = *out;
  base.replace_extension();
  for (const auto& [name, text] : sections) {
    write_file(base.string() + "_" + name + ".csv", text);
  }
}

}  // namespace ecs
