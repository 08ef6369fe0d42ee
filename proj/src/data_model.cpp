#include "ecs/data_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ecs/errors.hpp"
#include "ecs/text.hpp"

namespace ecs {

namespace fs = std::filesystem;

std::vector<double> TimeSeries::values_present() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    if (p.value) out.push_back(*p.value);
  }
  return out;
}

std::size_t TimeSeries::present_count() const {
  return static_cast<std::size_t>(
      std::count_if(points.begin(), points.end(), [](const Point& p) { return p.value.has_value(); }));
}

std::size_t ChartTable::row_count() const {
  std::size_t rows = 0;
  for (const auto& s : series) rows = std::max(rows, s.points.size());
  return rows;
}

bool ChartTable::has_no_data() const {
  return std::all_of(series.begin(), series.end(),
                     [](const TimeSeries& s) { return s.present_count() == 0; });
}

TableFormat parse_format(std::string_view name) {
  const auto lower = text::ascii_lower(name);
  if (lower == "tsv") return TableFormat::Tsv;
  if (lower == "csv") return TableFormat::Csv;
  throw Error(ErrorKind::InvalidArgument, "unknown table format '" + std::string(name) + "'");
}

std::string_view extension_for(TableFormat format) {
  return format == TableFormat::Tsv ? ".tsv" : ".csv";
}

namespace {

using Row = std::vector<std::string>;

struct RawRecord {
  Row cells;
  std::size_t line = 0;
};

// A fully double-quoted TSV cell is unwrapped; quotes are not otherwise special.
std::string unquote_tsv_cell(std::string_view cell) {
  const auto t = text::trim(cell);
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') {
    std::string out;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      out.push_back(t[i]);
      if (t[i] == '"' && i + 2 < t.size() && t[i + 1] == '"') ++i;
    }
    return out;
  }
  return std::string(t);
}

bool is_blank(std::string_view line) { return text::trim(line).empty(); }

bool is_fence(std::string_view line) { return text::trim(line).substr(0, 3) == "```"; }

std::vector<RawRecord> split_tsv(std::string_view body, bool lenient) {
  std::vector<RawRecord> records;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= body.size()) {
    auto end = body.find('\n', start);
    if (end == std::string_view::npos) end = body.size();
    auto line = body.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (is_blank(line)) {
      if (end == body.size()) break;
      continue;
    }
    if (lenient && is_fence(line)) continue;
    RawRecord rec;
    rec.line = line_no;
    for (auto& cell : text::split(line, '\t')) rec.cells.push_back(unquote_tsv_cell(cell));
    records.push_back(std::move(rec));
    if (end == body.size()) break;
  }
  return records;
}

// RFC 4180 style: quoted fields may contain separators, doubled quotes and newlines.
std::vector<RawRecord> split_csv(std::string_view body, bool lenient) {
  std::vector<RawRecord> records;
  RawRecord rec;
  std::string cell;
  bool in_quotes = false;
  bool row_has_content = false;
  std::size_t line_no = 1;
  rec.line = 1;

  auto finish_row = [&] {
    rec.cells.push_back(std::string(text::trim(cell)));
    cell.clear();
    const bool blank = !row_has_content && rec.cells.size() == 1 && rec.cells[0].empty();
    const bool fence = lenient && rec.cells.size() == 1 && is_fence(rec.cells[0]);
    if (!blank && !fence) records.push_back(std::move(rec));
    rec = RawRecord{};
    rec.line = line_no;
    row_has_content = false;
  };

  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < body.size() && body[i + 1] == '"') {
          cell.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_no;
        cell.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        row_has_content = true;
        break;
      case ',':
        rec.cells.push_back(std::string(text::trim(cell)));
        cell.clear();
        row_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        ++line_no;
        finish_row();
        break;
      default:
        if (!text::trim(std::string_view(&c, 1)).empty()) row_has_content = true;
        cell.push_back(c);
    }
  }
  if (!cell.empty() || !rec.cells.empty()) finish_row();
  return records;
}

}  // namespace

std::optional<double> parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  auto t = text::trim(cell);
  if (t.empty() || text::iequals_ascii(t, "nan") || text::iequals_ascii(t, "na")) return std::nullopt;

  std::string cleaned;
  cleaned.reserve(t.size());
  for (char c : t) {
    if (c != ',') cleaned.push_back(c);
  }
  std::string_view num = cleaned;
  if (!num.empty() && num.back() == '%') {
    num.remove_suffix(1);
    num = text::trim(num);
  }
  if (!num.empty() && num.front() == '+') num.remove_prefix(1);

  auto fail = [&] { return ParseError(ErrorKind::NonNumericCell, row, col, "'" + std::string(t) + "' is not a number"); };
  if (num.empty()) throw fail();
  // from_chars accepts "inf"/"nan" spellings; only digits, sign and '.' may start a number here.
  const char first = num.front();
  if (!(first == '-' || first == '.' || (first >= '0' && first <= '9'))) throw fail();

  double value = 0.0;
  const auto* begin = num.data();
  const auto* end = num.data() + num.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value, std::chars_format::general);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) throw fail();
  return value;
}

ChartTable parse_table(std::string_view bytes, const ParseOptions& options) {
  if (bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);

  auto records = options.format == TableFormat::Tsv ? split_tsv(bytes, options.lenient)
                                                    : split_csv(bytes, options.lenient);
  if (records.empty()) throw ParseError(ErrorKind::EmptyTable, 0, 0, "no header row");

  const Row& header = records.front().cells;
  ChartTable table;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto label = text::trim(header[c]);
    if (label.empty()) {
      throw ParseError(ErrorKind::MalformedHeader, 0, c + 1, "empty series header");
    }
    table.series.push_back(TimeSeries{std::string(label), {}});
  }
  if (table.series.empty() && !options.lenient) {
    throw ParseError(ErrorKind::MalformedHeader, 0, 2, "header has no series columns");
  }
  if (records.size() < 2) throw ParseError(ErrorKind::EmptyTable, 0, 0, "no data rows");

  const std::size_t width = header.size();
  for (std::size_t r = 1; r < records.size(); ++r) {
    Row cells = std::move(records[r].cells);
    if (cells.size() != width) {
      if (!options.lenient) {
        throw ParseError(ErrorKind::RaggedRow, r, cells.size(),
                         "expected " + std::to_string(width) + " cells, found " + std::to_string(cells.size()));
      }
      table.warnings.push_back("row " + std::to_string(r) + " has " + std::to_string(cells.size()) +
                               " cells, header has " + std::to_string(width) + "; padded with missing");
      cells.resize(width);
    }
    const std::string x_label(text::trim(cells[0]));
    for (std::size_t c = 1; c < width; ++c) {
      table.series[c - 1].points.push_back(Point{x_label, parse_cell(cells[c], r, c + 1)});
    }
  }
  return table;
}

namespace {

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string serialize_table(const ChartTable& table, TableFormat format) {
  const char sep = format == TableFormat::Tsv ? '\t' : ',';
  auto cell = [&](const std::string& s) { return format == TableFormat::Csv ? csv_escape(s) : s; };

  std::string out = "x";
  for (const auto& s : table.series) {
    out.push_back(sep);
    out += cell(s.label);
  }
  out.push_back('\n');
  const std::size_t rows = table.row_count();
  for (std::size_t r = 0; r < rows; ++r) {
    std::string x;
    for (const auto& s : table.series) {
      if (r < s.points.size()) {
        x = s.points[r].x_label;
        break;
      }
    }
    out += cell(x);
    for (const auto& s : table.series) {
      out.push_back(sep);
      if (r < s.points.size() && s.points[r].value) {
        out += format_number(*s.points[r].value);
      } else {
        out += "nan";
      }
    }
    out.push_back('\n');
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Corpus load_corpus(const fs::path& dir, TableFormat format, CorpusRole role) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(role == CorpusRole::GroundTruth ? ErrorKind::GroundTruthParseFailure : ErrorKind::Io,
                dir.string() + " is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename().string();
    if (name.empty() || name.front() == '.') continue;
    if (text::ascii_lower(entry.path().extension().string()) != extension_for(format)) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty() && role == CorpusRole::GroundTruth) {
    throw Error(ErrorKind::EmptyCorpus, "no " + std::string(extension_for(format)) + " files in " + dir.string());
  }

  Corpus corpus;
  const ParseOptions options{format, role == CorpusRole::Predictions};
  for (const auto& path : files) {
    const auto id = path.stem().string();
    if (corpus.contains(id)) throw Error(ErrorKind::DuplicateChartId, "chart id '" + id + "' in " + dir.string());
    try {
      ChartTable table = parse_table(read_file(path), options);
      table.chart_id = id;
      corpus.charts.emplace(id, std::move(table));
    } catch (const Error& e) {
      if (role == CorpusRole::GroundTruth) {
        throw Error(ErrorKind::GroundTruthParseFailure, path.string() + ": " + e.what());
      }
      corpus.failures.emplace(id, ParseFailure{id, path.string(), e.what()});
    }
  }
  return corpus;
}

namespace {

const char* const kTagKeys[] = {"chart_type", "cumulative", "set", "source"};

std::string json_scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  return v.dump();
}

}  // namespace

MetadataSidecar parse_metadata_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("metadata JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::InvalidArgument, "metadata JSON must be an object keyed by chart_id");

  MetadataSidecar out;
  for (const auto& [chart_id, fields] : doc.items()) {
    ChartMetadata meta;
    if (!fields.is_object()) throw Error(ErrorKind::InvalidArgument, "metadata for '" + chart_id + "' is not an object");
    for (const char* key : kTagKeys) {
      if (fields.contains(key) && !fields[key].is_null()) meta.tags[key] = json_scalar_text(fields[key]);
    }
    if (fields.contains("label_class_overrides") && fields["label_class_overrides"].is_object()) {
      for (const auto& [label, cls] : fields["label_class_overrides"].items()) {
        meta.label_class_overrides[label] = json_scalar_text(cls);
      }
    }
    out.emplace(chart_id, std::move(meta));
  }
  return out;
}

MetadataSidecar parse_metadata_csv(std::string_view text) {
  const auto records = split_csv(text, false);
  if (records.empty()) return {};
  const Row& header = records.front().cells;
  std::optional<std::size_t> id_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "chart_id") id_col = c;
  }
  if (!id_col) throw Error(ErrorKind::InvalidArgument, "metadata CSV has no chart_id column");

  MetadataSidecar out;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const Row& cells = records[r].cells;
    if (*id_col >= cells.size()) continue;
    ChartMetadata meta;
    for (std::size_t c = 0; c < header.size() && c < cells.size(); ++c) {
      if (c == *id_col || cells[c].empty()) continue;
      if (header[c] == "label_class_overrides") {
        // label=class;label=class
        for (const auto& pair : text::split(cells[c], ';')) {
          const auto eq = pair.rfind('=');
          if (eq == std::string::npos) continue;
          meta.label_class_overrides[std::string(text::trim(std::string_view(pair).substr(0, eq)))] =
              std::string(text::trim(std::string_view(pair).substr(eq + 1)));
        }
      } else if (std::find(std::begin(kTagKeys), std::end(kTagKeys), header[c]) != std::end(kTagKeys)) {
        meta.tags[header[c]] = cells[c];
      }
    }
    out.emplace(cells[*id_col], std::move(meta));
  }
  return out;
}

MetadataSidecar load_metadata(const fs::path& path) {
  const auto content = read_file(path);
  if (text::ascii_lower(path.extension().string()) == ".csv") return parse_metadata_csv(content);
  return parse_metadata_json(content);
}

void apply_metadata(Corpus& corpus, const MetadataSidecar& sidecar) {
  for (auto& [id, table] : corpus.charts) {
    const auto it = sidecar.find(id);
    if (it == sidecar.end()) continue;
    table.meta = it->second.tags;
    table.label_class_overrides = it->second.label_class_overrides;
  }
}

}  // namespace ecs
