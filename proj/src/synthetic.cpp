#include "ecs/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "ecs/errors.hpp"
#include "json.hpp"

namespace ecs {

std::string iso_date(int offset) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{year{2020} / March / 1} + days{offset}};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

namespace {

std::vector<double> epicurve(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> shape_dist(2.0, 4.0);
  std::uniform_real_distribution<double> amp_dist(50.0, 5000.0);
  const double k = shape_dist(rng);
  const double scale = static_cast<double>(n) / (4.0 * k);
  const double amplitude = amp_dist(rng);
  std::vector<double> f(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) + 0.5;
    f[i] = std::pow(t, k - 1.0) * std::exp(-t / scale);
    peak = std::max(peak, f[i]);
  }
  for (auto& v : f) v = std::round(amplitude * v / peak);
  return f;
}

ChartTable table_of(const std::string& id, const std::string& label, const std::vector<std::string>& dates,
                    const std::vector<std::optional<double>>& values, const StratumTags& tags) {
  ChartTable t;
  t.chart_id = id;
  t.meta = tags;
  TimeSeries s;
  s.label = label;
  for (std::size_t i = 0; i < values.size(); ++i) s.points.push_back(Point{dates[i], values[i]});
  t.series.push_back(std::move(s));
  return t;
}

const char* const kLabels[] = {"Reported cases", "Deaths", "Hospital admissions"};

}  // namespace

std::vector<double> gamma_epicurve(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return epicurve(n, rng);
}

SyntheticSuite make_synthetic_suite(std::size_t charts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> length_dist(20, 59);
  std::uniform_real_distribution<double> noise_dist(-0.1, 0.1);

  SyntheticSuite suite;
  suite.predictions = {{"exact", {}}, {"shift", {}}, {"noise", {}}, {"truncation", {}}};
  for (std::size_t c = 0; c < charts; ++c) {
    char id[32];
    std::snprintf(id, sizeof id, "chart_%03zu", c);
    const std::size_t n = length_dist(rng);
    const auto v = epicurve(n, rng);
    std::vector<std::string> dates;
    for (std::size_t i = 0; i < n; ++i) dates.push_back(iso_date(static_cast<int>(i)));
    const std::string label = kLabels[c % std::size(kLabels)];
    const StratumTags tags{{"chart_type", c % 2 == 0 ? "bar" : "line"},
                           {"cumulative", c % 3 == 0 ? "yes" : "no"},
                           {"set", "synthetic"},
                           {"source", "generator"}};

    std::vector<std::optional<double>> exact(v.begin(), v.end());
    std::vector<std::optional<double>> shifted{std::nullopt};
    shifted.insert(shifted.end(), v.begin(), v.end() - 1);
    std::vector<std::optional<double>> noisy;
    for (double x : v) noisy.push_back(std::round(x * (1.0 + noise_dist(rng))));
    std::vector<std::optional<double>> truncated(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2));

    suite.ground_truth.charts.emplace(id, table_of(id, label, dates, exact, tags));
    suite.predictions[0].second.charts.emplace(id, table_of(id, label, dates, exact, {}));
    suite.predictions[1].second.charts.emplace(id, table_of(id, label, dates, shifted, {}));
    suite.predictions[2].second.charts.emplace(id, table_of(id, label, dates, noisy, {}));
    suite.predictions[3].second.charts.emplace(id, table_of(id, label, dates, truncated, {}));
  }
  return suite;
}

void write_corpus(const std::filesystem::path& dir, const Corpus& corpus, TableFormat format) {
  std::filesystem::create_directories(dir);
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [id, table] : corpus.charts) {
    const auto path = dir / (id + std::string(extension_for(format)));
    std::ofstream out(path, std::ios::binary);
    out << serialize_table(table, format);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    if (!table.meta.empty()) meta[id] = table.meta;
  }
  if (!meta.empty()) {
    std::ofstream out(dir / "meta.json", std::ios::binary);
    out << meta.dump(2) << '\n';
    if (!out) throw Error(ErrorKind::Io, "cannot write meta.json");
  }
}

}  // namespace ecs
