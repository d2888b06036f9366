#include "tsrvlab/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "tsrvlab/error.hpp"

namespace tsrv {

namespace {

using Json = nlohmann::ordered_json;

std::vector<std::string> split_csv(const std::string& line)
{
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ','))
    out.push_back(cell);
  if (!line.empty() && line.back() == ',')
    out.emplace_back();
  return out;
}

std::string strip(std::string s)
{
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t'))
    ++b;
  return s.substr(b);
}

bool parse_number(const std::string& s, double& v)
{
  if (s == "nan") {
    v = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  if (s == "inf" || s == "-inf") {
    v = s[0] == '-' ? -HUGE_VAL : HUGE_VAL;
    return true;
  }
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  return !s.empty() && ec == std::errc{} && ptr == end;
}

Json number(double v)
{
  if (std::isfinite(v))
    return Json(v);
  return Json(nullptr);
}

std::ofstream open_out(const std::filesystem::path& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
  out.flush();
  if (!out)
    throw IoError("write failed for " + path.string());
}

} // namespace

std::string format_number(double v)
{
  if (std::isnan(v))
    return "nan";
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Eigen::VectorXd TickSeries::log_prices() const
{
  Eigen::VectorXd y(size());
  for (Eigen::Index i = 0; i < size(); ++i)
    y[i] = std::log(prices[static_cast<std::size_t>(i)]);
  return y;
}

TickSeries parse_ticks(std::istream& in, std::string label)
{
  TickSeries t;
  t.label = std::move(label);
  std::string line;
  if (!std::getline(in, line) || strip(line) != "timestamp,price")
    throw DataError("expected header 'timestamp,price'");
  long row = 0;
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty())
      continue;
    ++row;
    const auto cells = split_csv(line);
    double ts = 0.0;
    double px = 0.0;
    if (cells.size() != 2 || !parse_number(strip(cells[0]), ts) || !parse_number(strip(cells[1]), px) ||
        !std::isfinite(ts) || !std::isfinite(px))
      throw DataError("row " + std::to_string(row) + ": expected two finite numbers, got '" + line + "'");
    if (!(px > 0.0))
      throw DataError("row " + std::to_string(row) + ": price must be positive, got " + strip(cells[1]));
    if (!t.timestamps.empty() && ts < t.timestamps.back())
      throw DataError("row " + std::to_string(row) + ": timestamp decreases");
    t.timestamps.push_back(ts);
    t.prices.push_back(px);
  }
  if (t.prices.size() < 2)
    throw DataError("need at least 2 rows, got " + std::to_string(t.prices.size()));
  return t;
}

TickSeries ingest_ticks(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string());
  return parse_ticks(in, path.stem().string());
}

void write_ticks(const TickSeries& ticks, const std::filesystem::path& path)
{
  auto out = open_out(path);
  out << "timestamp,price\n";
  for (std::size_t i = 0; i < ticks.prices.size(); ++i)
    out << format_number(ticks.timestamps[i]) << ',' << format_number(ticks.prices[i]) << '\n';
  finish(out, path);
}

void write_local_time_profile(const LocalTimeProfile& profile, const std::filesystem::path& path)
{
  auto out = open_out(path);
  out << "level,k,L,method\n";
  const auto method = to_string(profile.method);
  for (Eigen::Index i = 0; i < profile.size(); ++i)
    out << format_number(profile.levels[i]) << ',' << profile.k_lo + i << ',' << format_number(profile.local_time[i])
        << ',' << method << '\n';
  finish(out, path);
}

std::string report_json(const ExperimentReport& report, bool timestamp)
{
  Json j;
  j["schema"] = ExperimentReport::schema;
  j["experiment"] = report.tag;
  j["rows"] = report.rows.rows();
  j["columns"] = report.columns;
  Json summary = Json::object();
  for (const auto& [k, v] : report.summary)
    summary[k] = number(v);
  j["summary"] = summary;
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json e;
    e["name"] = c.name;
    e["value"] = number(c.value);
    e["lo"] = c.lo ? number(*c.lo) : Json(nullptr);
    e["hi"] = c.hi ? number(*c.hi) : Json(nullptr);
    e["rule"] = c.rule;
    e["passed"] = c.passed;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["passed"] = report.passed();
  j["degenerate"] = report.degenerate;
  Json meta = Json::object();
  for (const auto& [k, v] : report.metadata) {
    if (meta.contains(k))
      meta[k] = meta[k].get<std::string>() + "; " + v;
    else
      meta[k] = v;
  }
  if (timestamp) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    meta["generated_at"] = buf;
  }
  j["metadata"] = meta;
  Json cfg = Json::object();
  for (const auto& [k, v] : report.config)
    cfg[k] = v;
  j["config"] = cfg;
  return j.dump(2) + "\n";
}

void write_report(const ExperimentReport& report, const std::filesystem::path& prefix, bool timestamp)
{
  if (prefix.has_parent_path())
    std::filesystem::create_directories(prefix.parent_path());
  const std::filesystem::path csv = prefix.string() + ".csv";
  const std::filesystem::path json = prefix.string() + ".json";
  {
    auto out = open_out(csv);
    for (std::size_t c = 0; c < report.columns.size(); ++c)
      out << (c ? "," : "") << report.columns[c];
    out << '\n';
    for (Eigen::Index i = 0; i < report.rows.rows(); ++i) {
      for (Eigen::Index c = 0; c < report.rows.cols(); ++c)
        out << (c ? "," : "") << format_number(report.rows(i, c));
      out << '\n';
    }
    finish(out, csv);
  }
  auto out = open_out(json);
  out << report_json(report, timestamp);
  finish(out, json);
}

CsvTable read_csv_table(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line))
    throw DataError(path.string() + ": empty file");
  for (auto& c : split_csv(strip(line)))
    t.columns.push_back(strip(c));
  std::vector<double> values;
  long row = 0;
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty())
      continue;
    ++row;
    const auto cells = split_csv(line);
    if (cells.size() != t.columns.size())
      throw DataError(path.string() + ": row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                      " cells, expected " + std::to_string(t.columns.size()));
    for (const auto& c : cells) {
      double v = 0.0;
      if (!parse_number(strip(c), v))
        throw DataError(path.string() + ": row " + std::to_string(row) + ": not a number '" + c + "'");
      values.push_back(v);
    }
  }
  const auto cols = static_cast<Eigen::Index>(t.columns.size());
  t.rows.resize(row, cols);
  for (Eigen::Index i = 0; i < row; ++i)
    for (Eigen::Index c = 0; c < cols; ++c)
      t.rows(i, c) = values[static_cast<std::size_t>(i * cols + c)];
  return t;
}

} // namespace tsrv
