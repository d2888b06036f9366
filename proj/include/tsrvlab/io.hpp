#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tsrvlab/experiments.hpp"
#include "tsrvlab/localtime.hpp"

namespace tsrv {

/// Transaction prices in row order. Timestamps are seconds since the epoch.
struct TickSeries
{
  std::vector<double> timestamps;
  std::vector<double> prices;
  std::string label;

  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(prices.size()); }
  /// Log prices in row order, treated as equally spaced in transaction time.
  Eigen::VectorXd log_prices() const;
};

/// Reads a CSV with header "timestamp,price" and at least two rows.
/// Errors name the 1-based data row.
TickSeries parse_ticks(std::istream& in, std::string label = {});
TickSeries ingest_ticks(const std::filesystem::path& path);

void write_ticks(const TickSeries& ticks, const std::filesystem::path& path);

/// Writes `<prefix>.csv` with the rows and `<prefix>.json` with the summary.
/// Wall-clock time is recorded only when `timestamp` is set.
void write_report(const ExperimentReport& report, const std::filesystem::path& prefix, bool timestamp = false);

/// JSON summary document for a report, as written by write_report.
std::string report_json(const ExperimentReport& report, bool timestamp = false);

/// CSV with columns level,k,L,method.
void write_local_time_profile(const LocalTimeProfile& profile, const std::filesystem::path& path);

struct CsvTable
{
  std::vector<std::string> columns;
  Eigen::MatrixXd rows;
};

/// Numeric CSV with one header row.
CsvTable read_csv_table(const std::filesystem::path& path);

/// Shortest text with 17 significant digits; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double v);

} // namespace tsrv
