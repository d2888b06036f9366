#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tsrvlab/config.hpp"

namespace tsrv {

/// One pass/fail verdict together with the threshold it was judged against.
struct CriterionCheck
{
  std::string name;
  double value = 0.0;
  std::optional<double> lo;
  std::optional<double> hi;
  bool passed = false;
  /// Human readable rule, e.g. "value <= 0.15".
  std::string rule;
};

struct ExperimentReport
{
  static constexpr const char* schema = "tsrvlab.report/1";

  std::string tag;
  std::vector<std::string> columns;
  /// One row per replication or sweep point, one column per entry of `columns`.
  Eigen::MatrixXd rows;
  std::vector<std::pair<std::string, double>> summary;
  std::vector<CriterionCheck> checks;
  /// Descriptive string metadata (kernel, refine actually used, ...).
  std::vector<std::pair<std::string, std::string>> metadata;
  KeyValues config;
  bool degenerate = false;

  bool passed() const;
  /// Summary entry by name; throws DomainError when absent.
  double summary_value(const std::string& name) const;
  const CriterionCheck* find_check(const std::string& name) const;
};

/// Standardized TSRV errors Z_m over M replications.
ExperimentReport run_thm1_clt(const ExperimentConfig& config);
/// gamma <f(X), f(X)>_T against the local time limit over a descending gamma sweep.
ExperimentReport run_thm2_sweep(const ExperimentConfig& config);
/// TSRV / sqrt(n_bar) under pure rounding against its local time limit over nested grids.
ExperimentReport run_thm3_scaling(const ExperimentConfig& config);
/// TSRV against gamma on one latent path.
ExperimentReport run_fig3_sweep(const ExperimentConfig& config);
/// Latent path, pure rounded path and f for two gamma values at the observation times.
ExperimentReport emit_fig2(const ExperimentConfig& config);
/// Pure rounding TSRV against the rescaled noise-then-round TSRV on one latent path.
ExperimentReport run_eq29_relation(const ExperimentConfig& config);

ExperimentReport run_experiment(const ExperimentConfig& config);

/// sqrt(8 n_bar gamma^2 / (sigma^2 T)).
double eq29_factor(double n_bar, double gamma, double integrated_variance);

} // namespace tsrv
