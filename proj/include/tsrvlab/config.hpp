#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tsrvlab/contaminate.hpp"
#include "tsrvlab/simulate.hpp"

namespace tsrv {

enum class ExperimentKind
{
  Thm1,
  Thm2,
  Thm3,
  Fig2,
  Fig3,
  Eq29,
};

std::string to_string(ExperimentKind kind);
/// Accepts thm1 | thm2 | thm3 | fig2 | fig3 | eq29.
ExperimentKind parse_experiment_kind(std::string_view name);

enum class KernelKind
{
  Additive,
  Rounding,
  NoiseRound,
};

std::string to_string(KernelKind kind);
KernelKind parse_kernel_kind(std::string_view name);

/// Pass/fail thresholds used by the experiment reports.
struct Thresholds
{
  double thm1_mean_abs_max = 0.15;
  double thm1_var_min = 0.75;
  double thm1_var_max = 1.30;
  double thm1_ks_max = 0.08;
  double thm2_rel_error_max = 0.10;
  double thm2_degenerate_abs = 1e-8;
  double thm3_ratio_min = 0.7;
  double thm3_ratio_max = 1.3;
  double fig3_reference_gamma = 0.005;
  double fig3_reference_min = 0.5;
  double fig3_reference_max = 2.0;
  double fig3_blowup_gamma = 0.0002;
  double fig3_blowup_min = 3.0;
  double eq29_ratio_min = 0.5;
  double eq29_ratio_max = 2.0;

  bool operator==(const Thresholds&) const = default;
};

struct ExperimentConfig
{
  ExperimentKind experiment = ExperimentKind::Fig3;
  ProcessModel model{};
  SamplingGrid grid{};
  KernelKind kernel = KernelKind::NoiseRound;
  double gamma = 0.005;
  double alpha = 0.01;
  /// K = round(c n^(2/3)) unless K is set explicitly.
  double c = 1.0;
  /// 0 selects K from c.
  Eigen::Index K = 0;
  Eigen::Index replications = 500;
  std::uint64_t seed = 2007;
  /// 0 applies the refinement policy of the experiment.
  Eigen::Index refine = 0;
  std::vector<double> gammas;
  std::vector<Eigen::Index> n_list;
  /// Contamination draws averaged per gamma in the figure 3 sweep.
  Eigen::Index draws = 1;
  bool adjust = false;
  std::string output;
  Thresholds thresholds{};

  ContaminationKernel make_kernel() const;
  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// K to use on a grid of n intervals.
  Eigen::Index effective_K(Eigen::Index n) const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Defaults for each experiment (sigma = 0.2, T = 1/252, n = 23400, alpha = 0.01, c = 1, ...).
ExperimentConfig default_config(ExperimentKind kind);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Every key with its value, in a fixed order.
KeyValues to_key_values(const ExperimentConfig& config);
/// Known configuration keys in serialization order.
const std::vector<std::string>& config_keys();

/// Flat "key = value" text; '#' starts a comment.
std::string serialize_config(const ExperimentConfig& config);

/// Parses config text, then applies `overrides` on top. The `experiment` key selects the
/// defaults; unknown keys are rejected. The result is validated.
ExperimentConfig parse_config(std::string_view text, const std::map<std::string, std::string>& overrides = {});
ExperimentConfig parse_config_file(const std::filesystem::path& path,
                                   const std::map<std::string, std::string>& overrides = {});

} // namespace tsrv
