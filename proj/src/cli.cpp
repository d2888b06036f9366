#include "tsrvlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tsrvlab/config.hpp"
#include "tsrvlab/contaminate.hpp"
#include "tsrvlab/error.hpp"
#include "tsrvlab/estimators.hpp"
#include "tsrvlab/experiments.hpp"
#include "tsrvlab/io.hpp"
#include "tsrvlab/simulate.hpp"

namespace tsrv {

namespace {

using Json = nlohmann::ordered_json;

// One trading day is 1/252 year of 23400 seconds.
constexpr double seconds_per_year = 252.0 * 23400.0;

struct SimulateArgs
{
  std::string out;
  Eigen::Index n = 23400;
  double horizon = 1.0 / 252.0;
  double mu = 0.0;
  double sigma = 0.2;
  double x0 = 0.0;
  std::uint64_t seed = 2007;
  std::uint64_t stream = 0;
  std::string kernel = "noise_round";
  double gamma = 0.005;
  double alpha = 0.01;
  Eigen::Index refine = 0;
  double start = 0.0;
};

struct TsrvArgs
{
  std::string input;
  Eigen::Index K = 0;
  double c = 1.0;
  bool adjust = false;
  double horizon = 1.0 / 252.0;
};

struct ExperimentArgs
{
  std::string name;
  std::string config;
  std::string out;
  bool check = false;
  bool timestamp = false;
  std::vector<std::pair<std::string, std::string>> keys;
};

Json number(double v)
{
  return std::isfinite(v) ? Json(v) : Json(nullptr);
}

int do_simulate(const SimulateArgs& a, std::ostream& out)
{
  ProcessModel model{a.mu, a.sigma, a.x0, {}};
  SamplingGrid grid{a.n, a.horizon};
  ContaminationKernel kernel;
  switch (parse_kernel_kind(a.kernel)) {
  case KernelKind::Additive: kernel = AdditiveGaussian{a.gamma}; break;
  case KernelKind::Rounding: kernel = PureRounding{a.alpha}; break;
  case KernelKind::NoiseRound: kernel = NoiseThenRound{a.gamma, a.alpha}; break;
  }
  validate(kernel);
  const Eigen::Index refine = a.refine > 0 ? a.refine : default_refine(model, grid, kernel_gamma(kernel));
  const auto path = generate_master_path(model, grid, refine, a.seed, a.stream);
  const auto observed = contaminate_series(kernel, observation_values(path), a.seed, a.stream);

  TickSeries ticks;
  const auto alpha = kernel_alpha(kernel);
  for (Eigen::Index i = 0; i < observed.y.size(); ++i) {
    ticks.timestamps.push_back(a.start + grid.time(i) * seconds_per_year);
    ticks.prices.push_back(alpha ? static_cast<double>(observed.ticks[static_cast<std::size_t>(i)]) * *alpha
                                 : std::exp(observed.y[i]));
  }
  write_ticks(ticks, a.out);
  out << "wrote " << ticks.prices.size() << " ticks (" << describe(kernel) << ") to " << a.out << "\n";
  return ExitOk;
}

Json tsrv_json(const TickSeries& ticks, Eigen::Index K_req, double c, bool adjust, double horizon)
{
  const Eigen::VectorXd y = ticks.log_prices();
  const Eigen::Index n = y.size() - 1;
  const Eigen::Index K = K_req > 0 ? K_req : select_K(n, c);
  if (K > n)
    throw ConfigError("K", "must not exceed n = " + std::to_string(n));
  const auto res = tsrv(y, K, adjust);
  Json j;
  j["label"] = ticks.label;
  j["rows"] = ticks.size();
  j["n"] = n;
  j["horizon"] = horizon;
  j["K"] = res.K;
  j["n_bar"] = number(res.n_bar);
  j["rv_all"] = number(res.rv_all);
  j["rv_avg"] = number(res.rv_avg);
  j["tsrv"] = number(res.tsrv);
  if (res.adjusted)
    j["tsrv_adjusted"] = number(*res.adjusted);
  return j;
}

int do_tsrv(const TsrvArgs& a, std::ostream& out)
{
  const auto ticks = ingest_ticks(a.input);
  out << tsrv_json(ticks, a.K, a.c, a.adjust, a.horizon).dump(2) << "\n";
  return ExitOk;
}

int do_ingest(const TsrvArgs& a, std::ostream& out)
{
  const auto ticks = ingest_ticks(a.input);
  Json j = tsrv_json(ticks, a.K, a.c, a.adjust, a.horizon);
  j["first_timestamp"] = ticks.timestamps.front();
  j["last_timestamp"] = ticks.timestamps.back();
  j["spacing"] = "transaction time; observations treated as equally spaced over the horizon";
  out << j.dump(2) << "\n";
  return ExitOk;
}

int do_experiment(const ExperimentArgs& a, const std::map<std::string, std::string>& overrides, std::ostream& out)
{
  const auto kind = [&] {
    try {
      return parse_experiment_kind(a.name);
    } catch (const DomainError& e) {
      throw ConfigError("experiment", e.what());
    }
  }();
  ExperimentConfig cfg;
  if (a.config.empty()) {
    cfg = parse_config("experiment = " + to_string(kind) + "\n", overrides);
  } else {
    cfg = parse_config_file(a.config, overrides);
    if (cfg.experiment != kind)
      throw ConfigError("experiment", "config file selects " + to_string(cfg.experiment) + " but the command is " +
                                          to_string(kind));
  }
  if (!a.out.empty())
    cfg.output = a.out;
  const std::string prefix = cfg.output.empty() ? to_string(kind) : cfg.output;

  const auto report = run_experiment(cfg);
  write_report(report, prefix, a.timestamp);
  for (const auto& [k, v] : report.summary)
    out << k << " = " << format_number(v) << "\n";
  for (const auto& c : report.checks)
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << format_number(c.value) << " (" << c.rule << ")\n";
  out << "wrote " << prefix << ".csv and " << prefix << ".json\n";
  if (a.check && !report.passed())
    return ExitCheckFailed;
  return ExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"tsrvlab: two scales realized volatility under rounding and noise", "tsrvlab"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate an observed tick series and write it as CSV");
  simulate->add_option("--out", sim.out, "Output CSV path")->required();
  simulate->add_option("--n", sim.n, "Number of observation intervals");
  simulate->add_option("--horizon", sim.horizon, "Horizon T in years");
  simulate->add_option("--mu", sim.mu, "Drift");
  simulate->add_option("--sigma", sim.sigma, "Volatility");
  simulate->add_option("--x0", sim.x0, "Initial log price");
  simulate->add_option("--seed", sim.seed, "Seed");
  simulate->add_option("--stream", sim.stream, "Stream");
  simulate->add_option("--kernel", sim.kernel, "additive | rounding | noise_round");
  simulate->add_option("--gamma", sim.gamma, "Random error scale");
  simulate->add_option("--alpha", sim.alpha, "Tick size");
  simulate->add_option("--refine", sim.refine, "Master grid refinement (0 = default policy)");
  simulate->add_option("--start", sim.start, "First timestamp in seconds");

  TsrvArgs est;
  auto* tsrv_cmd = app.add_subcommand("tsrv", "TSRV of a tick CSV, printed as JSON");
  auto* ingest = app.add_subcommand("ingest", "Validate a tick CSV and print its summary as JSON");
  for (auto* cmd : {tsrv_cmd, ingest}) {
    cmd->add_option("--input", est.input, "Tick CSV with header timestamp,price")->required();
    cmd->add_option("--K", est.K, "Number of subgrids (default round(c n^(2/3)))");
    cmd->add_option("--c", est.c, "K selection constant");
    cmd->add_flag("--adjust", est.adjust, "Apply the small-sample adjustment");
    cmd->add_option("--horizon", est.horizon, "Horizon T in years covered by the file");
  }

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Run an experiment and write <out>.csv and <out>.json");
  experiment->add_option("name", ex.name, "thm1 | thm2 | thm3 | fig2 | fig3 | eq29")->required();
  experiment->add_option("--config", ex.config, "Config file (key = value lines)");
  experiment->add_option("--out", ex.out, "Output prefix");
  experiment->add_flag("--check", ex.check, "Exit with status 4 when a criterion fails");
  experiment->add_flag("--timestamp", ex.timestamp, "Record wall-clock time in the JSON metadata");
  ex.keys.reserve(config_keys().size());
  std::vector<CLI::Option*> key_options;
  for (const auto& key : config_keys()) {
    if (key == "experiment" || key == "output")
      continue;
    ex.keys.emplace_back(key, std::string{});
    key_options.push_back(experiment->add_option("--" + key, ex.keys.back().second, "Config key " + key));
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return ExitConfig;
  }

  try {
    if (simulate->parsed())
      return do_simulate(sim, out);
    if (tsrv_cmd->parsed())
      return do_tsrv(est, out);
    if (ingest->parsed())
      return do_ingest(est, out);
    std::map<std::string, std::string> overrides;
    for (std::size_t i = 0; i < key_options.size(); ++i)
      if (key_options[i]->count() > 0)
        overrides[ex.keys[i].first] = ex.keys[i].second;
    return do_experiment(ex, overrides, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return ExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return ExitData;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return ExitData;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << "\n";
    return ExitConfig;
  } catch (const DomainError& e) {
    err << "invalid argument: " << e.what() << "\n";
    return ExitConfig;
  } catch (const ModelError& e) {
    err << "invalid model: " << e.what() << "\n";
    return ExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return ExitFailure;
  }
}

} // namespace tsrv
