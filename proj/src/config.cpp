#include "tsrvlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "tsrvlab/error.hpp"
#include "tsrvlab/estimators.hpp"

namespace tsrv {

namespace {

std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep)
{
  std::vector<std::string> out;
  if (trim(s).empty())
    return out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos)
      break;
    pos = next + 1;
  }
  return out;
}

std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& s)
{
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw ConfigError(key, "expected a finite number, got '" + s + "'");
  return v;
}

long long to_integer(const std::string& key, const std::string& s)
{
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end) {
    // Accept integral values written in floating notation, e.g. 1e5.
    const double d = to_double(key, s);
    if (d != std::floor(d) || std::abs(d) > 9e18)
      throw ConfigError(key, "expected an integer, got '" + s + "'");
    return static_cast<long long>(d);
  }
  return v;
}

Eigen::Index to_auto_index(const std::string& key, const std::string& s)
{
  if (s == "auto")
    return 0;
  const auto v = to_integer(key, s);
  if (v <= 0)
    throw ConfigError(key, "must be a positive integer or 'auto'");
  return static_cast<Eigen::Index>(v);
}

bool to_bool(const std::string& key, const std::string& s)
{
  if (s == "true" || s == "1" || s == "yes")
    return true;
  if (s == "false" || s == "0" || s == "no")
    return false;
  throw ConfigError(key, "expected true or false, got '" + s + "'");
}

template <class T, class F>
std::string join(const std::vector<T>& xs, F f)
{
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i)
      out += ',';
    out += f(xs[i]);
  }
  return out;
}

std::string auto_or(Eigen::Index v)
{
  return v == 0 ? std::string("auto") : std::to_string(v);
}

struct Field
{
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

Field double_field(std::string key, double ExperimentConfig::*m)
{
  return {key, [m](const ExperimentConfig& c) { return fmt(c.*m); },
          [m, key](ExperimentConfig& c, const std::string& v) { c.*m = to_double(key, v); }};
}

Field threshold_field(std::string key, double Thresholds::*m)
{
  return {key, [m](const ExperimentConfig& c) { return fmt(c.thresholds.*m); },
          [m, key](ExperimentConfig& c, const std::string& v) { c.thresholds.*m = to_double(key, v); }};
}

const std::vector<Field>& fields()
{
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back({"experiment", [](const ExperimentConfig& c) { return to_string(c.experiment); },
                 [](ExperimentConfig& c, const std::string& v) {
                   try {
                     c.experiment = parse_experiment_kind(v);
                   } catch (const DomainError& e) {
                     throw ConfigError("experiment", e.what());
                   }
                 }});
    t.push_back({"mu", [](const ExperimentConfig& c) { return fmt(c.model.mu); },
                 [](ExperimentConfig& c, const std::string& v) { c.model.mu = to_double("mu", v); }});
    t.push_back({"sigma", [](const ExperimentConfig& c) { return fmt(c.model.sigma); },
                 [](ExperimentConfig& c, const std::string& v) { c.model.sigma = to_double("sigma", v); }});
    t.push_back({"x0", [](const ExperimentConfig& c) { return fmt(c.model.x0); },
                 [](ExperimentConfig& c, const std::string& v) { c.model.x0 = to_double("x0", v); }});
    t.push_back({"schedule",
                 [](const ExperimentConfig& c) {
                   return join(c.model.schedule, [](const CoefficientPiece& p) {
                     return fmt(p.start) + ":" + fmt(p.mu) + ":" + fmt(p.sigma);
                   });
                 },
                 [](ExperimentConfig& c, const std::string& v) {
                   c.model.schedule.clear();
                   for (const auto& item : split(v, ',')) {
                     const auto parts = split(item, ':');
                     if (parts.size() != 3)
                       throw ConfigError("schedule", "expected start:mu:sigma, got '" + item + "'");
                     c.model.schedule.push_back({to_double("schedule", parts[0]), to_double("schedule", parts[1]),
                                                 to_double("schedule", parts[2])});
                   }
                 }});
    t.push_back({"n", [](const ExperimentConfig& c) { return std::to_string(c.grid.n); },
                 [](ExperimentConfig& c, const std::string& v) { c.grid.n = to_integer("n", v); }});
    t.push_back({"horizon", [](const ExperimentConfig& c) { return fmt(c.grid.horizon); },
                 [](ExperimentConfig& c, const std::string& v) { c.grid.horizon = to_double("horizon", v); }});
    t.push_back({"kernel", [](const ExperimentConfig& c) { return to_string(c.kernel); },
                 [](ExperimentConfig& c, const std::string& v) {
                   try {
                     c.kernel = parse_kernel_kind(v);
                   } catch (const DomainError& e) {
                     throw ConfigError("kernel", e.what());
                   }
                 }});
    t.push_back(double_field("gamma", &ExperimentConfig::gamma));
    t.push_back(double_field("alpha", &ExperimentConfig::alpha));
    t.push_back(double_field("c", &ExperimentConfig::c));
    t.push_back({"K", [](const ExperimentConfig& c) { return auto_or(c.K); },
                 [](ExperimentConfig& c, const std::string& v) { c.K = to_auto_index("K", v); }});
    t.push_back({"replications", [](const ExperimentConfig& c) { return std::to_string(c.replications); },
                 [](ExperimentConfig& c, const std::string& v) { c.replications = to_integer("replications", v); }});
    t.push_back({"seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
                 [](ExperimentConfig& c, const std::string& v) {
                   const auto* end = v.data() + v.size();
                   std::uint64_t s = 0;
                   const auto [ptr, ec] = std::from_chars(v.data(), end, s);
                   if (v.empty() || ec != std::errc{} || ptr != end)
                     throw ConfigError("seed", "expected an unsigned 64-bit integer, got '" + v + "'");
                   c.seed = s;
                 }});
    t.push_back({"refine", [](const ExperimentConfig& c) { return auto_or(c.refine); },
                 [](ExperimentConfig& c, const std::string& v) { c.refine = to_auto_index("refine", v); }});
    t.push_back({"gammas", [](const ExperimentConfig& c) { return join(c.gammas, fmt); },
                 [](ExperimentConfig& c, const std::string& v) {
                   c.gammas.clear();
                   for (const auto& s : split(v, ','))
                     c.gammas.push_back(to_double("gammas", s));
                 }});
    t.push_back({"n_list",
                 [](const ExperimentConfig& c) {
                   return join(c.n_list, [](Eigen::Index n) { return std::to_string(n); });
                 },
                 [](ExperimentConfig& c, const std::string& v) {
                   c.n_list.clear();
                   for (const auto& s : split(v, ','))
                     c.n_list.push_back(to_integer("n_list", s));
                 }});
    t.push_back({"draws", [](const ExperimentConfig& c) { return std::to_string(c.draws); },
                 [](ExperimentConfig& c, const std::string& v) { c.draws = to_integer("draws", v); }});
    t.push_back({"adjust", [](const ExperimentConfig& c) { return std::string(c.adjust ? "true" : "false"); },
                 [](ExperimentConfig& c, const std::string& v) { c.adjust = to_bool("adjust", v); }});
    t.push_back({"output", [](const ExperimentConfig& c) { return c.output; },
                 [](ExperimentConfig& c, const std::string& v) { c.output = v; }});
    t.push_back(threshold_field("thm1_mean_abs_max", &Thresholds::thm1_mean_abs_max));
    t.push_back(threshold_field("thm1_var_min", &Thresholds::thm1_var_min));
    t.push_back(threshold_field("thm1_var_max", &Thresholds::thm1_var_max));
    t.push_back(threshold_field("thm1_ks_max", &Thresholds::thm1_ks_max));
    t.push_back(threshold_field("thm2_rel_error_max", &Thresholds::thm2_rel_error_max));
    t.push_back(threshold_field("thm2_degenerate_abs", &Thresholds::thm2_degenerate_abs));
    t.push_back(threshold_field("thm3_ratio_min", &Thresholds::thm3_ratio_min));
    t.push_back(threshold_field("thm3_ratio_max", &Thresholds::thm3_ratio_max));
    t.push_back(threshold_field("fig3_reference_gamma", &Thresholds::fig3_reference_gamma));
    t.push_back(threshold_field("fig3_reference_min", &Thresholds::fig3_reference_min));
    t.push_back(threshold_field("fig3_reference_max", &Thresholds::fig3_reference_max));
    t.push_back(threshold_field("fig3_blowup_gamma", &Thresholds::fig3_blowup_gamma));
    t.push_back(threshold_field("fig3_blowup_min", &Thresholds::fig3_blowup_min));
    t.push_back(threshold_field("eq29_ratio_min", &Thresholds::eq29_ratio_min));
    t.push_back(threshold_field("eq29_ratio_max", &Thresholds::eq29_ratio_max));
    return t;
  }();
  return table;
}

bool strictly_ascending(const std::vector<double>& xs)
{
  return std::adjacent_find(xs.begin(), xs.end(), std::greater_equal<>()) == xs.end();
}

bool strictly_descending(const std::vector<double>& xs)
{
  return std::adjacent_find(xs.begin(), xs.end(), std::less_equal<>()) == xs.end();
}

void require_bracket(const char* lo_key, double lo, double hi)
{
  if (!(lo <= hi))
    throw ConfigError(lo_key, "lower threshold exceeds the upper one");
}

} // namespace

std::string to_string(ExperimentKind kind)
{
  switch (kind) {
  case ExperimentKind::Thm1: return "thm1";
  case ExperimentKind::Thm2: return "thm2";
  case ExperimentKind::Thm3: return "thm3";
  case ExperimentKind::Fig2: return "fig2";
  case ExperimentKind::Fig3: return "fig3";
  case ExperimentKind::Eq29: return "eq29";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name)
{
  for (auto k : {ExperimentKind::Thm1, ExperimentKind::Thm2, ExperimentKind::Thm3, ExperimentKind::Fig2,
                 ExperimentKind::Fig3, ExperimentKind::Eq29})
    if (to_string(k) == name)
      return k;
  throw DomainError("unknown experiment '" + std::string(name) + "' (thm1, thm2, thm3, fig2, fig3, eq29)");
}

std::string to_string(KernelKind kind)
{
  switch (kind) {
  case KernelKind::Additive: return "additive";
  case KernelKind::Rounding: return "rounding";
  case KernelKind::NoiseRound: return "noise_round";
  }
  return "unknown";
}

KernelKind parse_kernel_kind(std::string_view name)
{
  for (auto k : {KernelKind::Additive, KernelKind::Rounding, KernelKind::NoiseRound})
    if (to_string(k) == name)
      return k;
  throw DomainError("unknown kernel '" + std::string(name) + "' (additive, rounding, noise_round)");
}

ContaminationKernel ExperimentConfig::make_kernel() const
{
  switch (kernel) {
  case KernelKind::Additive: return AdditiveGaussian{gamma};
  case KernelKind::Rounding: return PureRounding{alpha};
  case KernelKind::NoiseRound: return NoiseThenRound{gamma, alpha};
  }
  throw ConfigError("kernel", "unknown kernel");
}

Eigen::Index ExperimentConfig::effective_K(Eigen::Index n) const
{
  return K > 0 ? K : select_K(n, c);
}

void ExperimentConfig::validate() const
{
  try {
    model.validate();
  } catch (const ModelError& e) {
    throw ConfigError(model.schedule.empty() ? "sigma" : "schedule", e.what());
  }
  if (!std::isfinite(model.x0))
    throw ConfigError("x0", "must be finite");
  if (grid.n < 2)
    throw ConfigError("n", "must be at least 2");
  if (!(grid.horizon > 0.0) || !std::isfinite(grid.horizon))
    throw ConfigError("horizon", "must be positive and finite");
  if (kernel != KernelKind::Rounding && !(gamma > 0.0))
    throw ConfigError("gamma", "must be positive for the " + to_string(kernel) + " kernel");
  if (!(alpha > 0.0))
    throw ConfigError("alpha", "must be positive");
  if (!(c > 0.0))
    throw ConfigError("c", "must be positive");
  if (K < 0 || K > grid.n)
    throw ConfigError("K", "must lie in [1, n] = [1, " + std::to_string(grid.n) + "] or be auto");
  if (replications < 1)
    throw ConfigError("replications", "must be at least 1");
  if (refine < 0)
    throw ConfigError("refine", "must be positive or auto");
  if (draws < 1)
    throw ConfigError("draws", "must be at least 1");
  for (double g : gammas)
    if (!(g > 0.0))
      throw ConfigError("gammas", "values must be positive");
  for (Eigen::Index m : n_list)
    if (m < 2)
      throw ConfigError("n_list", "values must be at least 2");

  switch (experiment) {
  case ExperimentKind::Thm2:
    if (gammas.empty())
      throw ConfigError("gammas", "sweep list must not be empty");
    if (!strictly_descending(gammas))
      throw ConfigError("gammas", "theorem 2 sweep must be strictly descending");
    break;
  case ExperimentKind::Fig3:
    if (gammas.empty())
      throw ConfigError("gammas", "sweep list must not be empty");
    if (!strictly_ascending(gammas))
      throw ConfigError("gammas", "figure 3 grid must be strictly ascending");
    if (gammas.back() > 0.01)
      throw ConfigError("gammas", "figure 3 grid must lie in (0, 0.01]");
    break;
  case ExperimentKind::Fig2:
    if (gammas.size() != 2 || !strictly_ascending(gammas))
      throw ConfigError("gammas", "figure 2 takes two ascending gamma values");
    break;
  case ExperimentKind::Thm3:
    if (n_list.empty())
      throw ConfigError("n_list", "sweep list must not be empty");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
      const Eigen::Index next = i + 1 < n_list.size() ? n_list[i + 1] : grid.n;
      if (next <= n_list[i] && i + 1 < n_list.size())
        throw ConfigError("n_list", "must be strictly ascending");
      if (next % n_list[i] != 0)
        throw ConfigError("n_list", std::to_string(n_list[i]) + " does not divide " + std::to_string(next) +
                                        "; the sweep must be a nested divisor chain of n");
    }
    if (K > n_list.front())
      throw ConfigError("K", "exceeds the smallest n in n_list");
    break;
  default: break;
  }

  require_bracket("thm1_var_min", thresholds.thm1_var_min, thresholds.thm1_var_max);
  require_bracket("thm3_ratio_min", thresholds.thm3_ratio_min, thresholds.thm3_ratio_max);
  require_bracket("fig3_reference_min", thresholds.fig3_reference_min, thresholds.fig3_reference_max);
  require_bracket("eq29_ratio_min", thresholds.eq29_ratio_min, thresholds.eq29_ratio_max);
}

ExperimentConfig default_config(ExperimentKind kind)
{
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
  case ExperimentKind::Thm1:
    c.kernel = KernelKind::Additive;
    c.gamma = 0.0005;
    break;
  case ExperimentKind::Thm2:
    c.kernel = KernelKind::NoiseRound;
    c.gammas = {2e-3, 5e-4, 2e-4, 5e-5};
    c.gamma = c.gammas.back();
    c.replications = 1;
    break;
  case ExperimentKind::Thm3:
    c.kernel = KernelKind::Rounding;
    c.gamma = 0.0;
    c.grid.n = 156000;
    c.n_list = {9750, 39000, 156000};
    c.refine = 4;
    c.replications = 1;
    break;
  case ExperimentKind::Fig2:
    c.kernel = KernelKind::NoiseRound;
    c.gammas = {0.001, 0.005};
    c.replications = 1;
    break;
  case ExperimentKind::Fig3:
    c.kernel = KernelKind::NoiseRound;
    c.gammas = {0.0002, 0.0003, 0.0005, 0.0007, 0.001, 0.0015, 0.002, 0.003, 0.004, 0.005, 0.006};
    c.replications = 1;
    break;
  case ExperimentKind::Eq29:
    c.kernel = KernelKind::NoiseRound;
    c.gamma = 0.0005;
    c.replications = 1;
    break;
  }
  return c;
}

const std::vector<std::string>& config_keys()
{
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& f : fields())
      k.push_back(f.key);
    return k;
  }();
  return keys;
}

KeyValues to_key_values(const ExperimentConfig& config)
{
  KeyValues kv;
  for (const auto& f : fields())
    kv.emplace_back(f.key, f.get(config));
  return kv;
}

std::string serialize_config(const ExperimentConfig& config)
{
  std::string out;
  for (const auto& [k, v] : to_key_values(config))
    out += k + " = " + v + "\n";
  return out;
}

ExperimentConfig parse_config(std::string_view text, const std::map<std::string, std::string>& overrides)
{
  std::map<std::string, std::string> values;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    if (trim(line).empty())
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
    const auto key = trim(std::string_view(line).substr(0, eq));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno), "missing key");
    if (!values.emplace(key, trim(std::string_view(line).substr(eq + 1))).second)
      throw ConfigError(key, "given more than once");
  }
  for (const auto& [k, v] : overrides)
    values[k] = v;

  const auto& keys = config_keys();
  for (const auto& [k, v] : values)
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      throw ConfigError(k, "unknown configuration key");

  const auto exp = values.find("experiment");
  if (exp == values.end())
    throw ConfigError("experiment", "required key is missing");

  ExperimentConfig config;
  fields().front().set(config, exp->second);
  config = default_config(config.experiment);
  for (const auto& f : fields())
    if (const auto it = values.find(f.key); it != values.end())
      f.set(config, it->second);
  config.validate();
  return config;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path,
                                   const std::map<std::string, std::string>& overrides)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), overrides);
}

} // namespace tsrv
