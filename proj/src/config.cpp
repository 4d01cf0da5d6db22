#include "uc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace uc {

const char* kToolkitVersion = "0.1.0";

void SyntheticDaySpec::check_valid() const {
  if (T < 1) throw DataError("synthetic day: T must be >= 1");
  if (dt_hours <= 0.0) throw DataError("synthetic day: dt must be positive");
  if (demand_scale_mw <= 0.0) {
    throw DataError("synthetic day: demand scale must be positive");
  }
  if (demand_base_frac <= 0.0 || morning_peak_frac < 0.0 ||
      evening_peak_frac < 0.0 || day_noise_frac < 0.0) {
    throw DataError("synthetic day: negative shape parameter");
  }
  if (wind_capacity_mw < 0.0 || wind_walk_step < 0.0) {
    throw DataError("synthetic day: negative wind parameter");
  }
}

DaySeries synthetic_day(const SyntheticDaySpec& spec, std::uint64_t seed) {
  spec.check_valid();
  Rng rng(seed);
  // Day-to-day demand level variation, clipped so the series stays positive.
  const double level =
      std::max(0.2, 1.0 + spec.day_noise_frac *
                              std::clamp(rng.normal(), -3.0, 3.0));
  DaySeries day;
  day.demand.resize(spec.T);
  day.wind.resize(spec.T);
  for (int t = 0; t < spec.T; ++t) {
    const double h = (t + 0.5) * spec.dt_hours;  // hour of day at mid-period
    const double morning =
        (h >= 6.0 && h <= 14.0) ? std::sin(M_PI * (h - 6.0) / 8.0) : 0.0;
    const double evening =
        (h >= 15.0 && h <= 23.0) ? std::sin(M_PI * (h - 15.0) / 8.0) : 0.0;
    day.demand[t] = spec.demand_scale_mw * level *
                    (spec.demand_base_frac + spec.morning_peak_frac * morning +
                     spec.evening_peak_frac * evening);
  }
  double cf = 0.2 + 0.4 * rng.uniform01();
  for (int t = 0; t < spec.T; ++t) {
    cf = std::clamp(cf + spec.wind_walk_step * rng.normal(), 0.0, 1.0);
    day.wind[t] = spec.wind_capacity_mw * cf;
  }
  return day;
}

namespace {

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw DataError("config: bad integer for " + key + ": '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw DataError("config: bad number for " + key + ": '" + v + "'");
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    // trim
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += v[i];
  }
  return out;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "fleet_file") fleet_file = value;
  else if (key == "day_files") day_files = split_list(value);
  else if (key == "demand_arma_file") demand_arma_file = value;
  else if (key == "wind_arma_file") wind_arma_file = value;
  else if (key == "checkpoint_file") checkpoint_file = value;
  else if (key == "quantiles") {
    quantiles.clear();
    for (const auto& s : split_list(value)) quantiles.push_back(to_double(key, s));
  } else if (key == "tree_samples") tree_samples = static_cast<int>(to_long(key, value));
  else if (key == "reserve_sigma") reserve_sigma = to_double(key, value);
  else if (key == "segments") segments = static_cast<int>(to_long(key, value));
  else if (key == "eval_scenarios") eval_scenarios = static_cast<int>(to_long(key, value));
  else if (key == "baseline_samples") baseline_samples = static_cast<int>(to_long(key, value));
  else if (key == "node_budget") node_budget = to_long(key, value);
  else if (key == "time_budget_s") time_budget_s = to_double(key, value);
  else if (key == "agent") agent = value;
  else if (key == "K") K = static_cast<int>(to_long(key, value));
  else if (key == "rho") rho = to_double(key, value);
  else if (key == "la_scenarios") la_scenarios = static_cast<int>(to_long(key, value));
  else if (key == "train_iterations") train_iterations = static_cast<int>(to_long(key, value));
  else if (key == "train_episodes") train_episodes = static_cast<int>(to_long(key, value));
  else if (key == "train_epochs") train_epochs = static_cast<int>(to_long(key, value));
  else if (key == "lr_actor") lr_actor = to_double(key, value);
  else if (key == "lr_critic") lr_critic = to_double(key, value);
  else if (key == "clip_eps") clip_eps = to_double(key, value);
  else if (key == "entropy_coeff") entropy_coeff = to_double(key, value);
  else if (key == "hidden") {
    hidden.clear();
    for (const auto& s : split_list(value)) hidden.push_back(static_cast<int>(to_long(key, s)));
  } else if (key == "seed") seed = static_cast<std::uint64_t>(to_long(key, value));
  else if (key == "workers") workers = static_cast<int>(to_long(key, value));
  else if (key == "out_dir") out_dir = value;
  else if (key == "synth_T") synth.T = static_cast<int>(to_long(key, value));
  else if (key == "synth_dt_hours") synth.dt_hours = to_double(key, value);
  else if (key == "synth_demand_scale_mw") synth.demand_scale_mw = to_double(key, value);
  else if (key == "synth_demand_base_frac") synth.demand_base_frac = to_double(key, value);
  else if (key == "synth_morning_peak_frac") synth.morning_peak_frac = to_double(key, value);
  else if (key == "synth_evening_peak_frac") synth.evening_peak_frac = to_double(key, value);
  else if (key == "synth_day_noise_frac") synth.day_noise_frac = to_double(key, value);
  else if (key == "synth_wind_capacity_mw") synth.wind_capacity_mw = to_double(key, value);
  else if (key == "synth_wind_walk_step") synth.wind_walk_step = to_double(key, value);
  else throw DataError("config: unknown key '" + key + "'");
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream os;
  // `agent` is deliberately omitted: the hash identifies the experiment
  // (data, seeds, budgets), and reports aggregate different agents run
  // against the same experiment.
  os << "K=" << K << "\n";
  os << "baseline_samples=" << baseline_samples << "\n";
  os << "checkpoint_file=" << checkpoint_file << "\n";
  os << "clip_eps=" << fmt(clip_eps) << "\n";
  os << "day_files=" << join(day_files) << "\n";
  os << "demand_arma_file=" << demand_arma_file << "\n";
  os << "entropy_coeff=" << fmt(entropy_coeff) << "\n";
  os << "eval_scenarios=" << eval_scenarios << "\n";
  os << "fleet_file=" << fleet_file << "\n";
  {
    std::vector<std::string> h;
    for (int x : hidden) h.push_back(std::to_string(x));
    os << "hidden=" << join(h) << "\n";
  }
  os << "la_scenarios=" << la_scenarios << "\n";
  os << "lr_actor=" << fmt(lr_actor) << "\n";
  os << "lr_critic=" << fmt(lr_critic) << "\n";
  os << "node_budget=" << node_budget << "\n";
  {
    std::vector<std::string> q;
    for (double x : quantiles) q.push_back(fmt(x));
    os << "quantiles=" << join(q) << "\n";
  }
  os << "reserve_sigma=" << fmt(reserve_sigma) << "\n";
  os << "rho=" << fmt(rho) << "\n";
  os << "segments=" << segments << "\n";
  os << "seed=" << seed << "\n";
  os << "synth_T=" << synth.T << "\n";
  os << "synth_day_noise_frac=" << fmt(synth.day_noise_frac) << "\n";
  os << "synth_demand_base_frac=" << fmt(synth.demand_base_frac) << "\n";
  os << "synth_demand_scale_mw=" << fmt(synth.demand_scale_mw) << "\n";
  os << "synth_dt_hours=" << fmt(synth.dt_hours) << "\n";
  os << "synth_evening_peak_frac=" << fmt(synth.evening_peak_frac) << "\n";
  os << "synth_morning_peak_frac=" << fmt(synth.morning_peak_frac) << "\n";
  os << "synth_wind_capacity_mw=" << fmt(synth.wind_capacity_mw) << "\n";
  os << "synth_wind_walk_step=" << fmt(synth.wind_walk_step) << "\n";
  os << "time_budget_s=" << fmt(time_budget_s) << "\n";
  os << "train_episodes=" << train_episodes << "\n";
  os << "train_epochs=" << train_epochs << "\n";
  os << "train_iterations=" << train_iterations << "\n";
  os << "tree_samples=" << tree_samples << "\n";
  // Deliberately excluded from the fingerprint: out_dir and workers change
  // where/how results are produced, not what they are.
  return os.str();
}

void ExperimentConfig::check_valid() const {
  static const std::vector<std::string> agents = {
      "dmip",      "smip",       "rl-mf",
      "rl-la",     "hybrid-vanilla", "hybrid-rl",
      "hybrid-rand"};
  if (std::find(agents.begin(), agents.end(), agent) == agents.end()) {
    throw DataError("config: unknown agent '" + agent + "'");
  }
  if (K < 1) throw DataError("config: K must be >= 1");
  if (eval_scenarios < 1) throw DataError("config: eval_scenarios must be >= 1");
  if (baseline_samples < 1) throw DataError("config: baseline_samples must be >= 1");
  if (tree_samples < 2) throw DataError("config: tree_samples must be >= 2");
  if (rho <= 0.0 || rho > 1.0) throw DataError("config: rho must be in (0,1]");
  if (segments < 1) throw DataError("config: segments must be >= 1");
  if (workers < 1) throw DataError("config: workers must be >= 1");
  for (std::size_t i = 0; i < quantiles.size(); ++i) {
    if (quantiles[i] <= 0.0 || quantiles[i] >= 1.0 ||
        (i > 0 && quantiles[i] <= quantiles[i - 1])) {
      throw DataError("config: quantiles must be strictly ascending in (0,1)");
    }
  }
  synth.check_valid();
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DataError("config: line " + std::to_string(lineno) +
                      " is not key=value in " + path);
    }
    auto trim = [](std::string s) {
      const auto b2 = s.find_first_not_of(" \t");
      if (b2 == std::string::npos) return std::string();
      const auto e2 = s.find_last_not_of(" \t");
      return s.substr(b2, e2 - b2 + 1);
    };
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg,
                     const std::vector<std::string>& overrides) {
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw DataError("override is not key=value: '" + kv + "'");
    }
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
}

}  // namespace uc
