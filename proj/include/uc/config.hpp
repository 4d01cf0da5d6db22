#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uc/system_model.hpp"

namespace uc {

/// Parameters of the synthetic day generator: demand is a double-peak
/// profile (two half-sine bumps over a base load) with seeded day-to-day
/// variation; wind is a capacity-factor random walk clipped to [0, 1].
struct SyntheticDaySpec {
  int T = 48;
  double dt_hours = 0.5;
  double demand_scale_mw = 1000.0;   // overall demand scale (> 0)
  double demand_base_frac = 0.55;    // base load, fraction of scale
  double morning_peak_frac = 0.20;   // morning bump amplitude
  double evening_peak_frac = 0.30;   // evening bump amplitude
  double day_noise_frac = 0.05;      // day-to-day level noise (std, fraction)
  double wind_capacity_mw = 300.0;   // installed wind (>= 0)
  double wind_walk_step = 0.06;      // capacity-factor walk step std

  void check_valid() const;
};

/// One deterministic synthetic day; both series are nonnegative, length T.
DaySeries synthetic_day(const SyntheticDaySpec& spec, std::uint64_t seed);

/// Fully resolved experiment configuration. Serialisable as sorted
/// `key=value` lines whose FNV-1a hash fingerprints the run.
struct ExperimentConfig {
  // inputs
  std::string fleet_file;
  std::vector<std::string> day_files;
  std::string demand_arma_file;
  std::string wind_arma_file;
  std::string checkpoint_file;

  // scenario tree / uncertainty
  std::vector<double> quantiles = {0.002, 0.01,  0.1,    0.3,   0.5,
                                   0.6,   0.75,  0.9,    0.95,  0.99,
                                   0.993, 0.9967, 0.999};
  int tree_samples = 100000;
  double reserve_sigma = 4.0;  // deterministic reserve = sigma multiplier
  int segments = 4;            // piecewise segments per fuel curve

  // evaluation
  int eval_scenarios = 5000;
  int baseline_samples = 50;

  // solver budgets
  long node_budget = -1;
  double time_budget_s = -1.0;

  // agents
  std::string agent = "smip";  // dmip|smip|rl-mf|rl-la|hybrid-{vanilla,rl,rand}
  int K = 8;
  double rho = 0.05;
  int la_scenarios = 100;

  // training
  int train_iterations = 50;
  int train_episodes = 8;
  int train_epochs = 4;
  double lr_actor = 3e-4;
  double lr_critic = 1e-3;
  double clip_eps = 0.2;
  double entropy_coeff = 0.01;
  std::vector<int> hidden = {64, 64};

  // misc
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = "out";

  SyntheticDaySpec synth;

  /// Sets one key to a string value; unknown keys or unparsable values
  /// throw DataError.
  void set(const std::string& key, const std::string& value);

  /// Canonical serialisation: every key as `key=value`, fixed order.
  std::string canonical_text() const;
  std::uint64_t hash() const { return fnv1a64(canonical_text()); }

  void check_valid() const;
};

/// Parses a `key=value` config file ('#' comments, blank lines ignored)
/// over the defaults.
ExperimentConfig load_config(const std::string& path);

/// Applies `key=value` override strings (command-line wins over file).
void apply_overrides(ExperimentConfig& cfg,
                     const std::vector<std::string>& overrides);

extern const char* kToolkitVersion;

}  // namespace uc
