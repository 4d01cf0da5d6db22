#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uc/system_model.hpp"

namespace uc {

/// Quantile-indexed net-demand-forecast-error trajectories with
/// probabilities. Immutable after construction.
struct ScenarioTree {
  std::vector<double> quantiles;      // ascending, in (0,1)
  std::vector<double> probabilities;  // sums to 1
  std::vector<std::vector<double>> ndfe;  // [T][N], MW

  int num_scenarios() const { return static_cast<int>(probabilities.size()); }
  int num_periods() const { return static_cast<int>(ndfe.size()); }

  /// Single zero-error scenario with probability 1 (the deterministic case).
  static ScenarioTree deterministic(int T);
  /// Single-scenario tree carrying one realised error trajectory.
  static ScenarioTree from_trajectory(const std::vector<double>& ndfe);
};

/// Per-sample net-demand forecast errors: demand and wind errors are sampled
/// independently, clipped so demand and wind stay nonnegative, then
/// differenced. Sample s uses an independent substream of `seed`, so results
/// do not depend on evaluation order.
std::vector<std::vector<double>> net_demand_error_samples(
    const ProblemInstance& inst, int n_samples, std::uint64_t seed);

/// Stream seed used for sample `sample_index` of the demand (wind) error
/// process; exposed so the environment and evaluator share substreams.
std::uint64_t net_demand_error_stream_seed(std::uint64_t master,
                                           std::uint64_t sample_index,
                                           bool wind);

/// Scenario probabilities from adjacent quantile spacing. Requires N >= 4;
/// the resulting probabilities are positive and sum to 1 exactly (up to
/// round-off).
std::vector<double> scenario_probabilities(const std::vector<double>& quantiles);

/// Empirical per-timestep quantiles of the net-demand forecast error over
/// `n_samples` Monte Carlo draws.
ScenarioTree build_scenario_tree(const ProblemInstance& inst,
                                 const std::vector<double>& quantiles,
                                 int n_samples, std::uint64_t seed);

/// Sample standard deviation of the net-demand forecast error per timestep.
std::vector<double> ndfe_std(const ProblemInstance& inst, int n_samples,
                             std::uint64_t seed);

/// CSV export `period,scenario,ndfe_mw,probability` for audit/plotting.
void export_scenario_tree_csv(const ScenarioTree& tree, const std::string& path);

}  // namespace uc
