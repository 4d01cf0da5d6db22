#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uc/environment.hpp"
#include "uc/mip.hpp"
#include "uc/rl.hpp"
#include "uc/system_model.hpp"

namespace uc {

/// A batch of feasible warm-start schedules for portfolio solving.
struct WarmStartSet {
  std::string method;  // vanilla | rl | rand
  std::vector<Schedule> candidates;
  std::string provenance;  // seeds / checkpoint fingerprint
  bool duplicates_accepted = false;
};

/// Random feasible schedule by constructive sampling: each unit walks the
/// horizon and flips its state with probability 1/2 whenever the minimum
/// up/down times allow, else holds. Always feasible by construction.
Schedule rand_schedule(const ProblemInstance& inst, std::uint64_t seed);

WarmStartSet vanilla_warm_start(const ProblemInstance& inst);

WarmStartSet rand_warm_starts(const ProblemInstance& inst, int K,
                              std::uint64_t seed);

/// K independent seeded policy rollouts (stochastic sampling, environment
/// masking). Duplicate schedules are resampled up to 50 extra attempts, then
/// accepted with `duplicates_accepted` set.
WarmStartSet rl_warm_starts(const PolicyParams& params,
                            const ProblemInstance& inst, int K,
                            std::uint64_t seed);

struct HybridCandidateResult {
  double warmstart_cost = 0.0;  // model objective of the warm start
  SolveReport solve;
  EvaluationReport eval;
};

struct HybridReport {
  std::string method;
  std::vector<HybridCandidateResult> candidates;
  int selected = -1;  // argmin evaluated cost; ties by lower gap, then index
  double uncertainty_cost = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t eval_seed = 0;
  int eval_scenarios = 0;

  std::string to_json() const;
  /// Flat CSV: candidate,method,warmstart_cost,final_ub,final_lb,gap_pct,
  /// eval_cost,selected.
  void save_csv(const std::string& path) const;
};

/// Launches one single-worker branch-and-bound per warm start against a
/// shared immutable stochastic model, evaluates every incumbent with the
/// same evaluation seed (paired comparison) and selects the cheapest.
/// `workers` caps concurrent solver instances (0 = one per candidate);
/// results are identical regardless of the cap.
HybridReport run_hybrid(const ProblemInstance& inst, const ScenarioTree& tree,
                        const WarmStartSet& warm_starts,
                        const SolveBudgets& budgets, int R_n_eval,
                        std::uint64_t seed, int workers = 0);

/// Exact (or bounded, when the budget runs out) optimal cost knowing one
/// realised error trajectory: a single-scenario model with no reserve.
struct PerfectForesightResult {
  double cost = 0.0;  // ub; equals the optimum when exact
  double lb = 0.0;
  bool exact = false;
};
PerfectForesightResult perfect_foresight_cost(const ProblemInstance& inst,
                                              const std::vector<double>& ndfe,
                                              const SolveBudgets& budgets);

/// Mean perfect-foresight cost over the first `n_samples` evaluation error
/// scenarios of `eval_seed` (the same substreams evaluate_schedule uses).
struct BaselineResult {
  double mean_cost = 0.0;
  double standard_error = 0.0;
  int sample_count = 0;
  bool all_exact = true;
};
BaselineResult perfect_foresight_baseline(const ProblemInstance& inst,
                                          int n_samples,
                                          std::uint64_t eval_seed,
                                          const SolveBudgets& budgets,
                                          int workers = 1);

}  // namespace uc
