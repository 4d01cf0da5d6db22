#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "uc/dispatch.hpp"
#include "uc/forecast.hpp"
#include "uc/system_model.hpp"

namespace uc {

/// Agent-visible projection of the environment state. Realised forecast
/// errors are excluded to preserve the day-ahead property.
struct Observation {
  std::vector<int> up_down_times;  // signed steps, never zero
  std::vector<double> demand_window;  // current + next few periods, MW
  std::vector<double> wind_window;
  int timestep = 0;  // 0-based decision period
  int horizon = 0;

  /// Bounded encoding for function approximation: counters clipped and
  /// scaled, forecasts scaled by fleet capacity, timestep as sin/cos.
  std::vector<double> encode(const ProblemInstance& inst) const;
  static int encoded_size(const ProblemInstance& inst);
  static constexpr int kWindowPeriods = 4;
};

struct StepResult {
  std::vector<int> applied_action;  // after feasibility masking
  double reward = 0.0;              // -period cost, $
  bool done = false;
};

/// The day-ahead scheduling MDP: one binary commitment decision per period,
/// infeasible bits masked to the forced status, reward equal to the negative
/// realised period cost. Single-owner; create one instance per episode
/// worker.
class UcEnvironment {
 public:
  UcEnvironment(const ProblemInstance& inst, std::uint64_t seed,
                bool zero_noise = false);

  void reset(std::uint64_t seed);
  StepResult step(const std::vector<int>& action);

  Observation observe() const;
  const std::vector<int>& up_down_times() const { return up_down_; }
  const std::vector<int>& current_commitment() const { return commitment_; }
  int timestep() const { return t_; }
  bool done() const { return t_ >= inst_->T; }
  const ProblemInstance& instance() const { return *inst_; }

  /// Commitments applied so far as a schedule matrix (columns 0..t-1).
  const std::vector<std::vector<int>>& realised_u() const { return realised_u_; }

  /// The action with every illegal bit overridden to its forced status.
  std::vector<int> mask_action(const std::vector<int>& action) const;

 private:
  const ProblemInstance* inst_;
  bool zero_noise_;
  std::vector<int> up_down_;     // signed step counters
  std::vector<int> commitment_;  // u at t-1 (initial status at t=0)
  std::vector<std::vector<int>> realised_u_;
  std::unique_ptr<ArmaProcess> demand_err_;
  std::unique_ptr<ArmaProcess> wind_err_;
  int t_ = 0;
};

/// Strictly monotone squashing of (negative) rewards used during training:
/// r' = -log(1 + |r|/kappa).
double transform_reward(double raw, double kappa);

/// Default reward scale: mean per-period fuel cost of the fleet at maximum
/// output.
double default_reward_scale(const ProblemInstance& inst);

/// Monte Carlo estimate of a schedule's expected operating cost.
struct EvaluationReport {
  double expected_cost = 0.0;
  std::vector<double> per_scenario_costs;
  double shed_energy_mwh = 0.0;       // mean over scenarios
  double curtailed_energy_mwh = 0.0;  // mean over scenarios
  double standard_error = 0.0;
  std::uint64_t seed = 0;
  int scenario_count = 0;

  std::string to_json() const;
};

/// Evaluates a feasible schedule over R_n seeded error scenarios; scenario r
/// uses substream (seed, r), so results are independent of evaluation
/// concurrency. Throws with the violation list for infeasible schedules.
EvaluationReport evaluate_schedule(const Schedule& s,
                                   const ProblemInstance& inst, int R_n,
                                   std::uint64_t seed, int workers = 1);

}  // namespace uc
