#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uc/forecast.hpp"
#include "uc/simplex.hpp"
#include "uc/system_model.hpp"

namespace uc {

/// Mixed-integer unit-commitment model: shared binary commitment variables
/// over per-scenario dispatch blocks, with an optional explicit reserve
/// requirement in the single-scenario (deterministic) variant. Immutable
/// once built and shareable across solver instances.
class MipModel {
 public:
  /// Scenario-weighted stochastic model over the tree's N >= 4 scenarios.
  static MipModel stochastic(const ProblemInstance& inst,
                             const ScenarioTree& tree);
  /// Single zero-error scenario plus spinning reserve R_t. Emits a warning
  /// flag when some R_t exceeds the fleet's total headroom.
  static MipModel deterministic(const ProblemInstance& inst,
                                const std::vector<double>& reserve);
  /// Single-scenario model pinned to one realised error trajectory, no
  /// reserve (the perfect-foresight solve).
  static MipModel for_realisation(const ProblemInstance& inst,
                                  const std::vector<double>& ndfe);

  const LinearProgram& lp() const { return lp_; }
  const ProblemInstance& instance() const { return inst_; }
  const ScenarioTree& tree() const { return tree_; }
  bool has_reserve() const { return !reserve_.empty(); }
  bool possibly_infeasible_reserve() const { return reserve_warning_; }

  int num_binaries() const { return 3 * G_ * T_; }
  int num_continuous() const { return lp_.num_vars() - num_binaries(); }
  int num_scenarios() const { return N_; }

  /// Binary variable indices in branching priority order (earliest period,
  /// lowest generator, u before v before w).
  const std::vector<int>& binaries() const { return binaries_; }

  int u_index(int g, int t) const { return u_[g][t]; }
  int v_index(int g, int t) const { return v_[g][t]; }
  int w_index(int g, int t) const { return w_[g][t]; }

  /// Bounds with the given schedule's binaries fixed.
  void fix_schedule(const Schedule& s, std::vector<double>& lower,
                    std::vector<double>& upper) const;

  /// Rounds the binary block of an LP solution into a schedule.
  Schedule schedule_from(const std::vector<double>& x) const;

  /// Industry-standard LP-format text dump for external cross-checking.
  std::string to_lp_format() const;

  const std::string& variable_name(int j) const { return names_[j]; }

 private:
  MipModel(const ProblemInstance& inst, ScenarioTree tree,
           std::vector<double> reserve);

  ProblemInstance inst_;
  ScenarioTree tree_;
  std::vector<double> reserve_;  // empty when no reserve constraints
  bool reserve_warning_ = false;
  int G_ = 0, T_ = 0, N_ = 0;
  LinearProgram lp_;
  std::vector<std::vector<int>> u_, v_, w_;  // [g][t]
  std::vector<int> binaries_;
  std::vector<std::string> names_;
  std::vector<std::string> row_names_;
};

struct SolveBudgets {
  long max_nodes = -1;      // < 0: unlimited
  double max_seconds = -1;  // < 0: unlimited
};

struct GapTracePoint {
  double seconds = 0.0;
  double ub = 0.0;
  double lb = 0.0;
};

struct SolveReport {
  std::optional<Schedule> incumbent;
  double ub = kInf;
  double lb = 0.0;
  double mip_gap_pct = 100.0;
  long nodes_explored = 0;
  double wall_seconds = 0.0;
  std::vector<GapTracePoint> gap_trace;
  std::string termination;  // gap-closed | node-limit | time-limit | no-incumbent

  std::string to_json() const;
};

/// Trivially feasible schedule: every unit on all day, except the leading
/// periods where a unit's remaining initial minimum down time forces it off.
Schedule vanilla_schedule(const ProblemInstance& inst);

/// Continuous relaxation with optional binary fixings (variable index,
/// 0/1). The objective is exact at the returned basis.
LpSolution solve_lp_relaxation(
    const MipModel& model,
    const std::vector<std::pair<int, int>>& fixings = {});

/// Best-bound branch-and-bound over the LP relaxation: most-fractional
/// branching, warm-startable with a feasible schedule whose objective seeds
/// the upper bound (the final incumbent is never worse). Single-worker;
/// run several instances concurrently for portfolio solves.
SolveReport branch_and_bound(const MipModel& model,
                             const std::optional<Schedule>& warm_start,
                             const SolveBudgets& budgets, std::uint64_t seed = 0);

/// The model objective of a fixed feasible schedule (the scenario-tree
/// approximation of its cost, not the Monte Carlo estimate).
double schedule_objective(const MipModel& model, const Schedule& s);

}  // namespace uc
