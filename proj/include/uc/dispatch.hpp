#pragma once

#include <optional>
#include <vector>

#include "uc/system_model.hpp"

namespace uc {

/// Single-period recourse allocation for a fixed commitment.
struct DispatchResult {
  /// MW above minimum per generator; zero for uncommitted units.
  std::vector<double> p_above_min;
  double load_shed = 0.0;      // MW
  double wind_curtail = 0.0;   // MW
  /// No-load cost of committed units plus dt-weighted variable fuel cost ($).
  double fuel_cost = 0.0;
  /// Common marginal price at the optimum ($/MWh); empty while shedding or
  /// curtailing.
  std::optional<double> marginal_lambda;
};

/// Cost-minimal single-period dispatch of the committed units against one
/// net-demand realisation. Outputs fill ascending segment slopes; equal
/// slopes split pro-rata by width. Demand beyond total capacity is shed,
/// demand below the committed minimum is curtailed. `committed[g]` is 0/1.
///
/// `reserve_mw`, when positive, caps total output at committed capacity
/// minus the requirement (the deterministic agent's spinning reserve).
DispatchResult dispatch(const ProblemInstance& inst,
                        const std::vector<int>& committed, double net_demand,
                        double reserve_mw = 0.0);

/// Single-period operating cost: startup charges for units with
/// `starts[g] = 1`, plus no-load and fuel, plus shed/curtailment penalties.
double period_cost(const ProblemInstance& inst,
                   const std::vector<int>& committed,
                   const DispatchResult& result, const std::vector<int>& starts);

}  // namespace uc
