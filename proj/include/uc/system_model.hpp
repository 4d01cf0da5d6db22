#pragma once

#include <string>
#include <vector>

#include "uc/arma.hpp"
#include "uc/common.hpp"

namespace uc {

/// One thermal unit: quadratic fuel curve a + b*P + c*P^2 ($/h), operating
/// limits, minimum up/down times (hours) and initial status.
struct Generator {
  std::string id;
  double p_min = 0.0;  // MW
  double p_max = 0.0;  // MW
  double cost_a = 0.0;  // $/h
  double cost_b = 0.0;  // $/MWh
  double cost_c = 0.0;  // $/MW^2 h
  double startup_cost = 0.0;  // $
  double min_up = 0.0;    // h
  double min_down = 0.0;  // h
  bool initially_on = false;
  double initial_up_time = 0.0;    // h already on
  double initial_down_time = 0.0;  // h already off

  void check_valid(double dt_hours) const;
};

/// Convex piecewise-linear production cost: ordered breakpoints
/// (P_l, CP_l) with P_1 = p_min and P_L = p_max.
struct PiecewiseCost {
  std::string generator_id;
  std::vector<double> power;  // MW, strictly increasing
  std::vector<double> cost;   // $/h, nondecreasing, convex

  int num_points() const { return static_cast<int>(power.size()); }
  int num_segments() const { return num_points() - 1; }
  double no_load_cost() const { return cost.front(); }
  /// Cost at output p_min + above_min, linear interpolation on the curve,
  /// relative to the no-load point ($/h).
  double cost_above_min(double above_min) const;

  void check_valid(const Generator& g) const;
};

/// A fleet plus one day's forecasts and uncertainty parameters.
struct ProblemInstance {
  std::vector<Generator> generators;
  std::vector<PiecewiseCost> costs;  // aligned with generators
  int T = 48;
  double dt_hours = 0.5;
  std::vector<double> demand;  // MW per t
  std::vector<double> wind;    // MW per t
  double c_load_shed = 10000.0;     // $/MWh
  double c_wind_curtail = 40.0;     // $/MWh
  ArmaSpec demand_arma;
  ArmaSpec wind_arma;

  int num_generators() const { return static_cast<int>(generators.size()); }
  double fleet_p_max() const;
  void check_valid() const;

  // Up/down times in integer steps. Minimum times round up (conservative);
  // elapsed initial times round down.
  int min_up_steps(int g) const;
  int min_down_steps(int g) const;
  int initial_up_steps(int g) const;
  int initial_down_steps(int g) const;
};

/// Binary commitment matrix u[g][t] with derived startup/shutdown
/// indicators v, w consistent with the initial statuses.
struct Schedule {
  std::vector<std::vector<int>> u;
  std::vector<std::vector<int>> v;
  std::vector<std::vector<int>> w;

  static Schedule from_u(std::vector<std::vector<int>> u,
                         const std::vector<Generator>& fleet);

  int num_generators() const { return static_cast<int>(u.size()); }
  int num_periods() const { return u.empty() ? 0 : static_cast<int>(u[0].size()); }
  bool operator==(const Schedule&) const = default;
};

struct ConstraintViolation {
  int generator = -1;
  int timestep = -1;       // 0-based; -1 when not period-specific
  std::string constraint;  // e.g. "min-down-initial"
  std::string detail;
};

struct FeasibilityVerdict {
  bool ok = false;
  std::vector<ConstraintViolation> violations;
};

/// Extends a base fleet to n_target units; unit k copies base[k mod B] and
/// receives a fresh unique id. Forecasts are not scaled here.
std::vector<Generator> duplicate_fleet(const std::vector<Generator>& base,
                                       int n_target);

/// Evenly spaced breakpoints over [p_min, p_max] evaluated on the quadratic
/// fuel curve. Requires a convex curve (cost_c >= 0).
PiecewiseCost piecewise_from_quadratic(const Generator& gen, int n_segments);

/// Checks the minimum up/down-time and initial-condition constraints; each
/// violation names the generator, timestep and constraint.
FeasibilityVerdict validate_schedule(const Schedule& s,
                                     const ProblemInstance& inst);

// --- file interfaces ---

/// Fleet file: JSON array of generator records.
std::vector<Generator> load_fleet(const std::string& path);
void save_fleet(const std::vector<Generator>& fleet, const std::string& path);

/// Day instance file: CSV with header `period,demand_mw,wind_mw`.
struct DaySeries {
  std::vector<double> demand;
  std::vector<double> wind;
};
DaySeries load_day(const std::string& path);
void save_day(const DaySeries& day, const std::string& path);

/// Schedule file: CSV, G rows x T columns of 0/1, row order = fleet order.
std::vector<std::vector<int>> load_schedule_u(const std::string& path);
void save_schedule_u(const std::vector<std::vector<int>>& u,
                     const std::string& path);

}  // namespace uc
