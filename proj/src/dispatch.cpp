#include "uc/dispatch.hpp"

#include <algorithm>
#include <cmath>

namespace uc {

namespace {

struct Segment {
  int g;
  int seg;  // index into the piecewise curve
  double width;
  double slope;  // $/MWh
};

constexpr double kTol = 1e-12;

}  // namespace

DispatchResult dispatch(const ProblemInstance& inst,
                        const std::vector<int>& committed, double net_demand,
                        double reserve_mw) {
  const int G = inst.num_generators();
  if (static_cast<int>(committed.size()) != G)
    throw InvalidArgument("dispatch: committed-set size mismatch");

  DispatchResult result;
  result.p_above_min.assign(G, 0.0);

  double base = 0.0;
  double headroom = 0.0;
  std::vector<Segment> segments;
  for (int g = 0; g < G; ++g) {
    if (!committed[g]) continue;
    base += inst.generators[g].p_min;
    headroom += inst.generators[g].p_max - inst.generators[g].p_min;
    const PiecewiseCost& pw = inst.costs[g];
    for (int l = 0; l + 1 < pw.num_points(); ++l) {
      const double width = pw.power[l + 1] - pw.power[l];
      segments.push_back(
          {g, l, width, (pw.cost[l + 1] - pw.cost[l]) / width});
    }
  }

  double residual = net_demand - base;
  if (residual < -kTol) {
    // Committed minimum exceeds net demand: curtail wind for the surplus.
    result.wind_curtail = -residual;
    residual = 0.0;
  } else if (residual < 0.0) {
    residual = 0.0;
  }

  // Aggregate output cap from an explicit reserve requirement.
  double cap = headroom;
  if (reserve_mw > 0.0) cap = std::max(0.0, headroom - reserve_mw);

  std::sort(segments.begin(), segments.end(),
            [](const Segment& a, const Segment& b) {
              if (a.slope != b.slope) return a.slope < b.slope;
              if (a.g != b.g) return a.g < b.g;
              return a.seg < b.seg;
            });

  double variable_fuel = 0.0;  // $/h
  std::optional<double> lambda;
  if (result.wind_curtail == 0.0) {
    if (residual == 0.0 && !segments.empty() &&
        segments.front().slope < inst.c_load_shed)
      lambda = segments.front().slope;
    size_t i = 0;
    while (residual > kTol && i < segments.size() &&
           segments[i].slope < inst.c_load_shed && cap > kTol) {
      // Group of equal-slope segments; ties split pro-rata by width.
      size_t j = i;
      double group_width = 0.0;
      while (j < segments.size() && segments[j].slope == segments[i].slope) {
        group_width += segments[j].width;
        ++j;
      }
      const double take = std::min({residual, group_width, cap});
      const double frac = take / group_width;
      for (size_t k = i; k < j; ++k) {
        const double amount = segments[k].width * frac;
        result.p_above_min[segments[k].g] += amount;
        variable_fuel += segments[k].slope * amount;
      }
      residual -= take;
      cap -= take;
      lambda = segments[i].slope;
      i = j;
    }
    if (residual > kTol) {
      result.load_shed = residual;
      lambda.reset();
    }
  }
  result.marginal_lambda = lambda;

  double no_load = 0.0;
  for (int g = 0; g < G; ++g)
    if (committed[g]) no_load += inst.costs[g].no_load_cost();
  result.fuel_cost = inst.dt_hours * (no_load + variable_fuel);
  return result;
}

double period_cost(const ProblemInstance& inst,
                   const std::vector<int>& committed,
                   const DispatchResult& result, const std::vector<int>& starts) {
  const int G = inst.num_generators();
  if (static_cast<int>(committed.size()) != G ||
      static_cast<int>(starts.size()) != G)
    throw InvalidArgument("period_cost: size mismatch");
  double cost = result.fuel_cost +
                inst.dt_hours * (inst.c_load_shed * result.load_shed +
                                 inst.c_wind_curtail * result.wind_curtail);
  for (int g = 0; g < G; ++g)
    if (starts[g]) cost += inst.generators[g].startup_cost;
  return cost;
}

}  // namespace uc
