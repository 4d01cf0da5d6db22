#include "uc/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace uc {

namespace {

int steps_ceil(double hours, double dt) {
  return static_cast<int>(std::ceil(hours / dt - 1e-9));
}

int steps_floor(double hours, double dt) {
  return static_cast<int>(std::floor(hours / dt + 1e-9));
}

}  // namespace

void Generator::check_valid(double dt_hours) const {
  if (!(p_min > 0.0) || !(p_min <= p_max))
    throw DataError("generator " + id + ": requires 0 < p_min <= p_max");
  if (min_up < dt_hours || min_down < dt_hours)
    throw DataError("generator " + id + ": min up/down must be >= dt");
  const bool up_pos = initial_up_time > 0.0;
  const bool down_pos = initial_down_time > 0.0;
  if (up_pos == down_pos)
    throw DataError("generator " + id +
                    ": exactly one of initial up/down time must be positive");
  if (initially_on != up_pos)
    throw DataError("generator " + id +
                    ": initial status inconsistent with initial up/down time");
}

double PiecewiseCost::cost_above_min(double above_min) const {
  const double p = power.front() + above_min;
  if (above_min < -1e-9 || p > power.back() + 1e-6)
    throw InvalidArgument("output outside piecewise range for " + generator_id);
  double total = 0.0;
  for (int l = 0; l + 1 < num_points(); ++l) {
    const double width = power[l + 1] - power[l];
    const double slope = (cost[l + 1] - cost[l]) / width;
    const double amount = std::clamp(p - power[l], 0.0, width);
    total += slope * amount;
    if (p <= power[l + 1]) break;
  }
  return total;
}

void PiecewiseCost::check_valid(const Generator& g) const {
  if (power.size() < 2 || power.size() != cost.size())
    throw DataError("piecewise cost for " + generator_id + ": needs >= 2 points");
  if (std::abs(power.front() - g.p_min) > 1e-6 ||
      std::abs(power.back() - g.p_max) > 1e-6)
    throw DataError("piecewise cost for " + generator_id +
                    ": endpoints must be p_min and p_max");
  double prev_slope = -kInf;
  for (size_t l = 0; l + 1 < power.size(); ++l) {
    const double width = power[l + 1] - power[l];
    if (width <= 0.0)
      throw DataError("piecewise cost for " + generator_id +
                      ": power points must be strictly increasing");
    const double slope = (cost[l + 1] - cost[l]) / width;
    if (slope < -1e-9 || slope < prev_slope - 1e-9)
      throw DataError("piecewise cost for " + generator_id +
                      ": slopes must be nonnegative and nondecreasing");
    prev_slope = slope;
  }
}

double ProblemInstance::fleet_p_max() const {
  double total = 0.0;
  for (const auto& g : generators) total += g.p_max;
  return total;
}

void ProblemInstance::check_valid() const {
  if (generators.empty()) throw DataError("instance has no generators");
  if (generators.size() != costs.size())
    throw DataError("instance: cost curves not aligned with generators");
  if (T <= 0 || dt_hours <= 0.0) throw DataError("instance: bad horizon");
  if (static_cast<int>(demand.size()) != T ||
      static_cast<int>(wind.size()) != T)
    throw DataError("instance: demand/wind series must have length T");
  for (double d : demand)
    if (d < 0.0) throw DataError("instance: negative demand");
  for (double w : wind)
    if (w < 0.0) throw DataError("instance: negative wind");
  if (!(c_load_shed > c_wind_curtail && c_wind_curtail > 0.0))
    throw DataError("instance: requires c_ls > c_wc > 0");
  for (size_t g = 0; g < generators.size(); ++g) {
    generators[g].check_valid(dt_hours);
    costs[g].check_valid(generators[g]);
  }
  demand_arma.check_stationary();
  wind_arma.check_stationary();
}

int ProblemInstance::min_up_steps(int g) const {
  return steps_ceil(generators[g].min_up, dt_hours);
}
int ProblemInstance::min_down_steps(int g) const {
  return steps_ceil(generators[g].min_down, dt_hours);
}
int ProblemInstance::initial_up_steps(int g) const {
  const double h = generators[g].initial_up_time;
  if (h <= 0.0) return 0;
  return std::max(1, steps_floor(h, dt_hours));
}
int ProblemInstance::initial_down_steps(int g) const {
  const double h = generators[g].initial_down_time;
  if (h <= 0.0) return 0;
  return std::max(1, steps_floor(h, dt_hours));
}

Schedule Schedule::from_u(std::vector<std::vector<int>> u,
                          const std::vector<Generator>& fleet) {
  if (u.size() != fleet.size())
    throw InvalidArgument("schedule rows do not match fleet size");
  Schedule s;
  s.u = std::move(u);
  const int G = s.num_generators();
  const int T = s.num_periods();
  s.v.assign(G, std::vector<int>(T, 0));
  s.w.assign(G, std::vector<int>(T, 0));
  for (int g = 0; g < G; ++g) {
    int prev = fleet[g].initially_on ? 1 : 0;
    for (int t = 0; t < T; ++t) {
      const int cur = s.u[g][t];
      if (cur != 0 && cur != 1)
        throw InvalidArgument("schedule entries must be 0/1");
      s.v[g][t] = std::max(cur - prev, 0);
      s.w[g][t] = std::max(prev - cur, 0);
      prev = cur;
    }
  }
  return s;
}

std::vector<Generator> duplicate_fleet(const std::vector<Generator>& base,
                                       int n_target) {
  const int B = static_cast<int>(base.size());
  if (B == 0) throw InvalidArgument("duplicate_fleet: empty base fleet");
  if (n_target < B)
    throw InvalidArgument("duplicate_fleet: n_target smaller than base fleet");
  std::vector<Generator> fleet;
  fleet.reserve(n_target);
  for (int k = 0; k < n_target; ++k) {
    Generator g = base[k % B];
    g.id = base[k % B].id + "#" + std::to_string(k / B + 1);
    fleet.push_back(std::move(g));
  }
  return fleet;
}

PiecewiseCost piecewise_from_quadratic(const Generator& gen, int n_segments) {
  if (n_segments < 1)
    throw InvalidArgument("piecewise_from_quadratic: n_segments must be >= 1");
  if (gen.cost_c < 0.0)
    throw DataError("unsupported-cost-curve: concave fuel curve for " + gen.id);
  if (gen.p_max <= gen.p_min)
    throw DataError("unsupported-cost-curve: p_min >= p_max for " + gen.id);
  PiecewiseCost pw;
  pw.generator_id = gen.id;
  for (int l = 0; l <= n_segments; ++l) {
    const double p =
        gen.p_min + (gen.p_max - gen.p_min) * static_cast<double>(l) / n_segments;
    pw.power.push_back(p);
    pw.cost.push_back(gen.cost_a + gen.cost_b * p + gen.cost_c * p * p);
  }
  return pw;
}

FeasibilityVerdict validate_schedule(const Schedule& s,
                                     const ProblemInstance& inst) {
  const int G = inst.num_generators();
  const int T = inst.T;
  if (s.num_generators() != G || s.num_periods() != T ||
      s.v.size() != s.u.size() || s.w.size() != s.u.size())
    throw InvalidArgument("validate_schedule: dimension mismatch");

  FeasibilityVerdict verdict;
  auto add = [&](int g, int t, const std::string& c, const std::string& d) {
    verdict.violations.push_back({g, t, c, d});
  };

  for (int g = 0; g < G; ++g) {
    const Generator& gen = inst.generators[g];
    const int ut = inst.min_up_steps(g);
    const int dt = inst.min_down_steps(g);
    const int u1 = gen.initially_on ? 1 : 0;

    // A1: initially-on units must remain on while their minimum up time is
    // still running.
    if (gen.initially_on) {
      const int remaining = std::min(ut - inst.initial_up_steps(g), T);
      for (int t = 0; t < remaining; ++t)
        if (s.u[g][t] != 1)
          add(g, t, "A1", "unit must stay on to satisfy initial min up time");
    } else {
      // A2: initially-off units must remain off likewise.
      const int remaining = std::min(dt - inst.initial_down_steps(g), T);
      for (int t = 0; t < remaining; ++t)
        if (s.u[g][t] != 0)
          add(g, t, "A2", "unit must stay off to satisfy initial min down time");
    }

    // A3/A4: startup/shutdown indicators consistent with commitments.
    if (s.u[g][0] - u1 != s.v[g][0] - s.w[g][0])
      add(g, 0, "A3", "v/w inconsistent with initial status transition");
    for (int t = 1; t < T; ++t)
      if (s.u[g][t] - s.u[g][t - 1] != s.v[g][t] - s.w[g][t])
        add(g, t, "A4", "v/w inconsistent with commitment transition");
    for (int t = 0; t < T; ++t)
      if (s.v[g][t] == 1 && s.w[g][t] == 1)
        add(g, t, "A4", "startup and shutdown in the same period");

    // A5: within any trailing min-up window ending at t, at most one startup
    // and the unit must be on.
    for (int t = ut - 1; t < T; ++t) {
      int sum = 0;
      for (int i = t - ut + 1; i <= t; ++i) sum += s.v[g][i];
      if (sum > s.u[g][t])
        add(g, t, "A5", "startup within min up window of an off period");
    }
    // A6: mirrored for shutdowns.
    for (int t = dt - 1; t < T; ++t) {
      int sum = 0;
      for (int i = t - dt + 1; i <= t; ++i) sum += s.w[g][i];
      if (sum > 1 - s.u[g][t])
        add(g, t, "A6", "shutdown within min down window of an on period");
    }
  }
  verdict.ok = verdict.violations.empty();
  return verdict;
}

// --- file interfaces ---

using nlohmann::json;

std::vector<Generator> load_fleet(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open fleet file: " + path);
  json j;
  in >> j;
  if (!j.is_array()) throw DataError("fleet file must be a JSON array: " + path);
  std::vector<Generator> fleet;
  for (const auto& r : j) {
    Generator g;
    g.id = r.at("id").get<std::string>();
    g.p_min = r.at("p_min").get<double>();
    g.p_max = r.at("p_max").get<double>();
    const auto& q = r.at("cost_quadratic");
    g.cost_a = q.at("a").get<double>();
    g.cost_b = q.at("b").get<double>();
    g.cost_c = q.at("c").get<double>();
    g.startup_cost = r.at("startup_cost").get<double>();
    g.min_up = r.at("min_up").get<double>();
    g.min_down = r.at("min_down").get<double>();
    g.initially_on = r.at("initial_status").get<bool>();
    g.initial_up_time = r.at("initial_up_time").get<double>();
    g.initial_down_time = r.at("initial_down_time").get<double>();
    fleet.push_back(std::move(g));
  }
  return fleet;
}

void save_fleet(const std::vector<Generator>& fleet, const std::string& path) {
  json j = json::array();
  for (const auto& g : fleet) {
    j.push_back({{"id", g.id},
                 {"p_min", g.p_min},
                 {"p_max", g.p_max},
                 {"cost_quadratic", {{"a", g.cost_a}, {"b", g.cost_b}, {"c", g.cost_c}}},
                 {"startup_cost", g.startup_cost},
                 {"min_up", g.min_up},
                 {"min_down", g.min_down},
                 {"initial_status", g.initially_on},
                 {"initial_up_time", g.initial_up_time},
                 {"initial_down_time", g.initial_down_time}});
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write fleet file: " + path);
  out << j.dump(2) << "\n";
}

DaySeries load_day(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open day file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("period,demand_mw,wind_mw", 0) != 0)
    throw DataError("day file missing header `period,demand_mw,wind_mw`: " + path);
  DaySeries day;
  int expected = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    if (std::stoi(cell) != expected)
      throw DataError("day file periods must run 1..T: " + path);
    std::getline(ls, cell, ',');
    day.demand.push_back(std::stod(cell));
    std::getline(ls, cell, ',');
    day.wind.push_back(std::stod(cell));
    ++expected;
  }
  if (day.demand.empty()) throw DataError("day file has no rows: " + path);
  return day;
}

void save_day(const DaySeries& day, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write day file: " + path);
  out << "period,demand_mw,wind_mw\n";
  out.precision(10);
  for (size_t t = 0; t < day.demand.size(); ++t)
    out << (t + 1) << "," << day.demand[t] << "," << day.wind[t] << "\n";
}

std::vector<std::vector<int>> load_schedule_u(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open schedule file: " + path);
  std::vector<std::vector<int>> u;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<int> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stoi(cell));
    if (!u.empty() && row.size() != u[0].size())
      throw DataError("schedule file rows have unequal lengths: " + path);
    u.push_back(std::move(row));
  }
  if (u.empty()) throw DataError("schedule file has no rows: " + path);
  return u;
}

void save_schedule_u(const std::vector<std::vector<int>>& u,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write schedule file: " + path);
  for (const auto& row : u) {
    for (size_t t = 0; t < row.size(); ++t)
      out << row[t] << (t + 1 < row.size() ? "," : "");
    out << "\n";
  }
}

}  // namespace uc
