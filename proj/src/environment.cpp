#include "uc/environment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace uc {

std::vector<double> Observation::encode(const ProblemInstance& inst) const {
  std::vector<double> x;
  x.reserve(encoded_size(inst));
  const double capacity = inst.fleet_p_max();
  for (int g = 0; g < inst.num_generators(); ++g) {
    const int bound =
        std::max(inst.min_up_steps(g), inst.min_down_steps(g)) + 1;
    const int clipped = std::clamp(up_down_times[g], -bound, bound);
    x.push_back(static_cast<double>(clipped) / bound);
  }
  for (double d : demand_window) x.push_back(d / capacity);
  for (double w : wind_window) x.push_back(w / capacity);
  const double angle = 2.0 * M_PI * timestep / std::max(1, horizon);
  x.push_back(std::sin(angle));
  x.push_back(std::cos(angle));
  return x;
}

int Observation::encoded_size(const ProblemInstance& inst) {
  return inst.num_generators() + 2 * kWindowPeriods + 2;
}

UcEnvironment::UcEnvironment(const ProblemInstance& inst, std::uint64_t seed,
                             bool zero_noise)
    : inst_(&inst), zero_noise_(zero_noise) {
  reset(seed);
}

void UcEnvironment::reset(std::uint64_t seed) {
  const int G = inst_->num_generators();
  up_down_.resize(G);
  commitment_.resize(G);
  for (int g = 0; g < G; ++g) {
    const bool on = inst_->generators[g].initially_on;
    up_down_[g] = on ? inst_->initial_up_steps(g) : -inst_->initial_down_steps(g);
    commitment_[g] = on ? 1 : 0;
  }
  realised_u_.assign(G, {});
  demand_err_ = std::make_unique<ArmaProcess>(
      inst_->demand_arma, net_demand_error_stream_seed(seed, 0, false));
  wind_err_ = std::make_unique<ArmaProcess>(
      inst_->wind_arma, net_demand_error_stream_seed(seed, 0, true));
  t_ = 0;
}

std::vector<int> UcEnvironment::mask_action(const std::vector<int>& action) const {
  const int G = inst_->num_generators();
  if (static_cast<int>(action.size()) != G)
    throw InvalidArgument("action length does not match fleet size");
  std::vector<int> applied(G);
  for (int g = 0; g < G; ++g) {
    if (action[g] != 0 && action[g] != 1)
      throw InvalidArgument("action bits must be 0/1");
    if (up_down_[g] > 0 && up_down_[g] < inst_->min_up_steps(g))
      applied[g] = 1;  // minimum up time still running
    else if (up_down_[g] < 0 && -up_down_[g] < inst_->min_down_steps(g))
      applied[g] = 0;  // minimum down time still running
    else
      applied[g] = action[g];
  }
  return applied;
}

StepResult UcEnvironment::step(const std::vector<int>& action) {
  if (done()) throw InvalidArgument("step on a finished episode");
  StepResult out;
  out.applied_action = mask_action(action);
  const int G = inst_->num_generators();

  std::vector<int> starts(G, 0);
  for (int g = 0; g < G; ++g) {
    const int u = out.applied_action[g];
    starts[g] = (u == 1 && commitment_[g] == 0) ? 1 : 0;
    up_down_[g] = (u == 1) ? (up_down_[g] > 0 ? up_down_[g] + 1 : 1)
                           : (up_down_[g] < 0 ? up_down_[g] - 1 : -1);
    commitment_[g] = u;
    realised_u_[g].push_back(u);
  }

  const double eta_d = zero_noise_ ? 0.0 : demand_err_->step();
  const double eta_w = zero_noise_ ? 0.0 : wind_err_->step();
  const double net = std::max(0.0, inst_->demand[t_] + eta_d) -
                     std::max(0.0, inst_->wind[t_] + eta_w);

  const DispatchResult d = dispatch(*inst_, out.applied_action, net);
  out.reward = -period_cost(*inst_, out.applied_action, d, starts);
  ++t_;
  out.done = done();
  return out;
}

Observation UcEnvironment::observe() const {
  Observation obs;
  obs.up_down_times = up_down_;
  obs.timestep = t_;
  obs.horizon = inst_->T;
  for (int k = 0; k < Observation::kWindowPeriods; ++k) {
    const int t = std::min(t_ + k, inst_->T - 1);
    obs.demand_window.push_back(inst_->demand[t]);
    obs.wind_window.push_back(inst_->wind[t]);
  }
  return obs;
}

double transform_reward(double raw, double kappa) {
  if (raw > 0.0) throw InvalidArgument("transform_reward expects raw <= 0");
  return -std::log1p(-raw / kappa);
}

double default_reward_scale(const ProblemInstance& inst) {
  double total = 0.0;
  for (int g = 0; g < inst.num_generators(); ++g) {
    const PiecewiseCost& pw = inst.costs[g];
    total += inst.dt_hours *
             (pw.no_load_cost() +
              pw.cost_above_min(pw.power.back() - pw.power.front()));
  }
  return total;
}

namespace {

struct ScenarioOutcome {
  double cost = 0.0;
  double shed_mwh = 0.0;
  double curtailed_mwh = 0.0;
};

ScenarioOutcome evaluate_one_scenario(const Schedule& s,
                                      const ProblemInstance& inst,
                                      double commit_cost, std::uint64_t seed,
                                      int r) {
  const auto eta_d = sample_arma(inst.demand_arma, inst.T,
                                 net_demand_error_stream_seed(seed, r, false));
  const auto eta_w = sample_arma(inst.wind_arma, inst.T,
                                 net_demand_error_stream_seed(seed, r, true));
  const int G = inst.num_generators();
  ScenarioOutcome out;
  out.cost = commit_cost;
  std::vector<int> committed(G);
  for (int t = 0; t < inst.T; ++t) {
    for (int g = 0; g < G; ++g) committed[g] = s.u[g][t];
    const double net = std::max(0.0, inst.demand[t] + eta_d.values[t]) -
                       std::max(0.0, inst.wind[t] + eta_w.values[t]);
    const DispatchResult d = dispatch(inst, committed, net);
    // Commitment-independent recourse terms; no-load is in commit_cost.
    out.cost += d.fuel_cost - [&] {
      double no_load = 0.0;
      for (int g = 0; g < G; ++g)
        if (committed[g]) no_load += inst.costs[g].no_load_cost();
      return inst.dt_hours * no_load;
    }();
    out.cost += inst.dt_hours * (inst.c_load_shed * d.load_shed +
                                 inst.c_wind_curtail * d.wind_curtail);
    out.shed_mwh += inst.dt_hours * d.load_shed;
    out.curtailed_mwh += inst.dt_hours * d.wind_curtail;
  }
  return out;
}

}  // namespace

EvaluationReport evaluate_schedule(const Schedule& s,
                                   const ProblemInstance& inst, int R_n,
                                   std::uint64_t seed, int workers) {
  if (R_n < 1) throw InvalidArgument("evaluate_schedule: R_n must be >= 1");
  const auto verdict = validate_schedule(s, inst);
  if (!verdict.ok) {
    std::ostringstream msg;
    msg << "evaluate_schedule: infeasible schedule:";
    for (const auto& v : verdict.violations)
      msg << " [" << v.constraint << " g=" << v.generator << " t=" << v.timestep
          << "]";
    throw InvalidArgument(msg.str());
  }

  // Startup and no-load costs depend only on the commitment.
  double commit_cost = 0.0;
  for (int g = 0; g < inst.num_generators(); ++g)
    for (int t = 0; t < inst.T; ++t) {
      if (s.v[g][t]) commit_cost += inst.generators[g].startup_cost;
      if (s.u[g][t]) commit_cost += inst.dt_hours * inst.costs[g].no_load_cost();
    }

  std::vector<ScenarioOutcome> outcomes(R_n);
  workers = std::clamp(workers, 1, R_n);
  if (workers == 1) {
    for (int r = 0; r < R_n; ++r)
      outcomes[r] = evaluate_one_scenario(s, inst, commit_cost, seed, r);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (int r = w; r < R_n; r += workers)
          outcomes[r] = evaluate_one_scenario(s, inst, commit_cost, seed, r);
      });
    for (auto& th : pool) th.join();
  }

  EvaluationReport report;
  report.seed = seed;
  report.scenario_count = R_n;
  report.per_scenario_costs.reserve(R_n);
  double mean = 0.0;
  for (const auto& o : outcomes) {
    report.per_scenario_costs.push_back(o.cost);
    mean += o.cost;
    report.shed_energy_mwh += o.shed_mwh;
    report.curtailed_energy_mwh += o.curtailed_mwh;
  }
  mean /= R_n;
  report.expected_cost = mean;
  report.shed_energy_mwh /= R_n;
  report.curtailed_energy_mwh /= R_n;
  if (R_n > 1) {
    double ss = 0.0;
    for (double c : report.per_scenario_costs) ss += (c - mean) * (c - mean);
    report.standard_error = std::sqrt(ss / (R_n - 1)) / std::sqrt(double(R_n));
  }
  return report;
}

std::string EvaluationReport::to_json() const {
  nlohmann::json j = {{"expected_cost", expected_cost},
                      {"standard_error", standard_error},
                      {"shed_energy_mwh", shed_energy_mwh},
                      {"curtailed_energy_mwh", curtailed_energy_mwh},
                      {"seed", seed},
                      {"scenario_count", scenario_count},
                      {"per_scenario_costs", per_scenario_costs}};
  return j.dump(2);
}

}  // namespace uc
