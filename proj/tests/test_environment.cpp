#include <cmath>
#include <vector>

#include "doctest.h"
#include "test_helpers.hpp"
#include "uc/environment.hpp"

using namespace uc;
using uc_test::make_small_instance;
using uc_test::make_unit;

namespace {

/// Plays a fixed schedule through an environment and returns the summed
/// reward.
double play_schedule(UcEnvironment& env, const std::vector<std::vector<int>>& u) {
  double total = 0.0;
  const int T = static_cast<int>(u[0].size());
  for (int t = 0; t < T; ++t) {
    std::vector<int> action(u.size());
    for (std::size_t g = 0; g < u.size(); ++g) action[g] = u[g][t];
    const auto r = env.step(action);
    CHECK(r.applied_action == action);  // the schedule must be feasible
    total += r.reward;
    CHECK(r.done == (t == T - 1));
  }
  return total;
}

std::vector<std::vector<int>> all_on(int G, int T) {
  return std::vector<std::vector<int>>(G, std::vector<int>(T, 1));
}

}  // namespace

TEST_CASE("episodes are deterministic in the seed") {
  const auto inst = make_small_instance(6, 15.0);
  UcEnvironment a(inst, 123), b(inst, 123), c(inst, 124);
  const double ra = play_schedule(a, all_on(2, 6));
  const double rb = play_schedule(b, all_on(2, 6));
  const double rc = play_schedule(c, all_on(2, 6));
  CHECK(ra == rb);
  CHECK(ra != rc);

  // reset() replays the same episode.
  a.reset(123);
  CHECK(play_schedule(a, all_on(2, 6)) == ra);
}

TEST_CASE("feasibility masking forces running counters") {
  // X: on for 1 h of a 3 h minimum up time -> forced on.
  // Y: off for 1 h of a 2 h minimum down time -> forced off.
  ProblemInstance inst;
  inst.T = 4;
  inst.dt_hours = 1.0;
  inst.generators.push_back(make_unit("X", 10, 50, 100, 20, 0.01, 50, 3, 1, true, 1));
  inst.generators.push_back(make_unit("Y", 10, 50, 100, 20, 0.01, 50, 1, 2, false, 1));
  for (const auto& g : inst.generators)
    inst.costs.push_back(piecewise_from_quadratic(g, 2));
  inst.demand.assign(4, 40.0);
  inst.wind.assign(4, 0.0);
  inst.check_valid();

  UcEnvironment env(inst, 1, /*zero_noise=*/true);
  CHECK(env.mask_action({0, 1}) == std::vector<int>{1, 0});
  CHECK(env.mask_action({1, 0}) == std::vector<int>{1, 0});

  // After stepping once the X counter reaches 2 (< 3, still forced); Y's down
  // counter reaches -2, releasing it.
  const auto r = env.step({0, 1});
  CHECK(r.applied_action == std::vector<int>{1, 0});
  CHECK(env.mask_action({0, 1}) == std::vector<int>{1, 1});

  CHECK_THROWS_AS(env.mask_action({1}), InvalidArgument);
  CHECK_THROWS_AS(env.mask_action({1, 2}), InvalidArgument);
}

TEST_CASE("up/down counters track the applied commitments") {
  const auto inst = make_small_instance(6);
  UcEnvironment env(inst, 5, true);
  CHECK(env.up_down_times() == std::vector<int>{4, -2});
  env.step({1, 1});
  CHECK(env.up_down_times() == std::vector<int>{5, 1});
  env.step({1, 0});
  CHECK(env.up_down_times() == std::vector<int>{6, -1});
  env.step({0, 0});
  CHECK(env.up_down_times() == std::vector<int>{-1, -2});
}

TEST_CASE("zero-noise episode reward equals the deterministic cost") {
  const auto inst = make_small_instance(6, 25.0);
  const auto u = all_on(2, 6);
  const Schedule s = Schedule::from_u(u, inst.generators);

  UcEnvironment env(inst, 999, /*zero_noise=*/true);
  const double reward = play_schedule(env, u);

  // Deterministic cost via the Monte Carlo evaluator with the noise off.
  auto quiet = inst;
  quiet.demand_arma.sigma = 0.0;
  quiet.wind_arma.sigma = 0.0;
  const auto report = evaluate_schedule(s, quiet, 3, 42);
  CHECK(-reward == doctest::Approx(report.expected_cost).epsilon(1e-12));
  CHECK(report.standard_error == 0.0);
  for (double c : report.per_scenario_costs)
    CHECK(c == doctest::Approx(report.expected_cost));
}

TEST_CASE("an episode is the evaluator's scenario 0 with the same seed") {
  const auto inst = make_small_instance(6, 18.0);
  const auto u = all_on(2, 6);
  const Schedule s = Schedule::from_u(u, inst.generators);
  for (std::uint64_t seed : {3ull, 17ull, 250000ull}) {
    UcEnvironment env(inst, seed);
    const double reward = play_schedule(env, u);
    const auto report = evaluate_schedule(s, inst, 1, seed);
    CAPTURE(seed);
    CHECK(-reward == doctest::Approx(report.expected_cost).epsilon(1e-10));
  }
}

TEST_CASE("observation encoding is bounded and has the documented size") {
  const auto inst = make_small_instance(8, 10.0);
  UcEnvironment env(inst, 4);
  for (int t = 0; t < 8; ++t) {
    const auto obs = env.observe();
    CHECK(obs.timestep == t);
    CHECK(obs.horizon == 8);
    REQUIRE(static_cast<int>(obs.demand_window.size()) ==
            Observation::kWindowPeriods);
    const auto x = obs.encode(inst);
    REQUIRE(static_cast<int>(x.size()) == Observation::encoded_size(inst));
    for (double v : x) {
      CHECK(v <= 1.0 + 1e-12);
      CHECK(v >= -1.0 - 1e-12);
    }
    env.step({1, 1});
  }
  CHECK(env.done());
  CHECK_THROWS_AS(env.step({1, 1}), InvalidArgument);
  // The forecast window clamps at the horizon: last observation repeats the
  // final period.
  UcEnvironment tail(inst, 4);
  for (int t = 0; t < 7; ++t) tail.step({1, 1});
  const auto obs = tail.observe();
  for (double d : obs.demand_window) CHECK(d == inst.demand[7]);
}

TEST_CASE("reward transform fixed points and monotonicity") {
  const double kappa = 5000.0;
  CHECK(transform_reward(0.0, kappa) == 0.0);
  // raw = -kappa (e - 1) maps to exactly -1.
  CHECK(transform_reward(-kappa * (std::exp(1.0) - 1.0), kappa) ==
        doctest::Approx(-1.0).epsilon(1e-12));
  double prev = 1.0;
  for (double raw = 0.0; raw >= -1e6; raw -= 12345.0) {
    const double r = transform_reward(raw, kappa);
    CHECK(r < prev);
    prev = r;
  }
  CHECK_THROWS_AS(transform_reward(1.0, kappa), InvalidArgument);
}

TEST_CASE("default reward scale equals full-output fleet cost") {
  const auto inst = make_small_instance(6);
  // A at 200 MW: 300 + 18*200 + 0.01*200^2 = 4300; B at 90 MW:
  // 120 + 25*90 + 0.02*90^2 = 2532. Piecewise chords are exact at endpoints.
  CHECK(default_reward_scale(inst) == doctest::Approx(4300.0 + 2532.0));
}

TEST_CASE("evaluator: all-off schedule cost has a closed form") {
  auto inst = make_small_instance(6, 30.0);
  std::vector<std::vector<int>> u(2, std::vector<int>(6, 0));
  const Schedule s = Schedule::from_u(u, inst.generators);

  const auto report = evaluate_schedule(s, inst, 16, 77);
  // Every scenario sheds max(net, 0) and curtails max(-net, 0); reproduce
  // scenario costs from the published error streams.
  for (int r = 0; r < 16; ++r) {
    const auto eta_d = sample_arma(inst.demand_arma, inst.T,
                                   net_demand_error_stream_seed(77, r, false));
    const auto eta_w = sample_arma(inst.wind_arma, inst.T,
                                   net_demand_error_stream_seed(77, r, true));
    double expect = 0.0;
    for (int t = 0; t < 6; ++t) {
      const double net = std::max(0.0, inst.demand[t] + eta_d.values[t]) -
                         std::max(0.0, inst.wind[t] + eta_w.values[t]);
      expect += inst.dt_hours * (net >= 0 ? inst.c_load_shed * net
                                          : -inst.c_wind_curtail * net);
    }
    CHECK(report.per_scenario_costs[r] ==
          doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("evaluator is independent of worker count and scenario budget") {
  const auto inst = make_small_instance(6, 20.0);
  const Schedule s = Schedule::from_u(all_on(2, 6), inst.generators);
  const auto serial = evaluate_schedule(s, inst, 24, 9, 1);
  const auto parallel = evaluate_schedule(s, inst, 24, 9, 4);
  CHECK(serial.per_scenario_costs == parallel.per_scenario_costs);
  CHECK(serial.expected_cost == parallel.expected_cost);

  // Scenario r does not depend on R_n.
  const auto small = evaluate_schedule(s, inst, 6, 9);
  for (int r = 0; r < 6; ++r)
    CHECK(small.per_scenario_costs[r] == serial.per_scenario_costs[r]);

  CHECK_THROWS_AS(evaluate_schedule(s, inst, 0, 9), InvalidArgument);
}

TEST_CASE("evaluator rejects infeasible schedules with the violation list") {
  const auto inst = make_small_instance(6);
  // B turns on for a single period at t=2 twice violating nothing; instead
  // toggle A off/on within its 2 h minimum down time.
  std::vector<std::vector<int>> u = {{1, 0, 1, 1, 1, 1}, {0, 0, 0, 0, 0, 0}};
  const Schedule s = Schedule::from_u(u, inst.generators);
  CHECK_THROWS_WITH_AS(evaluate_schedule(s, inst, 4, 1),
                       doctest::Contains("infeasible"), InvalidArgument);
}
