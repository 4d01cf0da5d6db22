#include "uc/hybrid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "uc/forecast.hpp"

namespace uc {
namespace {

std::vector<double> realised_ndfe(const ProblemInstance& inst,
                                  std::uint64_t eval_seed, int sample_index) {
  const auto ed = sample_arma(
      inst.demand_arma, inst.T,
      net_demand_error_stream_seed(eval_seed, sample_index, false));
  const auto ew = sample_arma(
      inst.wind_arma, inst.T,
      net_demand_error_stream_seed(eval_seed, sample_index, true));
  std::vector<double> ndfe(inst.T);
  for (int t = 0; t < inst.T; ++t) {
    const double d_err =
        std::max(0.0, inst.demand[t] + ed.values[t]) - inst.demand[t];
    const double w_err =
        std::max(0.0, inst.wind[t] + ew.values[t]) - inst.wind[t];
    ndfe[t] = d_err - w_err;
  }
  return ndfe;
}

void run_indexed(int n_tasks, int workers,
                 const std::function<void(int)>& task) {
  workers = std::max(1, std::min(workers, n_tasks));
  if (workers == 1) {
    for (int i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) {
        task(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

Schedule rand_schedule(const ProblemInstance& inst, std::uint64_t seed) {
  const int G = inst.num_generators(), T = inst.T;
  Rng rng(seed);
  std::vector<std::vector<int>> u(G, std::vector<int>(T, 0));
  for (int g = 0; g < G; ++g) {
    // Signed counter: periods on (positive) or off (negative) so far.
    int counter = inst.generators[g].initially_on ? inst.initial_up_steps(g)
                                                  : -inst.initial_down_steps(g);
    for (int t = 0; t < T; ++t) {
      const bool on = counter > 0;
      const bool may_switch = on ? counter >= inst.min_up_steps(g)
                                 : -counter >= inst.min_down_steps(g);
      const bool next_on = (may_switch && rng.bernoulli(0.5)) ? !on : on;
      u[g][t] = next_on ? 1 : 0;
      counter = (next_on == on) ? (on ? counter + 1 : counter - 1)
                                : (next_on ? 1 : -1);
    }
  }
  return Schedule::from_u(std::move(u), inst.generators);
}

WarmStartSet vanilla_warm_start(const ProblemInstance& inst) {
  WarmStartSet set;
  set.method = "vanilla";
  set.candidates.push_back(vanilla_schedule(inst));
  set.provenance = "all-on";
  return set;
}

WarmStartSet rand_warm_starts(const ProblemInstance& inst, int K,
                              std::uint64_t seed) {
  if (K < 1) throw InvalidArgument("rand_warm_starts: K must be >= 1");
  WarmStartSet set;
  set.method = "rand";
  set.provenance = "seed=" + hex64(seed);
  int retries = 0;
  std::uint64_t attempt = 0;
  while (static_cast<int>(set.candidates.size()) < K) {
    Schedule s = rand_schedule(inst, substream_seed(seed, attempt++, 0x5D));
    const bool dup = std::find(set.candidates.begin(), set.candidates.end(),
                               s) != set.candidates.end();
    if (dup && retries < 50) {
      ++retries;
      continue;
    }
    if (dup) set.duplicates_accepted = true;
    set.candidates.push_back(std::move(s));
  }
  return set;
}

WarmStartSet rl_warm_starts(const PolicyParams& params,
                            const ProblemInstance& inst, int K,
                            std::uint64_t seed) {
  if (K < 1) throw InvalidArgument("rl_warm_starts: K must be >= 1");
  if (params.fleet_size != inst.num_generators() ||
      params.obs_size != Observation::encoded_size(inst)) {
    throw InvalidArgument("rl_warm_starts: policy does not match the instance");
  }
  WarmStartSet set;
  set.method = "rl";
  {
    // Fingerprint the checkpoint so the provenance identifies the policy.
    std::ostringstream sig;
    sig.precision(17);
    for (double w : params.actor.parameters()) sig << w << ",";
    set.provenance =
        "seed=" + hex64(seed) + " policy=" + hex64(fnv1a64(sig.str()));
  }
  int retries = 0;
  std::uint64_t attempt = 0;
  while (static_cast<int>(set.candidates.size()) < K) {
    Rng policy_rng(substream_seed(seed, attempt++, 0x5A));
    UcEnvironment env(inst, 0, /*zero_noise=*/true);
    while (!env.done()) {
      env.step(sample_action(params, env.observe().encode(inst), policy_rng).bits);
    }
    Schedule s = Schedule::from_u(env.realised_u(), inst.generators);
    const bool dup = std::find(set.candidates.begin(), set.candidates.end(),
                               s) != set.candidates.end();
    if (dup && retries < 50) {
      ++retries;
      continue;
    }
    if (dup) set.duplicates_accepted = true;
    set.candidates.push_back(std::move(s));
  }
  return set;
}

HybridReport run_hybrid(const ProblemInstance& inst, const ScenarioTree& tree,
                        const WarmStartSet& warm_starts,
                        const SolveBudgets& budgets, int R_n_eval,
                        std::uint64_t seed, int workers) {
  const int K = static_cast<int>(warm_starts.candidates.size());
  if (K < 1) throw InvalidArgument("run_hybrid: empty warm-start set");
  if (R_n_eval < 1) throw InvalidArgument("run_hybrid: R_n_eval must be >= 1");
  for (int k = 0; k < K; ++k) {
    const auto verdict = validate_schedule(warm_starts.candidates[k], inst);
    if (!verdict.ok) {
      throw InvalidArgument("run_hybrid: warm-start candidate " +
                            std::to_string(k) + " is infeasible");
    }
  }

  const MipModel model = MipModel::stochastic(inst, tree);

  HybridReport report;
  report.method = warm_starts.method;
  report.candidates.resize(K);
  report.eval_seed = seed;
  report.eval_scenarios = R_n_eval;

  // Ordered completion records: slot k belongs to candidate k, so results
  // do not depend on thread finish order.
  run_indexed(K, workers == 0 ? K : workers, [&](int k) {
    HybridCandidateResult& r = report.candidates[k];
    r.warmstart_cost = schedule_objective(model, warm_starts.candidates[k]);
    r.solve = branch_and_bound(model, warm_starts.candidates[k], budgets,
                               substream_seed(seed, k, 0xB0));
    r.eval = evaluate_schedule(*r.solve.incumbent, inst, R_n_eval, seed);
  });

  report.selected = 0;
  for (int k = 1; k < K; ++k) {
    const auto& best = report.candidates[report.selected];
    const auto& cur = report.candidates[k];
    if (cur.eval.expected_cost < best.eval.expected_cost ||
        (cur.eval.expected_cost == best.eval.expected_cost &&
         cur.solve.mip_gap_pct < best.solve.mip_gap_pct)) {
      report.selected = k;
    }
  }
  return report;
}

std::string HybridReport::to_json() const {
  nlohmann::json j;
  j["method"] = method;
  j["selected"] = selected;
  j["eval_seed"] = eval_seed;
  j["eval_scenarios"] = eval_scenarios;
  if (std::isfinite(uncertainty_cost)) j["uncertainty_cost"] = uncertainty_cost;
  j["candidates"] = nlohmann::json::array();
  for (const auto& c : candidates) {
    nlohmann::json jc;
    jc["warmstart_cost"] = c.warmstart_cost;
    jc["solve"] = nlohmann::json::parse(c.solve.to_json());
    jc["evaluation"] = nlohmann::json::parse(c.eval.to_json());
    j["candidates"].push_back(std::move(jc));
  }
  return j.dump(2);
}

void HybridReport::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write hybrid csv: " + path);
  out << "candidate,method,warmstart_cost,final_ub,final_lb,gap_pct,eval_cost,"
         "selected\n";
  out.precision(12);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const auto& c = candidates[k];
    out << k << "," << method << "," << c.warmstart_cost << "," << c.solve.ub
        << "," << c.solve.lb << "," << c.solve.mip_gap_pct << ","
        << c.eval.expected_cost << ","
        << (static_cast<int>(k) == selected ? 1 : 0) << "\n";
  }
}

PerfectForesightResult perfect_foresight_cost(const ProblemInstance& inst,
                                              const std::vector<double>& ndfe,
                                              const SolveBudgets& budgets) {
  const MipModel model = MipModel::for_realisation(inst, ndfe);
  const SolveReport solve = branch_and_bound(model, std::nullopt, budgets);
  PerfectForesightResult result;
  result.cost = solve.ub;
  result.lb = solve.lb;
  result.exact = solve.termination == "gap-closed";
  return result;
}

BaselineResult perfect_foresight_baseline(const ProblemInstance& inst,
                                          int n_samples,
                                          std::uint64_t eval_seed,
                                          const SolveBudgets& budgets,
                                          int workers) {
  if (n_samples < 1) {
    throw InvalidArgument("perfect_foresight_baseline: need >= 1 sample");
  }
  std::vector<double> costs(n_samples, 0.0);
  bool all_exact = true;
  std::atomic<bool> any_inexact{false};
  run_indexed(n_samples, workers, [&](int r) {
    const auto pf =
        perfect_foresight_cost(inst, realised_ndfe(inst, eval_seed, r), budgets);
    costs[r] = pf.cost;
    if (!pf.exact) any_inexact = true;
  });
  all_exact = !any_inexact;

  BaselineResult out;
  out.sample_count = n_samples;
  out.all_exact = all_exact;
  for (double c : costs) out.mean_cost += c;
  out.mean_cost /= n_samples;
  if (n_samples > 1) {
    double ss = 0.0;
    for (double c : costs) ss += (c - out.mean_cost) * (c - out.mean_cost);
    out.standard_error = std::sqrt(ss / (n_samples - 1) / n_samples);
  }
  return out;
}

}  // namespace uc
