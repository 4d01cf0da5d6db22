// Command-line surface for the unit-commitment toolkit: synthetic data
// generation, policy training, scheduling agents, Monte Carlo evaluation,
// portfolio (hybrid) solving and result aggregation.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "uc/config.hpp"
#include "uc/forecast.hpp"
#include "uc/hybrid.hpp"
#include "uc/mip.hpp"
#include "uc/rl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNoIncumbent = 4;

struct Cli {
  uc::ExperimentConfig cfg;
  std::string config_path;
  std::vector<std::string> overrides;
};

json artifact_header(const uc::ExperimentConfig& cfg) {
  json j;
  j["config_hash"] = uc::hex64(cfg.hash());
  j["seed"] = cfg.seed;
  j["version"] = uc::kToolkitVersion;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw uc::DataError("cannot write " + path);
  out << text;
  if (text.empty() || text.back() != '\n') out << "\n";
}

uc::ProblemInstance build_instance(const uc::ExperimentConfig& cfg,
                                   const std::string& day_file) {
  uc::ProblemInstance inst;
  if (cfg.fleet_file.empty()) throw uc::DataError("config: fleet_file not set");
  inst.generators = uc::load_fleet(cfg.fleet_file);
  for (const auto& g : inst.generators) {
    inst.costs.push_back(uc::piecewise_from_quadratic(g, cfg.segments));
  }
  const uc::DaySeries day = uc::load_day(day_file);
  inst.demand = day.demand;
  inst.wind = day.wind;
  inst.T = static_cast<int>(day.demand.size());
  inst.dt_hours = cfg.synth.dt_hours;
  if (!cfg.demand_arma_file.empty())
    inst.demand_arma = uc::load_arma_spec(cfg.demand_arma_file);
  if (!cfg.wind_arma_file.empty())
    inst.wind_arma = uc::load_arma_spec(cfg.wind_arma_file);
  inst.check_valid();
  return inst;
}

std::string day_stem(const std::string& day_file) {
  return fs::path(day_file).stem().string();
}

uc::SolveBudgets budgets_of(const uc::ExperimentConfig& cfg) {
  return {cfg.node_budget, cfg.time_budget_s};
}

uc::ScenarioTree tree_of(const uc::ExperimentConfig& cfg,
                         const uc::ProblemInstance& inst) {
  return uc::build_scenario_tree(inst, cfg.quantiles, cfg.tree_samples,
                                 uc::substream_seed(cfg.seed, 0, 0x7EEE));
}

std::vector<double> reserve_of(const uc::ExperimentConfig& cfg,
                               const uc::ProblemInstance& inst) {
  std::vector<double> reserve = uc::ndfe_std(
      inst, cfg.tree_samples, uc::substream_seed(cfg.seed, 0, 0x7EEE));
  for (double& r : reserve) r *= cfg.reserve_sigma;
  return reserve;
}

// --- subcommands ---

int cmd_generate_days(const Cli& cli, int n_days) {
  const auto& cfg = cli.cfg;
  if (n_days < 1) throw uc::DataError("generate-days: n-days must be >= 1");
  fs::create_directories(cfg.out_dir);
  for (int d = 0; d < n_days; ++d) {
    const uc::DaySeries day = uc::synthetic_day(
        cfg.synth, uc::substream_seed(cfg.seed, d, 0xDA11));
    std::ostringstream name;
    name << cfg.out_dir << "/day_" << std::setw(3) << std::setfill('0') << d
         << ".csv";
    uc::save_day(day, name.str());
  }
  std::cout << "wrote " << n_days << " day files to " << cfg.out_dir << "\n";
  return kExitOk;
}

int cmd_train(const Cli& cli) {
  const auto& cfg = cli.cfg;
  if (cfg.day_files.empty()) throw uc::DataError("train: day_files not set");
  std::vector<uc::ProblemInstance> days;
  for (const auto& f : cfg.day_files) days.push_back(build_instance(cfg, f));

  uc::TrainConfig tc;
  tc.hidden = cfg.hidden;
  tc.iterations = cfg.train_iterations;
  tc.episodes_per_iteration = cfg.train_episodes;
  tc.epochs = cfg.train_epochs;
  tc.clip_eps = cfg.clip_eps;
  tc.lr_actor = cfg.lr_actor;
  tc.lr_critic = cfg.lr_critic;
  tc.entropy_coeff = cfg.entropy_coeff;
  tc.seed = cfg.seed;

  const auto t0 = std::chrono::steady_clock::now();
  const uc::TrainResult result = uc::ppo_train(days, tc);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  fs::create_directories(cfg.out_dir);
  const std::string ckpt = cfg.checkpoint_file.empty()
                               ? cfg.out_dir + "/policy.json"
                               : cfg.checkpoint_file;
  result.params.save(ckpt);
  uc::save_training_log(result.curve, cfg.out_dir + "/training_log.csv");
  json j = artifact_header(cfg);
  j["checkpoint"] = ckpt;
  j["iterations"] = cfg.train_iterations;
  j["wall_seconds"] = wall;
  j["final_mean_cost"] =
      result.curve.empty() ? 0.0 : result.curve.back().mean_cost;
  write_text(cfg.out_dir + "/train_meta.json", j.dump(2));
  std::cout << "trained policy saved to " << ckpt << "\n";
  return kExitOk;
}

uc::PolicyParams load_checkpoint(const uc::ExperimentConfig& cfg) {
  const std::string ckpt = cfg.checkpoint_file.empty()
                               ? cfg.out_dir + "/policy.json"
                               : cfg.checkpoint_file;
  if (!fs::exists(ckpt)) {
    throw uc::DataError("missing policy checkpoint: " + ckpt +
                        " (run `uc train` first or set checkpoint_file)");
  }
  return uc::PolicyParams::load(ckpt);
}

int solve_one_day(const Cli& cli, const std::string& day_file) {
  const auto& cfg = cli.cfg;
  const uc::ProblemInstance inst = build_instance(cfg, day_file);
  const uc::SolveBudgets budgets = budgets_of(cfg);
  const std::uint64_t eval_seed = uc::substream_seed(cfg.seed, 0, 0xEA1);

  const auto t0 = std::chrono::steady_clock::now();
  uc::Schedule schedule;
  json detail;
  bool have_schedule = false;

  if (cfg.agent == "smip" || cfg.agent == "dmip") {
    const uc::MipModel model =
        cfg.agent == "smip"
            ? uc::MipModel::stochastic(inst, tree_of(cfg, inst))
            : uc::MipModel::deterministic(inst, reserve_of(cfg, inst));
    const uc::SolveReport report =
        uc::branch_and_bound(model, uc::vanilla_schedule(inst), budgets);
    detail["solve"] = json::parse(report.to_json());
    if (!report.incumbent) {
      json j = artifact_header(cfg);
      j["agent"] = cfg.agent;
      j["day"] = day_file;
      j["detail"] = detail;
      fs::create_directories(cfg.out_dir);
      write_text(cfg.out_dir + "/result_" + cfg.agent + "_" +
                     day_stem(day_file) + ".json",
                 j.dump(2));
      std::cerr << "budget exhausted without an incumbent\n";
      return kExitNoIncumbent;
    }
    schedule = *report.incumbent;
    have_schedule = true;
  } else if (cfg.agent == "rl-mf" || cfg.agent == "rl-la") {
    const uc::PolicyParams params = load_checkpoint(cfg);
    schedule = cfg.agent == "rl-mf"
                   ? uc::rl_mf_solve(params, inst)
                   : uc::rl_la_solve(params, inst, cfg.rho, cfg.la_scenarios,
                                     uc::substream_seed(cfg.seed, 0, 0x1A));
    have_schedule = true;
  } else if (cfg.agent.rfind("hybrid-", 0) == 0) {
    const std::string method = cfg.agent.substr(7);
    uc::WarmStartSet ws;
    if (method == "vanilla") {
      ws = uc::vanilla_warm_start(inst);
    } else if (method == "rand") {
      ws = uc::rand_warm_starts(inst, cfg.K,
                                uc::substream_seed(cfg.seed, 0, 0x44));
    } else {
      ws = uc::rl_warm_starts(load_checkpoint(cfg), inst, cfg.K,
                              uc::substream_seed(cfg.seed, 0, 0x55));
    }
    uc::HybridReport hybrid =
        uc::run_hybrid(inst, tree_of(cfg, inst), ws, budgets,
                       cfg.eval_scenarios, eval_seed, cfg.workers);
    const uc::BaselineResult baseline = uc::perfect_foresight_baseline(
        inst, cfg.baseline_samples, eval_seed, budgets, cfg.workers);
    hybrid.uncertainty_cost =
        hybrid.candidates[hybrid.selected].eval.expected_cost -
        baseline.mean_cost;
    fs::create_directories(cfg.out_dir);
    const std::string stem =
        cfg.out_dir + "/hybrid_" + method + "_" + day_stem(day_file);
    write_text(stem + ".json", hybrid.to_json());
    hybrid.save_csv(stem + ".csv");
    detail["hybrid"] = json::parse(hybrid.to_json());
    detail["baseline"] = {{"mean_cost", baseline.mean_cost},
                          {"standard_error", baseline.standard_error},
                          {"samples", baseline.sample_count},
                          {"all_exact", baseline.all_exact}};
    schedule = *hybrid.candidates[hybrid.selected].solve.incumbent;
    have_schedule = true;
  } else {
    throw uc::DataError("unknown agent: " + cfg.agent);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  (void)have_schedule;

  // Common-seed evaluation plus the perfect-foresight baseline used for
  // normalised reporting.
  const uc::EvaluationReport eval = uc::evaluate_schedule(
      schedule, inst, cfg.eval_scenarios, eval_seed, cfg.workers);
  json jbase;
  if (!detail.contains("baseline")) {
    const uc::BaselineResult baseline = uc::perfect_foresight_baseline(
        inst, cfg.baseline_samples, eval_seed, budgets, cfg.workers);
    jbase = {{"mean_cost", baseline.mean_cost},
             {"standard_error", baseline.standard_error},
             {"samples", baseline.sample_count},
             {"all_exact", baseline.all_exact}};
  } else {
    jbase = detail["baseline"];
  }

  fs::create_directories(cfg.out_dir);
  const std::string stem = cfg.agent + "_" + day_stem(day_file);
  uc::save_schedule_u(schedule.u, cfg.out_dir + "/schedule_" + stem + ".csv");

  json j = artifact_header(cfg);
  j["agent"] = cfg.agent;
  j["day"] = day_file;
  j["wall_seconds"] = wall;
  j["evaluation"] = json::parse(eval.to_json());
  j["baseline"] = jbase;
  j["detail"] = detail;
  write_text(cfg.out_dir + "/result_" + stem + ".json", j.dump(2));
  std::cout << cfg.agent << " " << day_stem(day_file)
            << ": expected cost = " << eval.expected_cost << " ("
            << wall << " s)\n";
  return kExitOk;
}

int cmd_solve(const Cli& cli, const std::string& day_flag) {
  std::vector<std::string> days =
      day_flag.empty() ? cli.cfg.day_files : std::vector<std::string>{day_flag};
  if (days.empty()) throw uc::DataError("solve: no day files given");
  for (const auto& d : days) {
    const int rc = solve_one_day(cli, d);
    if (rc != kExitOk) return rc;
  }
  return kExitOk;
}

int cmd_evaluate(const Cli& cli, const std::string& day_file,
                 const std::string& schedule_file) {
  const auto& cfg = cli.cfg;
  const uc::ProblemInstance inst = build_instance(cfg, day_file);
  const uc::Schedule schedule =
      uc::Schedule::from_u(uc::load_schedule_u(schedule_file), inst.generators);
  const uc::EvaluationReport eval =
      uc::evaluate_schedule(schedule, inst, cfg.eval_scenarios,
                            uc::substream_seed(cfg.seed, 0, 0xEA1), cfg.workers);
  json j = artifact_header(cfg);
  j["day"] = day_file;
  j["schedule"] = schedule_file;
  j["evaluation"] = json::parse(eval.to_json());
  fs::create_directories(cfg.out_dir);
  const std::string out = cfg.out_dir + "/evaluation_" + day_stem(day_file) +
                          ".json";
  write_text(out, j.dump(2));
  std::cout << "expected cost = " << eval.expected_cost << " (report: " << out
            << ")\n";
  return kExitOk;
}

int cmd_hybrid(const Cli& cli, const std::string& day_flag) {
  Cli copy = cli;
  if (copy.cfg.agent.rfind("hybrid-", 0) != 0) copy.cfg.agent = "hybrid-rand";
  return cmd_solve(copy, day_flag);
}

int cmd_report(const Cli& cli, const std::string& results_dir) {
  const auto& cfg = cli.cfg;
  struct Row {
    std::string agent, day;
    double cost = 0.0, baseline = 0.0, wall = 0.0;
  };
  std::vector<Row> rows;
  std::string hash;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(results_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("result_", 0) == 0 && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path);
    json j;
    in >> j;
    const std::string h = j.at("config_hash").get<std::string>();
    if (hash.empty()) hash = h;
    if (h != hash) {
      throw uc::DataError("refusing to aggregate mixed config hashes: " +
                          path.string());
    }
    Row r;
    r.agent = j.at("agent").get<std::string>();
    r.day = j.at("day").get<std::string>();
    r.cost = j.at("evaluation").at("expected_cost").get<double>();
    r.baseline = j.at("baseline").at("mean_cost").get<double>();
    r.wall = j.at("wall_seconds").get<double>();
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw uc::DataError("no result_*.json files in " + results_dir);

  fs::create_directories(cfg.out_dir);
  {
    std::ofstream out(cfg.out_dir + "/report_costs.csv");
    out << "agent,day,cost,perfect_foresight,normalized\n";
    out.precision(12);
    for (const auto& r : rows) {
      out << r.agent << "," << r.day << "," << r.cost << "," << r.baseline
          << "," << r.cost / r.baseline << "\n";
    }
  }
  // Aggregates per agent.
  std::vector<std::string> agents;
  for (const auto& r : rows) {
    if (std::find(agents.begin(), agents.end(), r.agent) == agents.end()) {
      agents.push_back(r.agent);
    }
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  {
    std::ofstream out(cfg.out_dir + "/report_summary.csv");
    out << "agent,days,mean_normalized,median_normalized\n";
    out.precision(12);
    out << "perfect-foresight," << rows.size() << ",1,1\n";
    for (const auto& a : agents) {
      std::vector<double> norm;
      for (const auto& r : rows) {
        if (r.agent == a) norm.push_back(r.cost / r.baseline);
      }
      double mean = 0.0;
      for (double x : norm) mean += x;
      mean /= norm.size();
      out << a << "," << norm.size() << "," << mean << "," << median(norm)
          << "\n";
    }
  }
  {
    std::ofstream out(cfg.out_dir + "/report_runtime.csv");
    out << "agent,days,min_s,median_s,mean_s,max_s\n";
    out.precision(12);
    for (const auto& a : agents) {
      std::vector<double> w;
      for (const auto& r : rows) {
        if (r.agent == a) w.push_back(r.wall);
      }
      double mean = 0.0;
      for (double x : w) mean += x;
      mean /= w.size();
      out << a << "," << w.size() << ","
          << *std::min_element(w.begin(), w.end()) << "," << median(w) << ","
          << mean << "," << *std::max_element(w.begin(), w.end()) << "\n";
    }
  }
  std::cout << "wrote report_costs.csv, report_summary.csv, report_runtime.csv"
            << " to " << cfg.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unit-commitment scheduling toolkit"};
  app.require_subcommand(1);

  Cli cli;
  std::string seed_str, node_budget_str, time_budget_str, workers_str, out_dir;
  app.add_option("--config", cli.config_path, "Config file (key=value lines)");
  app.add_option("--seed", seed_str, "Master seed");
  app.add_option("--workers", workers_str, "Max concurrent workers");
  app.add_option("--node-budget", node_budget_str, "Branch-and-bound node cap");
  app.add_option("--time-budget-s", time_budget_str, "Solver wall-time cap, s");
  app.add_option("--out-dir", out_dir, "Output directory");
  app.add_option("--set", cli.overrides, "Extra key=value config overrides");

  int n_days = 40;
  auto* gen = app.add_subcommand("generate-days", "Write synthetic day CSVs");
  gen->add_option("--n-days", n_days, "Number of days");

  auto* train = app.add_subcommand("train", "Train the commitment policy");

  std::string day_flag, schedule_flag, agent_flag, results_dir;
  auto* solve = app.add_subcommand("solve", "Schedule one or more days");
  solve->add_option("--day", day_flag, "Day CSV (default: config day_files)");
  solve->add_option("--agent", agent_flag, "Scheduling agent");

  auto* eval = app.add_subcommand("evaluate", "Monte Carlo cost of a schedule");
  eval->add_option("--day", day_flag)->required();
  eval->add_option("--schedule", schedule_flag)->required();

  auto* hybrid = app.add_subcommand("hybrid", "Portfolio warm-start solve");
  hybrid->add_option("--day", day_flag);
  hybrid->add_option("--agent", agent_flag, "hybrid-{vanilla,rl,rand}");

  auto* report = app.add_subcommand("report", "Aggregate result JSONs");
  report->add_option("--dir", results_dir, "Directory of result_*.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!cli.config_path.empty()) cli.cfg = uc::load_config(cli.config_path);
    // Flags win over the config file.
    if (!seed_str.empty()) cli.cfg.set("seed", seed_str);
    if (!workers_str.empty()) cli.cfg.set("workers", workers_str);
    if (!node_budget_str.empty()) cli.cfg.set("node_budget", node_budget_str);
    if (!time_budget_str.empty()) cli.cfg.set("time_budget_s", time_budget_str);
    if (!out_dir.empty()) cli.cfg.set("out_dir", out_dir);
    if (!agent_flag.empty()) cli.cfg.set("agent", agent_flag);
    uc::apply_overrides(cli.cfg, cli.overrides);
    cli.cfg.check_valid();

    if (gen->parsed()) return cmd_generate_days(cli, n_days);
    if (train->parsed()) return cmd_train(cli);
    if (solve->parsed()) return cmd_solve(cli, day_flag);
    if (eval->parsed()) return cmd_evaluate(cli, day_flag, schedule_flag);
    if (hybrid->parsed()) return cmd_hybrid(cli, day_flag);
    if (report->parsed()) {
      return cmd_report(cli, results_dir.empty() ? cli.cfg.out_dir
                                                 : results_dir);
    }
  } catch (const uc::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const uc::InvalidArgument& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
