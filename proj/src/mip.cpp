#include "uc/mip.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <sstream>

#include "json.hpp"

namespace uc {

namespace {
constexpr double kIntTol = 1e-6;
constexpr double kGapTol = 1e-6;
}  // namespace

MipModel::MipModel(const ProblemInstance& inst, ScenarioTree tree,
                   std::vector<double> reserve)
    : inst_(inst), tree_(std::move(tree)), reserve_(std::move(reserve)) {
  inst_.check_valid();
  G_ = inst_.num_generators();
  T_ = inst_.T;
  N_ = tree_.num_scenarios();
  if (tree_.num_periods() != T_)
    throw InvalidArgument("scenario tree horizon does not match instance");
  if (!reserve_.empty() && static_cast<int>(reserve_.size()) != T_)
    throw InvalidArgument("reserve series must have length T");
  for (double r : reserve_)
    if (r < 0.0) throw InvalidArgument("reserve requirement must be >= 0");

  auto name = [&](const char* base, int a, int b, int c = -1, int d = -1) {
    std::ostringstream os;
    os << base << "_" << a << "_" << b;
    if (c >= 0) os << "_" << c;
    if (d >= 0) os << "_" << d;
    return os.str();
  };

  const double dt = inst_.dt_hours;
  u_.assign(G_, std::vector<int>(T_));
  v_.assign(G_, std::vector<int>(T_));
  w_.assign(G_, std::vector<int>(T_));

  // Binaries first, grouped by period so branching order follows (t, g).
  for (int t = 0; t < T_; ++t)
    for (int g = 0; g < G_; ++g) {
      u_[g][t] = lp_.add_var(dt * inst_.costs[g].no_load_cost(), 0.0, 1.0);
      names_.push_back(name("u", g, t));
      v_[g][t] = lp_.add_var(inst_.generators[g].startup_cost, 0.0, 1.0);
      names_.push_back(name("v", g, t));
      w_[g][t] = lp_.add_var(0.0, 0.0, 1.0);
      names_.push_back(name("w", g, t));
      binaries_.push_back(u_[g][t]);
      binaries_.push_back(v_[g][t]);
      binaries_.push_back(w_[g][t]);
    }

  // Initial-condition commitments become bound fixes on u.
  for (int g = 0; g < G_; ++g) {
    const Generator& gen = inst_.generators[g];
    if (gen.initially_on) {
      const int span = std::min(inst_.min_up_steps(g) - inst_.initial_up_steps(g), T_);
      for (int t = 0; t < span; ++t) lp_.lower[u_[g][t]] = 1.0;
    } else {
      const int span =
          std::min(inst_.min_down_steps(g) - inst_.initial_down_steps(g), T_);
      for (int t = 0; t < span; ++t) lp_.upper[u_[g][t]] = 0.0;
    }
  }

  // Per-scenario dispatch block: p, lambda, load shed, wind curtailment.
  std::vector<std::vector<std::vector<int>>> p(N_), lam_first(N_);
  std::vector<std::vector<int>> ls(N_), wc(N_);
  for (int n = 0; n < N_; ++n) {
    const double phi = tree_.probabilities[n];
    p[n].assign(G_, std::vector<int>(T_));
    lam_first[n].assign(G_, std::vector<int>(T_));
    ls[n].resize(T_);
    wc[n].resize(T_);
    for (int g = 0; g < G_; ++g) {
      const PiecewiseCost& pw = inst_.costs[g];
      const double headroom = inst_.generators[g].p_max - inst_.generators[g].p_min;
      for (int t = 0; t < T_; ++t) {
        p[n][g][t] = lp_.add_var(0.0, 0.0, headroom);
        names_.push_back(name("p", g, t, n));
        // One fraction per interior/upper breakpoint; the zero-cost weight at
        // the minimum-output breakpoint is the slack of the fraction-sum row.
        lam_first[n][g][t] = lp_.num_vars();
        for (int l = 1; l < pw.num_points(); ++l) {
          lp_.add_var(phi * dt * (pw.cost[l] - pw.cost[0]), 0.0, 1.0);
          names_.push_back(name("lam", g, t, n, l));
        }
      }
    }
    for (int t = 0; t < T_; ++t) {
      ls[n][t] = lp_.add_var(phi * dt * inst_.c_load_shed, 0.0, kInf);
      names_.push_back(name("ls", t, n));
      wc[n][t] = lp_.add_var(phi * dt * inst_.c_wind_curtail, 0.0, kInf);
      names_.push_back(name("wc", t, n));
    }
  }

  std::vector<std::vector<int>> r;
  if (!reserve_.empty()) {
    r.assign(G_, std::vector<int>(T_));
    for (int g = 0; g < G_; ++g)
      for (int t = 0; t < T_; ++t) {
        r[g][t] = lp_.add_var(0.0, 0.0, kInf);
        names_.push_back(name("r", g, t));
      }
  }

  auto row_name = [&](const char* base, int a, int b = -1, int c = -1) {
    std::ostringstream os;
    os << base << "_" << a;
    if (b >= 0) os << "_" << b;
    if (c >= 0) os << "_" << c;
    row_names_.push_back(os.str());
  };

  // Piecewise coupling per (g, t, n): output definition and fraction sum.
  for (int n = 0; n < N_; ++n)
    for (int g = 0; g < G_; ++g) {
      const PiecewiseCost& pw = inst_.costs[g];
      for (int t = 0; t < T_; ++t) {
        int row = lp_.add_row(0.0, 0.0);
        row_name("pwl_p", g, t, n);
        lp_.set_coef(row, p[n][g][t], -1.0);
        for (int l = 1; l < pw.num_points(); ++l)
          lp_.set_coef(row, lam_first[n][g][t] + l - 1, pw.power[l] - pw.power[0]);
        row = lp_.add_row(-kInf, 0.0);
        row_name("pwl_sum", g, t, n);
        for (int l = 1; l < pw.num_points(); ++l)
          lp_.set_coef(row, lam_first[n][g][t] + l - 1, 1.0);
        lp_.set_coef(row, u_[g][t], -1.0);
      }
    }

  // Energy balance per (t, n).
  for (int n = 0; n < N_; ++n)
    for (int t = 0; t < T_; ++t) {
      const double rhs = inst_.demand[t] - inst_.wind[t] + tree_.ndfe[t][n];
      const int row = lp_.add_row(rhs, rhs);
      row_name("balance", t, n);
      lp_.set_coef(row, ls[n][t], 1.0);
      lp_.set_coef(row, wc[n][t], -1.0);
      for (int g = 0; g < G_; ++g) {
        lp_.set_coef(row, u_[g][t], inst_.generators[g].p_min);
        lp_.set_coef(row, p[n][g][t], 1.0);
      }
    }

  // Commitment transition logic.
  for (int g = 0; g < G_; ++g) {
    const double u1 = inst_.generators[g].initially_on ? 1.0 : 0.0;
    int row = lp_.add_row(u1, u1);
    row_name("logic", g, 0);
    lp_.set_coef(row, u_[g][0], 1.0);
    lp_.set_coef(row, v_[g][0], -1.0);
    lp_.set_coef(row, w_[g][0], 1.0);
    for (int t = 1; t < T_; ++t) {
      row = lp_.add_row(0.0, 0.0);
      row_name("logic", g, t);
      lp_.set_coef(row, u_[g][t], 1.0);
      lp_.set_coef(row, u_[g][t - 1], -1.0);
      lp_.set_coef(row, v_[g][t], -1.0);
      lp_.set_coef(row, w_[g][t], 1.0);
    }
  }

  // Minimum up/down windows.
  for (int g = 0; g < G_; ++g) {
    const int ut = inst_.min_up_steps(g);
    const int dt_steps = inst_.min_down_steps(g);
    for (int t = ut - 1; t < T_; ++t) {
      const int row = lp_.add_row(-kInf, 0.0);
      row_name("min_up", g, t);
      for (int i = t - ut + 1; i <= t; ++i) lp_.set_coef(row, v_[g][i], 1.0);
      lp_.set_coef(row, u_[g][t], -1.0);
    }
    for (int t = dt_steps - 1; t < T_; ++t) {
      const int row = lp_.add_row(-kInf, 1.0);
      row_name("min_down", g, t);
      for (int i = t - dt_steps + 1; i <= t; ++i) lp_.set_coef(row, w_[g][i], 1.0);
      lp_.set_coef(row, u_[g][t], 1.0);
    }
  }

  // Explicit spinning reserve (deterministic variant).
  if (!reserve_.empty()) {
    double total_headroom = 0.0;
    for (int g = 0; g < G_; ++g)
      total_headroom += inst_.generators[g].p_max - inst_.generators[g].p_min;
    for (int t = 0; t < T_; ++t) {
      if (reserve_[t] > total_headroom) reserve_warning_ = true;
      int row = lp_.add_row(reserve_[t], kInf);
      row_name("reserve", t);
      for (int g = 0; g < G_; ++g) lp_.set_coef(row, r[g][t], 1.0);
      for (int g = 0; g < G_; ++g) {
        const double headroom =
            inst_.generators[g].p_max - inst_.generators[g].p_min;
        row = lp_.add_row(-kInf, 0.0);
        row_name("headroom", g, t);
        lp_.set_coef(row, p[0][g][t], 1.0);
        lp_.set_coef(row, r[g][t], 1.0);
        lp_.set_coef(row, u_[g][t], -headroom);
      }
    }
  }
}

MipModel MipModel::stochastic(const ProblemInstance& inst,
                              const ScenarioTree& tree) {
  if (tree.num_scenarios() < 4)
    throw InvalidArgument("unsupported-tree-size: stochastic model needs N >= 4");
  return MipModel(inst, tree, {});
}

MipModel MipModel::deterministic(const ProblemInstance& inst,
                                 const std::vector<double>& reserve) {
  return MipModel(inst, ScenarioTree::deterministic(inst.T), reserve);
}

MipModel MipModel::for_realisation(const ProblemInstance& inst,
                                   const std::vector<double>& ndfe) {
  return MipModel(inst, ScenarioTree::from_trajectory(ndfe), {});
}

void MipModel::fix_schedule(const Schedule& s, std::vector<double>& lower,
                            std::vector<double>& upper) const {
  if (s.num_generators() != G_ || s.num_periods() != T_)
    throw InvalidArgument("fix_schedule: dimension mismatch");
  for (int g = 0; g < G_; ++g)
    for (int t = 0; t < T_; ++t) {
      lower[u_[g][t]] = upper[u_[g][t]] = s.u[g][t];
      lower[v_[g][t]] = upper[v_[g][t]] = s.v[g][t];
      lower[w_[g][t]] = upper[w_[g][t]] = s.w[g][t];
    }
}

Schedule MipModel::schedule_from(const std::vector<double>& x) const {
  std::vector<std::vector<int>> u(G_, std::vector<int>(T_));
  for (int g = 0; g < G_; ++g)
    for (int t = 0; t < T_; ++t)
      u[g][t] = x[u_[g][t]] > 0.5 ? 1 : 0;
  return Schedule::from_u(std::move(u), inst_.generators);
}

std::string MipModel::to_lp_format() const {
  std::ostringstream os;
  os.precision(12);
  os << "\\* unit commitment model dump *\\\n";
  os << "Minimize\n obj:";
  bool first = true;
  for (int j = 0; j < lp_.num_vars(); ++j) {
    if (lp_.obj[j] == 0.0) continue;
    os << (first ? " " : " + ") << lp_.obj[j] << " " << names_[j];
    first = false;
  }
  os << "\nSubject To\n";
  // Row-wise view for printing.
  std::vector<std::vector<std::pair<int, double>>> rows(lp_.num_rows());
  for (int j = 0; j < lp_.num_vars(); ++j)
    for (const auto& [row, coef] : lp_.cols[j]) rows[row].emplace_back(j, coef);
  for (int i = 0; i < lp_.num_rows(); ++i) {
    os << " " << row_names_[i] << ":";
    for (const auto& [j, coef] : rows[i]) {
      if (coef >= 0.0)
        os << " + " << coef << " " << names_[j];
      else
        os << " - " << -coef << " " << names_[j];
    }
    if (lp_.row_lo[i] == lp_.row_hi[i])
      os << " = " << lp_.row_lo[i] << "\n";
    else if (!std::isfinite(lp_.row_lo[i]))
      os << " <= " << lp_.row_hi[i] << "\n";
    else if (!std::isfinite(lp_.row_hi[i]))
      os << " >= " << lp_.row_lo[i] << "\n";
    else
      os << " >= " << lp_.row_lo[i] << " <= " << lp_.row_hi[i] << "\n";
  }
  os << "Bounds\n";
  for (int j = 0; j < lp_.num_vars(); ++j) {
    if (!std::isfinite(lp_.upper[j]))
      os << " " << lp_.lower[j] << " <= " << names_[j] << " <= +inf\n";
    else
      os << " " << lp_.lower[j] << " <= " << names_[j] << " <= " << lp_.upper[j]
         << "\n";
  }
  os << "Binaries\n";
  for (int j : binaries_) os << " " << names_[j];
  os << "\nEnd\n";
  return os.str();
}

// --- solving ---

LpSolution solve_lp_relaxation(const MipModel& model,
                               const std::vector<std::pair<int, int>>& fixings) {
  std::vector<double> lower = model.lp().lower;
  std::vector<double> upper = model.lp().upper;
  for (const auto& [var, value] : fixings) {
    if (value != 0 && value != 1)
      throw InvalidArgument("solve_lp_relaxation: binary fixing must be 0/1");
    if (lower[var] > value || upper[var] < value)
      return LpSolution{};  // contradicts model bounds: infeasible node
    lower[var] = upper[var] = value;
  }
  SimplexSolver solver(model.lp());
  return solver.solve(lower, upper);
}

namespace {

struct Node {
  double bound = 0.0;
  int depth = 0;
  long id = 0;
  std::vector<std::pair<int, int>> fixings;
  Basis basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    if (a.depth != b.depth) return a.depth < b.depth;  // deeper first
    return a.id > b.id;                                // then insertion order
  }
};

}  // namespace

Schedule vanilla_schedule(const ProblemInstance& inst) {
  // All units on all day, except periods forced off by remaining initial
  // minimum down time.
  const int G = inst.num_generators();
  std::vector<std::vector<int>> u(G, std::vector<int>(inst.T, 1));
  for (int g = 0; g < G; ++g) {
    if (inst.generators[g].initially_on) continue;
    const int span =
        std::min(inst.min_down_steps(g) - inst.initial_down_steps(g), inst.T);
    for (int t = 0; t < span; ++t) u[g][t] = 0;
  }
  return Schedule::from_u(std::move(u), inst.generators);
}

double schedule_objective(const MipModel& model, const Schedule& s) {
  const auto verdict = validate_schedule(s, model.instance());
  if (!verdict.ok) {
    std::ostringstream msg;
    msg << "schedule_objective: infeasible schedule:";
    for (const auto& v : verdict.violations)
      msg << " [" << v.constraint << " g=" << v.generator << " t=" << v.timestep
          << "]";
    throw InvalidArgument(msg.str());
  }
  std::vector<double> lower = model.lp().lower;
  std::vector<double> upper = model.lp().upper;
  // Initial-condition fixes may contradict an invalid schedule; widen first
  // is unnecessary since the schedule was validated against the same rules.
  model.fix_schedule(s, lower, upper);
  SimplexSolver solver(model.lp());
  const LpSolution sol = solver.solve(lower, upper);
  if (sol.status != LpStatus::Optimal)
    throw DataError("schedule_objective: dispatch LP not optimal (reserve infeasible?)");
  return sol.objective;
}

SolveReport branch_and_bound(const MipModel& model,
                             const std::optional<Schedule>& warm_start,
                             const SolveBudgets& budgets, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  SolveReport report;
  auto trace = [&] {
    report.gap_trace.push_back({elapsed(), report.ub, report.lb});
  };

  // Step 1: initial feasible solution seeds the upper bound.
  Schedule initial =
      warm_start ? *warm_start : vanilla_schedule(model.instance());
  bool have_incumbent = true;
  try {
    report.ub = schedule_objective(model, initial);
    report.incumbent = initial;
  } catch (const DataError&) {
    // Reserve-infeasible initial point; continue without an incumbent.
    if (warm_start) throw;
    have_incumbent = false;
    report.ub = kInf;
  }
  trace();

  SimplexSolver solver(model.lp());
  const auto& binaries = model.binaries();

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  open.push(Node{});
  long next_id = 1;

  auto gap_closed = [&] {
    return report.ub - report.lb <= kGapTol * std::max(1.0, std::abs(report.ub));
  };

  // Plunge stack: after branching, the child that agrees with the LP
  // rounding is explored immediately (depth-first) until its path is pruned
  // or integral, which finds strong incumbents early; the sibling joins the
  // best-bound queue.
  std::vector<Node> dive;
  auto global_bound = [&] {
    double b = open.empty() ? kInf : open.top().bound;
    for (const auto& n : dive) b = std::min(b, n.bound);
    return b;
  };

  std::string termination;
  while (!open.empty() || !dive.empty()) {
    report.lb = std::min(std::max(report.lb, global_bound()), report.ub);
    if (gap_closed() && report.incumbent) {
      termination = "gap-closed";
      break;
    }
    if (budgets.max_nodes >= 0 && report.nodes_explored >= budgets.max_nodes) {
      termination = "node-limit";
      break;
    }
    if (budgets.max_seconds >= 0 && elapsed() >= budgets.max_seconds) {
      termination = "time-limit";
      break;
    }

    Node node;
    if (!dive.empty()) {
      node = std::move(dive.back());
      dive.pop_back();
    } else {
      node = open.top();
      open.pop();
    }
    if (node.bound >= report.ub - kGapTol * std::max(1.0, std::abs(report.ub)))
      continue;  // pruned by bound

    std::vector<double> lower = model.lp().lower;
    std::vector<double> upper = model.lp().upper;
    bool contradictory = false;
    for (const auto& [var, value] : node.fixings) {
      if (lower[var] > value || upper[var] < value) {
        contradictory = true;
        break;
      }
      lower[var] = upper[var] = value;
    }
    ++report.nodes_explored;
    if (contradictory) continue;

    const LpSolution sol =
        solver.solve(lower, upper, node.basis.empty() ? nullptr : &node.basis);
    if (sol.status == LpStatus::Infeasible) continue;
    if (sol.status != LpStatus::Optimal)
      throw DataError("branch_and_bound: LP solve failed at a node");
    if (sol.objective >= report.ub - kGapTol * std::max(1.0, std::abs(report.ub)))
      continue;

    // Integrality check over the binary block: branch on the most fractional
    // variable, breaking near-ties (within 10% of the maximum) with the
    // seeded stream so a portfolio of solvers diversifies its search trees.
    int branch_var = -1;
    double branch_frac = kIntTol;
    std::vector<int> near_ties;
    for (int j : binaries) {
      const double x = sol.x[j];
      const double frac = std::min(x - std::floor(x), std::ceil(x) - x);
      if (frac > branch_frac) {
        branch_frac = frac;
        branch_var = j;
      }
    }
    if (branch_var >= 0) {
      for (int j : binaries) {
        const double x = sol.x[j];
        const double frac = std::min(x - std::floor(x), std::ceil(x) - x);
        if (frac > kIntTol && frac >= 0.9 * branch_frac) near_ties.push_back(j);
      }
      if (near_ties.size() > 1) {
        Rng tie_rng(substream_seed(seed, static_cast<std::uint64_t>(node.id),
                                   0xB4));
        branch_var = near_ties[tie_rng.below(near_ties.size())];
      }
    }
    if (branch_var < 0) {
      // Integer feasible: new incumbent.
      report.ub = sol.objective;
      report.incumbent = model.schedule_from(sol.x);
      have_incumbent = true;
      trace();
      continue;
    }

    // Plunge direction: follow the LP rounding, with commitment variables
    // biased towards "on" (rounding a commitment down can force load shed at
    // the leaf, which is far costlier than a spell of surplus capacity).
    const bool commitment = model.variable_name(branch_var)[0] == 'u';
    const double threshold = commitment ? 0.3 : 0.5;
    const int preferred = sol.x[branch_var] >= threshold ? 1 : 0;
    for (int value : {1 - preferred, preferred}) {
      Node child;
      child.bound = sol.objective;
      child.depth = node.depth + 1;
      child.id = next_id++;
      child.fixings = node.fixings;
      child.fixings.emplace_back(branch_var, value);
      child.basis = sol.basis;
      if (value == preferred)
        dive.push_back(std::move(child));
      else
        open.push(std::move(child));
    }
  }

  if (termination.empty()) {
    // Queue exhausted: every node pruned or fathomed.
    report.lb = report.ub;
    termination = have_incumbent ? "gap-closed" : "no-incumbent";
  }
  if (!have_incumbent) termination = "no-incumbent";
  report.termination = termination;
  if (gap_closed() && have_incumbent) report.lb = report.ub;
  report.mip_gap_pct =
      (have_incumbent && report.ub != 0.0)
          ? std::max(0.0, (report.ub - report.lb) / report.ub * 100.0)
          : 100.0;
  if (gap_closed() && have_incumbent) report.mip_gap_pct = 0.0;
  report.wall_seconds = elapsed();
  trace();
  return report;
}

std::string SolveReport::to_json() const {
  nlohmann::json j;
  j["ub"] = ub;
  j["lb"] = lb;
  j["mip_gap_pct"] = mip_gap_pct;
  j["nodes_explored"] = nodes_explored;
  j["wall_seconds"] = wall_seconds;
  j["termination"] = termination;
  j["has_incumbent"] = incumbent.has_value();
  if (incumbent) j["incumbent_u"] = incumbent->u;
  auto trace = nlohmann::json::array();
  for (const auto& p : gap_trace)
    trace.push_back({{"seconds", p.seconds}, {"ub", p.ub}, {"lb", p.lb}});
  j["gap_trace"] = trace;
  return j.dump(2);
}

}  // namespace uc
