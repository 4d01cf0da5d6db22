#include "uc/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace uc {

int LinearProgram::add_var(double objective, double lo, double hi) {
  obj.push_back(objective);
  lower.push_back(lo);
  upper.push_back(hi);
  cols.emplace_back();
  return num_vars() - 1;
}

int LinearProgram::add_row(double lo, double hi) {
  row_lo.push_back(lo);
  row_hi.push_back(hi);
  return num_rows() - 1;
}

void LinearProgram::set_coef(int row, int var, double value) {
  if (value != 0.0) cols[var].emplace_back(row, value);
}

namespace {

constexpr double kFeasTol = 1e-7;
constexpr double kDualTol = 1e-7;
constexpr double kPivotTol = 1e-8;
constexpr int kRefactorInterval = 60;
constexpr int kBlandTrigger = 600;

struct Eta {
  int r;
  Eigen::VectorXd d;
};

class Worker {
 public:
  Worker(const LinearProgram& lp, const std::vector<double>& lower,
         const std::vector<double>& upper)
      : lp_(lp), m_(lp.num_rows()), n_(lp.num_vars()), total_(n_ + m_) {
    lb_.resize(total_);
    ub_.resize(total_);
    for (int j = 0; j < n_; ++j) {
      lb_[j] = lower[j];
      ub_[j] = upper[j];
    }
    for (int i = 0; i < m_; ++i) {
      lb_[n_ + i] = lp.row_lo[i];
      ub_[n_ + i] = lp.row_hi[i];
    }
    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = lp.obj[j];
    x_.assign(total_, 0.0);
  }

  LpSolution run(const Basis* warm) {
    init_basis(warm);
    if (!factorize()) {
      slack_basis();
      factorize();
    }
    LpSolution out;
    if (!phase(/*phase1=*/true)) {
      out.status = iterations_ >= max_iterations() ? LpStatus::IterationLimit
                                                   : LpStatus::Infeasible;
      out.iterations = iterations_;
      return out;
    }
    const bool ok = phase(/*phase1=*/false);
    if (!ok && iterations_ >= max_iterations())
      out.status = LpStatus::IterationLimit;
    else if (!ok)
      out.status = LpStatus::Unbounded;
    else
      out.status = LpStatus::Optimal;
    out.iterations = iterations_;
    if (out.status == LpStatus::Optimal) {
      out.objective = 0.0;
      out.x.assign(n_, 0.0);
      for (int j = 0; j < n_; ++j) {
        out.x[j] = x_[j];
        out.objective += lp_.obj[j] * x_[j];
      }
      out.basis.status = status_;
    }
    return out;
  }

 private:
  long max_iterations() const { return 20000 + 200L * m_; }

  double nonbasic_value(int j) const {
    switch (status_[j]) {
      case VarStatus::AtLower:
        return std::isfinite(lb_[j]) ? lb_[j] : (std::isfinite(ub_[j]) ? ub_[j] : 0.0);
      case VarStatus::AtUpper:
        return std::isfinite(ub_[j]) ? ub_[j] : (std::isfinite(lb_[j]) ? lb_[j] : 0.0);
      default:
        return x_[j];
    }
  }

  void init_basis(const Basis* warm) {
    if (warm && static_cast<int>(warm->status.size()) == total_) {
      status_ = warm->status;
      // The warm basis must contain exactly m basic variables.
      int count = 0;
      for (auto s : status_)
        if (s == VarStatus::Basic) ++count;
      if (count == m_) {
        rebuild_basic_list();
        normalize_nonbasic();
        return;
      }
    }
    slack_basis();
  }

  void slack_basis() {
    status_.assign(total_, VarStatus::AtLower);
    for (int j = 0; j < n_; ++j)
      status_[j] = (std::isfinite(lb_[j]) || !std::isfinite(ub_[j]))
                       ? VarStatus::AtLower
                       : VarStatus::AtUpper;
    for (int i = 0; i < m_; ++i) status_[n_ + i] = VarStatus::Basic;
    rebuild_basic_list();
    normalize_nonbasic();
  }

  void rebuild_basic_list() {
    basic_.clear();
    for (int j = 0; j < total_; ++j)
      if (status_[j] == VarStatus::Basic) basic_.push_back(j);
  }

  void normalize_nonbasic() {
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::Basic) continue;
      // Clamp to the nearest bound valid under the current bound set.
      if (status_[j] == VarStatus::AtUpper && !std::isfinite(ub_[j]))
        status_[j] = VarStatus::AtLower;
      if (status_[j] == VarStatus::AtLower && !std::isfinite(lb_[j]) &&
          std::isfinite(ub_[j]))
        status_[j] = VarStatus::AtUpper;
      x_[j] = nonbasic_value(j);
    }
  }

  // Column of the standard-form matrix [A | -I].
  void scatter_column(int j, Eigen::VectorXd& out) const {
    out.setZero();
    if (j < n_) {
      for (const auto& [row, value] : lp_.cols[j]) out[row] = value;
    } else {
      out[j - n_] = -1.0;
    }
  }

  bool factorize() {
    if (m_ == 0) {
      etas_.clear();
      recompute_basics();
      return true;
    }
    Eigen::MatrixXd B(m_, m_);
    Eigen::VectorXd col(m_);
    for (int k = 0; k < m_; ++k) {
      scatter_column(basic_[k], col);
      B.col(k) = col;
    }
    lu_.compute(B);
    etas_.clear();
    // Singularity guard: check a solve round-trip.
    Eigen::VectorXd probe = Eigen::VectorXd::Ones(m_);
    Eigen::VectorXd sol = lu_.solve(probe);
    if (!sol.allFinite() || (B * sol - probe).cwiseAbs().maxCoeff() > 1e-6 * m_)
      return false;
    recompute_basics();
    return true;
  }

  void ftran(Eigen::VectorXd& v) const {
    if (m_ == 0) return;
    v = lu_.solve(v);
    for (const auto& e : etas_) {
      const double pivot = v[e.r] / e.d[e.r];
      if (pivot != 0.0) v -= pivot * e.d;
      v[e.r] = pivot;
    }
  }

  void btran(Eigen::VectorXd& v) const {
    if (m_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      const double s = v.dot(it->d);
      v[it->r] += (v[it->r] - s) / it->d[it->r];
    }
    v = lu_.adjoint().solve(v);
  }

  void recompute_basics() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::Basic) continue;
      const double value = nonbasic_value(j);
      x_[j] = value;
      if (value == 0.0) continue;
      if (j < n_) {
        for (const auto& [row, coef] : lp_.cols[j]) rhs[row] -= coef * value;
      } else {
        rhs[j - n_] += value;
      }
    }
    ftran(rhs);
    for (int k = 0; k < m_; ++k) x_[basic_[k]] = rhs[k];
  }

  double infeasibility() const {
    double total = 0.0;
    for (int k = 0; k < m_; ++k) {
      const int j = basic_[k];
      if (x_[j] < lb_[j]) total += lb_[j] - x_[j];
      if (x_[j] > ub_[j]) total += x_[j] - ub_[j];
    }
    return total;
  }

  // Reduced costs under the given basic cost vector; returns entering
  // candidate (variable, direction) or {-1, 0}.
  std::pair<int, int> price(const std::vector<double>& basic_cost, bool bland) {
    Eigen::VectorXd y(m_);
    for (int k = 0; k < m_; ++k) y[k] = basic_cost[k];
    btran(y);
    int best = -1;
    int best_dir = 0;
    double best_score = kDualTol;
    for (int j = 0; j < total_; ++j) {
      if (status_[j] == VarStatus::Basic) continue;
      if (ub_[j] - lb_[j] <= kFeasTol && std::isfinite(lb_[j]) &&
          std::isfinite(ub_[j]))
        continue;  // fixed
      double yaj = 0.0;
      if (j < n_) {
        for (const auto& [row, coef] : lp_.cols[j]) yaj += y[row] * coef;
      } else {
        yaj = -y[j - n_];
      }
      const double d = phase1_ ? -yaj : cost_[j] - yaj;
      int dir = 0;
      if (status_[j] == VarStatus::AtLower && d < -kDualTol) dir = +1;
      else if (status_[j] == VarStatus::AtUpper && d > kDualTol) dir = -1;
      else if (!std::isfinite(lb_[j]) && !std::isfinite(ub_[j]) &&
               std::abs(d) > kDualTol)
        dir = d < 0 ? +1 : -1;
      if (dir == 0) continue;
      if (bland) return {j, dir};
      const double score = std::abs(d);
      if (score > best_score) {
        best_score = score;
        best = j;
        best_dir = dir;
      }
    }
    return {best, best_dir};
  }

  // One simplex iteration; returns false when no entering candidate exists
  // (optimal for the current phase) or the problem is unbounded in phase 2
  // (sets unbounded_).
  bool iterate(bool bland) {
    std::vector<double> basic_cost(m_);
    if (phase1_) {
      for (int k = 0; k < m_; ++k) {
        const int j = basic_[k];
        basic_cost[k] = (x_[j] < lb_[j] - kFeasTol) ? -1.0
                        : (x_[j] > ub_[j] + kFeasTol) ? 1.0
                                                      : 0.0;
      }
    } else {
      for (int k = 0; k < m_; ++k) basic_cost[k] = cost_[basic_[k]];
    }

    auto [q, dir] = price(basic_cost, bland);
    if (q < 0) return false;

    Eigen::VectorXd d(m_);
    scatter_column(q, d);
    ftran(d);

    // Ratio test: find the max step and the blocking basic variable.
    double t_max = kInf;
    int block = -1;          // basis position
    double block_bound = 0;  // value the blocking variable lands on
    bool block_upper = false;
    if (std::isfinite(ub_[q]) && std::isfinite(lb_[q]))
      t_max = ub_[q] - lb_[q];  // bound flip
    double best_pivot = 0.0;
    for (int k = 0; k < m_; ++k) {
      const int j = basic_[k];
      const double rate = -dir * d[k];  // d x_j / d t
      if (std::abs(rate) < kPivotTol) continue;
      double limit = kInf;
      double target = 0.0;
      bool upper = false;
      const bool below = x_[j] < lb_[j] - kFeasTol;
      const bool above = x_[j] > ub_[j] + kFeasTol;
      // Next breakpoint in the direction of movement: an infeasible basic
      // variable moving further from its violated bound has none (its
      // phase-1 cost already prices that), one moving back stops at the
      // violated bound, a feasible one stops at the bound ahead.
      if (rate > 0.0) {
        const double cap = below ? lb_[j] : (above ? kInf : ub_[j]);
        upper = !below;
        if (std::isfinite(cap)) {
          limit = (cap - x_[j]) / rate;
          target = cap;
        }
      } else {
        const double cap = above ? ub_[j] : (below ? -kInf : lb_[j]);
        upper = above;
        if (std::isfinite(cap)) {
          limit = (cap - x_[j]) / rate;
          target = cap;
        }
      }
      if (limit < -1e-12) limit = 0.0;
      if (limit < t_max - 1e-12 ||
          (limit < t_max + 1e-12 && std::abs(d[k]) > best_pivot)) {
        t_max = std::max(0.0, limit);
        block = k;
        block_bound = target;
        block_upper = upper;
        best_pivot = std::abs(d[k]);
      }
    }

    if (!std::isfinite(t_max)) {
      if (phase1_) return false;  // cannot happen: phase-1 objective bounded
      unbounded_ = true;
      return false;
    }

    // Apply the step.
    const double step = t_max;
    for (int k = 0; k < m_; ++k) x_[basic_[k]] += -dir * d[k] * step;
    x_[q] = nonbasic_value(q) + dir * step;

    if (block < 0) {
      // Bound flip: entering variable moves to its other bound.
      status_[q] = (dir > 0) ? VarStatus::AtUpper : VarStatus::AtLower;
      x_[q] = nonbasic_value(q);
    } else {
      const int leaving = basic_[block];
      status_[leaving] = block_upper ? VarStatus::AtUpper : VarStatus::AtLower;
      x_[leaving] = block_bound;
      status_[q] = VarStatus::Basic;
      basic_[block] = q;
      etas_.push_back({block, d});
      if (static_cast<int>(etas_.size()) >= kRefactorInterval) {
        if (!factorize()) {
          slack_basis();
          factorize();
        }
      }
    }
    ++iterations_;
    return true;
  }

  // Runs one phase to completion; returns success (phase 1: feasible,
  // phase 2: optimal).
  bool phase(bool phase1) {
    phase1_ = phase1;
    int stall = 0;
    double last_metric = kInf;
    while (iterations_ < max_iterations()) {
      if (phase1_) {
        const double inf = infeasibility();
        if (inf <= kFeasTol * (1.0 + m_)) return true;
        if (inf < last_metric - 1e-10) {
          stall = 0;
          last_metric = inf;
        } else {
          ++stall;
        }
      } else {
        double obj = 0.0;
        for (int k = 0; k < m_; ++k) obj += cost_[basic_[k]] * x_[basic_[k]];
        for (int j = 0; j < total_; ++j)
          if (status_[j] != VarStatus::Basic) obj += cost_[j] * x_[j];
        if (obj < last_metric - 1e-10) {
          stall = 0;
          last_metric = obj;
        } else {
          ++stall;
        }
      }
      const bool bland = stall > kBlandTrigger;
      if (!iterate(bland)) {
        if (unbounded_) return false;
        if (phase1_) return infeasibility() <= kFeasTol * (1.0 + m_);
        return true;  // optimal
      }
    }
    return false;
  }

  const LinearProgram& lp_;
  int m_, n_, total_;
  std::vector<double> lb_, ub_, cost_, x_;
  std::vector<VarStatus> status_;
  std::vector<int> basic_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
  std::vector<Eta> etas_;
  bool phase1_ = false;
  bool unbounded_ = false;
  long iterations_ = 0;
};

}  // namespace

SimplexSolver::SimplexSolver(const LinearProgram& lp) : lp_(&lp) {}

LpSolution SimplexSolver::solve(const std::vector<double>& lower,
                                const std::vector<double>& upper,
                                const Basis* warm) {
  if (static_cast<int>(lower.size()) != lp_->num_vars() ||
      static_cast<int>(upper.size()) != lp_->num_vars())
    throw InvalidArgument("SimplexSolver::solve: bound size mismatch");
  for (int j = 0; j < lp_->num_vars(); ++j)
    if (lower[j] > upper[j] + 1e-12)
      throw InvalidArgument("SimplexSolver::solve: inconsistent fixing");
  Worker worker(*lp_, lower, upper);
  return worker.run(warm);
}

}  // namespace uc
