#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uc/common.hpp"

namespace uc {

/// Sparse linear program: minimise obj'x subject to row_lo <= Ax <= row_hi
/// and lower <= x <= upper. Rows with row_lo == row_hi are equalities.
struct LinearProgram {
  std::vector<double> obj;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> row_lo;
  std::vector<double> row_hi;
  /// Column-wise coefficients: cols[j] = {(row, value), ...}.
  std::vector<std::vector<std::pair<int, double>>> cols;

  int num_vars() const { return static_cast<int>(obj.size()); }
  int num_rows() const { return static_cast<int>(row_lo.size()); }

  int add_var(double objective, double lo, double hi);
  int add_row(double lo, double hi);
  void set_coef(int row, int var, double value);
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

/// Variable status in a simplex basis (structural variables first, then one
/// logical per row).
enum class VarStatus : std::uint8_t { Basic, AtLower, AtUpper };

struct Basis {
  std::vector<VarStatus> status;
  bool empty() const { return status.empty(); }
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> x;  // structural variable values
  Basis basis;
  long iterations = 0;
};

/// Bounded-variable primal simplex with a dense LU of the basis plus
/// product-form eta updates. Phase 1 minimises total bound infeasibility
/// from any starting basis, so warm starts from a parent node basis are
/// cheap. Dantzig pricing with a Bland fallback after a run of
/// non-improving pivots.
///
/// One solver instance is single-owner; the LinearProgram it references
/// must outlive it and stays immutable.
class SimplexSolver {
 public:
  explicit SimplexSolver(const LinearProgram& lp);

  /// Solves with the given structural bounds (callers pass the LP's own
  /// bounds or a node's tightened copy). `warm` seeds the starting basis.
  LpSolution solve(const std::vector<double>& lower,
                   const std::vector<double>& upper,
                   const Basis* warm = nullptr);

 private:
  struct Impl;
  const LinearProgram* lp_;
};

}  // namespace uc
