#pragma once

#include <limits>
#include <ostream>
#include <vector>

#include "resq/linalg.hpp"

namespace resq {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct SolverOptions {
  double feas_tol = 1e-7;
  double gap_tol = 1e-6;
  int max_iter = 200;
};

enum class SolveStatus {
  Optimal,
  Infeasible,
  Unbounded,
  MaxIter,
  NumericalBreakdown,
};

const char* to_string(SolveStatus s);

/// minimize objective . x  subject to  eq_lhs x = eq_rhs,  x >= lower
/// (lower entries may be -inf for free variables).
struct LinearProgram {
  RealVector objective;
  RealMatrix eq_lhs;
  RealVector eq_rhs;
  RealVector lower;

  void validate() const;
};

/// One PSD constraint  sum_j y_j coeff[j] - constant >= 0 over complex
/// Hermitian matrices.  coeff[j] may be empty (treated as zero).
struct SdpBlock {
  ComplexMatrix constant;
  std::vector<ComplexMatrix> coeffs;
};

/// minimize objective . y  subject to the PSD blocks,
/// ineq_lhs y >= ineq_rhs (componentwise) and eq_lhs y = eq_rhs.
struct SdpProblem {
  int num_vars = 0;
  RealVector objective;
  std::vector<SdpBlock> blocks;
  RealMatrix ineq_lhs;
  RealVector ineq_rhs;
  RealMatrix eq_lhs;
  RealVector eq_rhs;

  void validate() const;
};

struct Solution {
  SolveStatus status = SolveStatus::NumericalBreakdown;
  double value = 0.0;
  double dual_value = 0.0;
  RealVector primal;
  RealVector dual;                        // multipliers for scalar rows
  std::vector<ComplexMatrix> dual_blocks; // PSD multipliers, Hermitian
  double gap = kInf;
  double primal_residual = kInf;
  double dual_residual = kInf;
  int iterations = 0;
};

Solution solve_lp(const LinearProgram& p, const SolverOptions& opts = {});
Solution solve_sdp(const SdpProblem& p, const SolverOptions& opts = {});

/// Absolute primal-dual gap of an Optimal solution.
double check_duality_gap(const Solution& sol);

// Plain-text debug dumps (one matrix per line group, row major).
void debug_dump(const LinearProgram& p, std::ostream& os);
void debug_dump(const SdpProblem& p, std::ostream& os);

}  // namespace resq
