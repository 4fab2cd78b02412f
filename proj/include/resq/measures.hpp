#pragma once

#include <optional>
#include <vector>

#include "resq/convex.hpp"
#include "resq/resource_sets.hpp"

namespace resq {

struct MeasureValue {
  double bits = 0.0;
  bool infinite = false;
  bool contained = false;  // smoothing ball held a free state
  std::optional<DensityMatrix> witness_state;  // optimal sigma (or rho')
  std::optional<DensityMatrix> complement;     // sigma* when defined
  std::optional<ComplexMatrix> witness_operator;  // optimal P or W
  double dual_gap = 0.0;
};

// solver tolerances used by the measure programs (default {1e-9, 1e-9, 200});
// mutable so the CLI can apply the RESQ_TOL override
SolverOptions& measure_solver_options();

MeasureValue d_min(const DensityMatrix& rho, const FreeSet& f);
MeasureValue d_max(const DensityMatrix& rho, const FreeSet& f);
MeasureValue d_s(const DensityMatrix& rho, const FreeSet& f);
MeasureValue d_h(const DensityMatrix& rho, const FreeSet& f, double eps);
MeasureValue d_max_smooth(const DensityMatrix& rho, const FreeSet& f,
                          double eps);
MeasureValue d_s_smooth(const DensityMatrix& rho, const FreeSet& f,
                        double eps);
MeasureValue d_min_aff(const DensityMatrix& rho, const FreeSet& f);
MeasureValue d_h_aff(const DensityMatrix& rho, const FreeSet& f, double eps);

double weight(const DensityMatrix& rho, const FreeSet& f);
double stab_norm(const ComplexMatrix& a, int num_qubits);
double r_tr(const DensityMatrix& rho, const FreeSet& f);

struct GFidelity {
  double primal = 0.0;
  double dual = 0.0;
  ComplexMatrix witness;  // optimal W
};
/// Best fidelity of distilling a K-normalized target; primal and dual routes.
GFidelity g_fidelity(const DensityMatrix& rho, const FreeSet& f, double k);

/// Generalized robustness through the dual witness program
/// (the cone-side route; value agrees with d_max).
MeasureValue d_max_dual_route(const DensityMatrix& rho, const FreeSet& f);

struct RateLadder {
  std::vector<double> rates;  // strictly increasing
};

double one_shot_yield(const DensityMatrix& rho, const FreeSet& f,
                      const RateLadder& ladder, double eps);
double one_shot_cost(const DensityMatrix& rho, const FreeSet& f,
                     const RateLadder& ladder, double eps);

}  // namespace resq
