#pragma once

#include <optional>

#include "resq/measures.hpp"

namespace resq {

struct ErrorPair {
  double eps1 = 0.0;
  double eps2 = 0.0;
};

enum class FBranch { SqrtRegion, FallbackRegion };

struct BoundReport {
  double log_f = 0.0;                 // one-shot bound, bits
  double log_inv_1m_eps_prime = 0.0;  // state bound, bits
  FBranch region = FBranch::SqrtRegion;
  double crossing_lo = 0.0;  // eps1 interval where the first branch wins
  double crossing_hi = 0.0;
};

/// min{(1-e1-sqrt(e2))^{-1}, (sqrt(1-e2)-sqrt(e1))^{-2}} inside
/// e1 + sqrt(e2) < 1, the second expression otherwise.
double f_bound(const ErrorPair& e);
FBranch f_branch(const ErrorPair& e);

/// (sqrt(e1(1-e2)) + sqrt(e2(1-e1)))^2, for e1 + e2 < 1.
double eps_prime(const ErrorPair& e);

BoundReport compare_bounds(const ErrorPair& e);

double classical_fidelity(const RealVector& p, const RealVector& q);

struct EtaBounds {
  double eta_min = 0.0;
  double eta_max = 1.0;
};
/// extreme eta with F_cl((eta,1-eta),(kappa,1-kappa)) >= 1-eps
EtaBounds eta_bounds(double kappa, double eps);

enum class SetMode { FullDim, ReducedDim };

struct SmoothedClosedForm {
  std::optional<double> d_h;  // defined on the closed-form cases only
  double d_max_smooth = 0.0;
  std::optional<double> d_s_smooth;  // FullDim only
};
SmoothedClosedForm closed_form_smoothed(double r, double kappa, double eps,
                                        SetMode mode);

struct IsotropicExact {
  double d_min = 0.0;
  double d_max = 0.0;
  std::optional<double> d_s;        // FullDim
  std::optional<double> d_min_aff;  // ReducedDim
};
IsotropicExact isotropic_exact(double r, double kappa, SetMode mode);

struct YieldCostCheck {
  BoundReport report;
  double yield = 0.0;
  double cost = 0.0;
  bool f_bound_holds = false;
  bool state_bound_holds = false;
};
YieldCostCheck yield_cost_check(const DensityMatrix& rho, const FreeSet& f,
                                const RateLadder& ladder, const ErrorPair& e);

}  // namespace resq
