#include "resq/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace resq {

namespace {

constexpr double kLog2 = 0.6931471805599453;

double log2of(double x) { return std::log(x) / kLog2; }

void check_pair(const ErrorPair& e, bool strict) {
  if (e.eps1 < 0.0 || e.eps1 >= 1.0 || e.eps2 < 0.0 || e.eps2 > 1.0)
    throw OutOfRegion("error pair outside [0,1) x [0,1]");
  if (strict ? (e.eps1 + e.eps2 >= 1.0) : (e.eps1 + e.eps2 > 1.0))
    throw OutOfRegion("error pair outside eps1 + eps2 bound");
}

}  // namespace

FBranch f_branch(const ErrorPair& e) {
  return e.eps1 + std::sqrt(e.eps2) < 1.0 ? FBranch::SqrtRegion
                                          : FBranch::FallbackRegion;
}

namespace {

// sqrt(1-e2) - sqrt(e1) rationalized through 1 - e1 - e2; stable next to
// the e1 + e2 = 1 boundary
double sqrt_gap(const ErrorPair& e) {
  return (1.0 - e.eps1 - e.eps2) /
         (std::sqrt(1.0 - e.eps2) + std::sqrt(e.eps1));
}

// 1 - eps' evaluated in the (delta, p) variables, which stay accurate as
// eps1 + eps2 approaches 1
double eps_prime_complement(const ErrorPair& e) {
  const double delta = 1.0 - e.eps1 - e.eps2;
  const double p = e.eps1 * e.eps2;
  const double sp = std::sqrt(p);
  const double sdp = std::sqrt(delta + p);
  return delta * (1.0 - 2.0 * sp / (sdp + sp));
}

}  // namespace

double f_bound(const ErrorPair& e) {
  check_pair(e, /*strict=*/false);
  const double root = sqrt_gap(e);
  const double fallback = root <= 0.0 ? kInf : 1.0 / (root * root);
  if (f_branch(e) == FBranch::FallbackRegion) return fallback;
  const double first = 1.0 / (1.0 - e.eps1 - std::sqrt(e.eps2));
  return std::min(first, fallback);
}

double eps_prime(const ErrorPair& e) {
  check_pair(e, /*strict=*/true);
  return std::min(1.0 - eps_prime_complement(e),
                  std::nextafter(1.0, 0.0));
}

BoundReport compare_bounds(const ErrorPair& e) {
  check_pair(e, /*strict=*/true);
  BoundReport rep;
  rep.log_f = log2of(f_bound(e));
  rep.log_inv_1m_eps_prime = -log2of(eps_prime_complement(e));
  rep.region = f_branch(e);
  const double s2 = std::sqrt(e.eps2);
  const double s1m2 = std::sqrt(1.0 - e.eps2);
  rep.crossing_lo = 0.5 * (1.0 - s1m2) * (1.0 - s2);
  rep.crossing_hi = 0.5 * (1.0 + s1m2) * (1.0 - s2);
  if (rep.log_inv_1m_eps_prime > rep.log_f + 1e-12)
    throw AssertionFailure("state bound exceeded the channel bound");
  return rep;
}

double classical_fidelity(const RealVector& p, const RealVector& q) {
  if (p.size() != q.size())
    throw DimensionMismatch("classical_fidelity: size mismatch");
  if (p.minCoeff() < -1e-12 || q.minCoeff() < -1e-12 ||
      std::abs(p.sum() - 1.0) > 1e-9 || std::abs(q.sum() - 1.0) > 1e-9)
    throw OutOfRange("classical_fidelity: not probability distributions");
  double s = 0;
  for (Index i = 0; i < p.size(); ++i)
    s += std::sqrt(std::max(0.0, p[i]) * std::max(0.0, q[i]));
  return s * s;
}

EtaBounds eta_bounds(double kappa, double eps) {
  if (kappa < 0.0 || kappa > 1.0 || eps < 0.0 || eps > 1.0)
    throw OutOfRange("eta_bounds: arguments must lie in [0,1]");
  EtaBounds exact{kappa, kappa};
  if (eps <= 1e-15) return exact;  // fidelity 1 forces eta = kappa
  const double target = 1.0 - eps;
  auto fcl = [&](double eta) {
    const double v = std::sqrt(eta * kappa) +
                     std::sqrt((1.0 - eta) * (1.0 - kappa));
    return v * v;
  };
  // F_cl is unimodal in eta with maximum 1 at eta = kappa
  EtaBounds out;
  if (fcl(0.0) >= target) {
    out.eta_min = 0.0;
  } else {
    double lo = 0.0, hi = kappa;
    for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      (fcl(mid) >= target ? hi : lo) = mid;
    }
    out.eta_min = std::clamp(hi, 0.0, 1.0);
  }
  if (fcl(1.0) >= target) {
    out.eta_max = 1.0;
  } else {
    double lo = kappa, hi = 1.0;
    for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
      const double mid = 0.5 * (lo + hi);
      (fcl(mid) >= target ? lo : hi) = mid;
    }
    out.eta_max = std::clamp(lo, 0.0, 1.0);
  }
  return out;
}

SmoothedClosedForm closed_form_smoothed(double r, double kappa, double eps,
                                        SetMode mode) {
  if (r < 0.0) throw OutOfRange("closed_form_smoothed: r must be >= 0");
  if (kappa < 0.0 || kappa > 1.0 || eps < 0.0 || eps >= 1.0)
    throw OutOfRange("closed_form_smoothed: arguments out of range");
  SmoothedClosedForm out;
  const EtaBounds eta = eta_bounds(kappa, eps);
  const double pow_r = std::pow(2.0, -r);
  if (kappa == 1.0) {
    out.d_h = r + log2of(1.0 / (1.0 - eps));
  } else if (eps == 0.0) {
    if (mode == SetMode::FullDim)
      out.d_h = 0.0;
    else
      out.d_h = kappa == 0.0 ? log2of(1.0 / (1.0 - pow_r)) : 0.0;
  }
  if (mode == SetMode::FullDim) {
    const double v =
        eta.eta_min <= 0.0 ? 0.0 : r - log2of(1.0 / eta.eta_min);
    out.d_max_smooth = std::max(v, 0.0);
    out.d_s_smooth = out.d_max_smooth;
  } else {
    if (eta.eta_min >= pow_r)
      out.d_max_smooth = r - log2of(1.0 / eta.eta_min);
    else if (eta.eta_max <= pow_r)
      out.d_max_smooth = log2of((1.0 - eta.eta_max) / (1.0 - pow_r));
    else
      out.d_max_smooth = 0.0;
  }
  return out;
}

IsotropicExact isotropic_exact(double r, double kappa, SetMode mode) {
  if (r < 0.0) throw OutOfRange("isotropic_exact: r must be >= 0");
  if (kappa < 0.0 || kappa > 1.0)
    throw OutOfRange("isotropic_exact: kappa must lie in [0,1]");
  IsotropicExact out;
  const double pow_r = std::pow(2.0, -r);
  const double robust =
      kappa <= 0.0 ? 0.0 : std::max(r - log2of(1.0 / kappa), 0.0);
  if (mode == SetMode::FullDim) {
    out.d_min = kappa == 1.0 ? r : 0.0;
    out.d_max = robust;
    out.d_s = robust;
  } else {
    if (kappa == 1.0)
      out.d_min = r;
    else if (kappa == 0.0)
      out.d_min = log2of(1.0 / (1.0 - pow_r));
    else
      out.d_min = 0.0;
    out.d_min_aff = out.d_min;
    const double alt =
        kappa >= 1.0 ? -kInf : log2of((1.0 - kappa) / (1.0 - pow_r));
    out.d_max = std::max(kappa <= 0.0 ? -kInf : r - log2of(1.0 / kappa), alt);
  }
  return out;
}

YieldCostCheck yield_cost_check(const DensityMatrix& rho, const FreeSet& f,
                                const RateLadder& ladder, const ErrorPair& e) {
  YieldCostCheck out;
  out.report = compare_bounds(e);
  out.yield = one_shot_yield(rho, f, ladder, e.eps1);
  out.cost = one_shot_cost(rho, f, ladder, e.eps2);
  out.f_bound_holds = out.yield <= out.cost + out.report.log_f + 1e-6;
  out.state_bound_holds =
      out.yield <= out.cost + out.report.log_inv_1m_eps_prime + 1e-6;
  return out;
}

}  // namespace resq
