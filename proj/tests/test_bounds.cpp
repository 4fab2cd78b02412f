#include <doctest.h>

#include <cmath>

#include "resq/bounds.hpp"
#include "resq/twirl.hpp"

using namespace resq;

TEST_CASE("f_bound values and branches") {
  CHECK(f_bound({0.0, 0.0}) == 1.0);
  // both branches evaluated at (0.25, 0.25): min{4, (sqrt(.75)-.5)^-2}
  CHECK(f_bound({0.25, 0.25}) == doctest::Approx(4.0).epsilon(1e-12));
  const double second = 1.0 / std::pow(std::sqrt(0.75) - 0.5, 2);
  CHECK(second > 4.0);
  // fallback branch when e1 + sqrt(e2) >= 1
  const ErrorPair edge{0.9, 0.05};
  CHECK(f_branch(edge) == FBranch::FallbackRegion);
  CHECK(f_bound(edge) ==
        doctest::Approx(1.0 / std::pow(std::sqrt(0.95) - std::sqrt(0.9), 2)));
  CHECK_THROWS_AS(f_bound({0.7, 0.5}), OutOfRegion);
}

TEST_CASE("f is at least 1 and continuous at the branch boundary") {
  for (double e1 = 0.0; e1 < 1.0; e1 += 0.05)
    for (double e2 = 0.0; e1 + e2 <= 1.0 + 1e-12; e2 += 0.05)
      if (e1 + e2 <= 1.0) CHECK(f_bound({e1, e2}) >= 1.0 - 1e-12);
  // approach e1 + sqrt(e2) = 1 from inside the first region where the
  // second branch is active: both branches coincide in the limit
  const double e2 = 0.36;
  const double e1b = 1.0 - std::sqrt(e2);
  const double inside = f_bound({e1b - 1e-9, e2});
  const double at_boundary = f_bound({e1b, e2});
  CHECK(std::abs(inside - at_boundary) <=
        1e-9 * std::abs(at_boundary) * 1e3 + 1e-5);
}

TEST_CASE("crossing interval at eps2 = 0.04") {
  const BoundReport rep = compare_bounds({0.1, 0.04});
  const double lo = 0.5 * (1 - std::sqrt(0.96)) * (1 - 0.2);
  const double hi = 0.5 * (1 + std::sqrt(0.96)) * (1 - 0.2);
  CHECK(rep.crossing_lo == doctest::Approx(lo).epsilon(1e-12));
  CHECK(rep.crossing_hi == doctest::Approx(hi).epsilon(1e-12));
  // inside the interval the first branch is smaller
  for (double e1 : {lo + 1e-3, 0.3, hi - 1e-3}) {
    const double first = 1.0 / (1.0 - e1 - 0.2);
    const double second = 1.0 / std::pow(std::sqrt(0.96) - std::sqrt(e1), 2);
    CHECK(first <= second + 1e-12);
  }
  for (double e1 : {lo - 1e-3, hi + 1e-3}) {
    const double first = 1.0 / (1.0 - e1 - 0.2);
    const double second = 1.0 / std::pow(std::sqrt(0.96) - std::sqrt(e1), 2);
    CHECK(first >= second - 1e-12);
  }
}

TEST_CASE("eps_prime") {
  CHECK(eps_prime({0.3, 0.0}) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(eps_prime({0.0, 0.3}) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(eps_prime({0.1, 0.1}) == doctest::Approx(0.36).epsilon(1e-14));
  for (double a = 0.0; a < 0.5; a += 0.07)
    for (double b = 0.0; a + b < 1.0; b += 0.11)
      CHECK(std::abs(eps_prime({a, b}) - eps_prime({b, a})) <= 1e-15);
  // approaching the boundary drives eps' to 1 but keeps it below
  CHECK(eps_prime({0.499, 0.499}) < 1.0);
  CHECK(eps_prime({0.4999, 0.4999}) > 0.999);
  CHECK_THROWS_AS(eps_prime({0.5, 0.5}), OutOfRegion);
}

TEST_CASE("compare_bounds") {
  const BoundReport zero = compare_bounds({0.0, 0.0});
  CHECK(zero.log_f == 0.0);
  CHECK(zero.log_inv_1m_eps_prime == 0.0);
  const BoundReport mid = compare_bounds({0.3, 0.3});
  CHECK(mid.log_inv_1m_eps_prime < mid.log_f);
  for (double a = 0.0; a < 1.0; a += 0.05)
    for (double b = 0.0; a + b < 1.0; b += 0.05) {
      const BoundReport rep = compare_bounds({a, b});
      CHECK(rep.log_inv_1m_eps_prime <= rep.log_f + 1e-12);
    }
}

TEST_CASE("classical fidelity and eta bounds") {
  RealVector p(2), q(2);
  p << 0.3, 0.7;
  q << 0.3, 0.7;
  CHECK(classical_fidelity(p, q) == doctest::Approx(1.0).epsilon(1e-14));
  q << 0.7, 0.3;
  CHECK(classical_fidelity(p, q) ==
        doctest::Approx(std::pow(2 * std::sqrt(0.21), 2)).epsilon(1e-12));

  EtaBounds full = eta_bounds(1.0, 0.25);
  CHECK(full.eta_min == doctest::Approx(0.75).epsilon(1e-11));
  CHECK(full.eta_max == doctest::Approx(1.0));
  EtaBounds tight = eta_bounds(0.6, 0.0);
  CHECK(tight.eta_min == doctest::Approx(0.6).epsilon(1e-11));
  CHECK(tight.eta_max == doctest::Approx(0.6).epsilon(1e-11));
  EtaBounds mid = eta_bounds(0.5, 0.02);
  auto fcl = [](double eta, double kappa) {
    return std::pow(std::sqrt(eta * kappa) +
                        std::sqrt((1 - eta) * (1 - kappa)),
                    2);
  };
  CHECK(fcl(mid.eta_min, 0.5) == doctest::Approx(0.98).epsilon(1e-10));
  CHECK(fcl(mid.eta_max, 0.5) == doctest::Approx(0.98).epsilon(1e-10));
}

TEST_CASE("closed-form smoothed measures") {
  const SmoothedClosedForm plain =
      closed_form_smoothed(1.3, 1.0, 0.0, SetMode::FullDim);
  REQUIRE(plain.d_h.has_value());
  CHECK(*plain.d_h == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(plain.d_max_smooth == doctest::Approx(1.3).epsilon(1e-12));

  const SmoothedClosedForm half =
      closed_form_smoothed(1.0, 1.0, 0.5, SetMode::FullDim);
  CHECK(half.d_max_smooth ==
        doctest::Approx(std::max(1.0 - std::log2(2.0), 0.0)).epsilon(1e-10));
  REQUIRE(half.d_s_smooth.has_value());

  const SmoothedClosedForm reduced =
      closed_form_smoothed(1.0, 0.0, 0.0, SetMode::ReducedDim);
  REQUIRE(reduced.d_h.has_value());
  CHECK(*reduced.d_h == doctest::Approx(std::log2(2.0)).epsilon(1e-10));
}

TEST_CASE("isotropic exact values") {
  const IsotropicExact top = isotropic_exact(1.7, 1.0, SetMode::FullDim);
  CHECK(top.d_min == doctest::Approx(1.7));
  CHECK(top.d_max == doctest::Approx(1.7));
  const IsotropicExact thresh =
      isotropic_exact(1.0, 0.5, SetMode::FullDim);
  CHECK(thresh.d_max == doctest::Approx(0.0));
  const IsotropicExact mid = isotropic_exact(1.0, 0.75, SetMode::FullDim);
  CHECK(mid.d_max ==
        doctest::Approx(1.0 - std::log2(4.0 / 3.0)).epsilon(1e-12));
  CHECK(mid.d_min == 0.0);

  const IsotropicExact red = isotropic_exact(1.0, 0.0, SetMode::ReducedDim);
  CHECK(red.d_min == doctest::Approx(1.0));  // log2(1/(1-1/2))
  CHECK(red.d_max == doctest::Approx(1.0));
  const IsotropicExact red1 = isotropic_exact(2.0, 1.0, SetMode::ReducedDim);
  CHECK(red1.d_min == doctest::Approx(2.0));
  CHECK(red1.d_max == doctest::Approx(2.0));
}

TEST_CASE("closed forms track the solver on the norrell family") {
  const FreeSet hull = stabilizer_states_qutrit(1);
  const DensityMatrix norrell = named_state("norrell");
  const double r = std::log2(1.5);
  for (double eps = 0.0; eps <= 0.5 + 1e-12; eps += 0.1) {
    const SmoothedClosedForm cf =
        closed_form_smoothed(r, 1.0, eps, SetMode::FullDim);
    REQUIRE(cf.d_h.has_value());
    CHECK(std::abs(d_h(norrell, hull, eps).bits - *cf.d_h) <= 1e-4);
    CHECK(std::abs(d_max_smooth(norrell, hull, eps).bits - cf.d_max_smooth) <=
          1e-4);
    CHECK(std::abs(d_s_smooth(norrell, hull, eps).bits - *cf.d_s_smooth) <=
          1e-4);
  }
  // isotropic family built from the channel complement
  const TwirlChannel chan = build_twirl_channel(norrell, hull);
  for (double kappa : {0.0, 0.3, 0.7, 1.0}) {
    const DensityMatrix phi_k = isotropic(norrell, chan.sigma_star, kappa);
    const IsotropicExact ex = isotropic_exact(r, kappa, SetMode::FullDim);
    CHECK(std::abs(d_min(phi_k, hull).bits - ex.d_min) <= 1e-4);
    CHECK(std::abs(d_max(phi_k, hull).bits - ex.d_max) <= 1e-4);
    CHECK(std::abs(d_s(phi_k, hull).bits - *ex.d_s) <= 1e-4);
  }
}

TEST_CASE("yield-cost check") {
  const FreeSet hull = stabilizer_states_qutrit(1);
  const DensityMatrix strange = named_state("strange");
  RateLadder ladder{{1.0, 2.0, 3.0}};
  const YieldCostCheck eq =
      yield_cost_check(strange, hull, ladder, {0.0, 0.0});
  CHECK(eq.yield == doctest::Approx(eq.cost));
  CHECK(eq.f_bound_holds);
  CHECK(eq.state_bound_holds);
  const YieldCostCheck loose =
      yield_cost_check(strange, hull, ladder, {0.1, 0.1});
  CHECK(loose.f_bound_holds);
  CHECK(loose.state_bound_holds);
}
