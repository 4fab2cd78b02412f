// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 1-13 come from the shared verification registry; the
// property suites (criterion 14) run here with fixed seeds because they use
// the test-only simplex oracle.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <vector>

#include "resq/bounds.hpp"
#include "resq/measures.hpp"
#include "resq/twirl.hpp"
#include "resq/verify.hpp"
#include "support/simplex_oracle.hpp"

using namespace resq;

namespace {

std::mt19937_64 rng(0xacce972026ULL);

DensityMatrix random_density(Index d) {
  std::normal_distribution<double> g;
  ComplexMatrix a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

ComplexMatrix random_hermitian(Index d) {
  std::normal_distribution<double> g;
  ComplexMatrix a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

std::vector<CheckResult> property_checks() {
  std::vector<CheckResult> out;
  auto rec = [&](const std::string& name, bool pass, double observed,
                 double tol, const std::string& note = "") {
    out.push_back({14, name, pass, observed, tol, note});
  };

  {  // ordering chain, 200 random states per free set
    struct SetCase {
      FreeSet set;
      Index dim;
    };
    std::vector<SetCase> sets;
    sets.push_back({stabilizer_states(1), 2});
    sets.push_back({stabilizer_states_qutrit(1), 3});
    sets.push_back({coherence_set(3), 3});
    sets.push_back({ppt_set(2, 2), 4});
    double worst = 0;
    bool ok = true;
    for (const auto& sc : sets) {
      for (int t = 0; t < 200; ++t) {
        const DensityMatrix rho = random_density(sc.dim);
        const double aff = d_min_aff(rho, sc.set).bits;
        const double mn = d_min(rho, sc.set).bits;
        const double mx = d_max(rho, sc.set).bits;
        worst = std::max({worst, aff - mn, mn - mx});
        const MeasureValue ds_v = d_s(rho, sc.set);
        if (!ds_v.infinite) worst = std::max(worst, mx - ds_v.bits);
        if (worst > 1e-6) ok = false;
      }
    }
    rec("ordering chain d_min_aff <= d_min <= d_max <= d_s (4 sets x 200)",
        ok, worst, 1e-6, "max violation");
  }

  {  // epsilon monotonicity on a grid
    const FreeSet hull = stabilizer_states(1);
    const DensityMatrix face = named_state("face");
    const DensityMatrix strange = named_state("strange");
    const FreeSet qutrit = stabilizer_states_qutrit(1);
    double worst = 0;
    auto sweep = [&](const DensityMatrix& rho, const FreeSet& f) {
      double prev_h = -kInf, prev_m = kInf, prev_s = kInf;
      for (double eps : {0.0, 0.05, 0.1, 0.2, 0.3, 0.4}) {
        const double h = d_h(rho, f, eps).bits;
        const double m = d_max_smooth(rho, f, eps).bits;
        const double s = d_s_smooth(rho, f, eps).bits;
        worst = std::max({worst, prev_h - h, m - prev_m, s - prev_s});
        prev_h = h;
        prev_m = m;
        prev_s = s;
      }
    };
    sweep(face, hull);
    sweep(strange, qutrit);
    rec("epsilon monotonicity of d_h and the smoothed measures",
        worst <= 1e-6, worst, 1e-6, "max violation");
  }

  {  // measures vanish on every vertex
    double worst = 0;
    for (const FreeSet& f :
         {stabilizer_states(1), stabilizer_states_qutrit(1),
          coherence_set(3)}) {
      for (const auto& v : f.vertices()) {
        worst = std::max({worst, d_min(v, f).bits, d_max(v, f).bits,
                          d_s(v, f).bits, r_tr(v, f),
                          1.0 - weight(v, f)});
      }
    }
    rec("vertex nullity of d_min, d_max, d_s, r_tr and weight",
        worst <= 1e-6, worst, 1e-6, "max deviation");
  }

  {  // LP agreement with the simplex oracle
    std::uniform_int_distribution<int> nd(2, 14), md(1, 6);
    std::normal_distribution<double> g;
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const int n = nd(rng), m = std::min(md(rng), n - 1);
      RealMatrix a(m, n);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = g(rng);
      RealVector x0(n);
      for (int j = 0; j < n; ++j) x0[j] = std::abs(g(rng)) + 0.1;
      RealVector b = a * x0;
      RealVector c(n);
      for (int j = 0; j < n; ++j) c[j] = std::abs(g(rng)) + 0.05;
      LinearProgram p;
      p.objective = c;
      p.eq_lhs = a;
      p.eq_rhs = b;
      p.lower = RealVector::Zero(n);
      const Solution s = solve_lp(p, SolverOptions{1e-10, 1e-10, 200});
      const testing::SimplexResult oracle = testing::simplex_solve(a, b, c);
      if (s.status != SolveStatus::Optimal || !oracle.optimal) {
        worst = kInf;
        break;
      }
      worst = std::max(worst, std::abs(s.value - oracle.value) /
                                  (1.0 + std::abs(oracle.value)));
    }
    rec("interior-point LP agrees with the simplex oracle (100 programs)",
        worst <= 1e-7, worst, 1e-7, "max relative gap");
  }

  {  // SDP agreement with the bisection-plus-eigenvalue oracle
    std::uniform_int_distribution<Index> dims(2, 6);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const Index d = dims(rng);
      const ComplexMatrix a = random_hermitian(d);
      const ComplexMatrix root = random_hermitian(d);
      const ComplexMatrix mpos =
          root * root.adjoint() + 0.3 * ComplexMatrix::Identity(d, d);
      SdpProblem p;
      p.num_vars = 1;
      p.objective = RealVector::Ones(1);
      SdpBlock blk;
      blk.constant = a;
      blk.coeffs = {mpos};
      p.blocks = {blk};
      p.ineq_lhs = RealMatrix(0, 1);
      p.ineq_rhs = RealVector(0);
      p.eq_lhs = RealMatrix(0, 1);
      p.eq_rhs = RealVector(0);
      const Solution s = solve_sdp(p);
      auto feasible = [&](double t) {
        return min_eigenvalue(t * mpos - a) >= 0;
      };
      double lo = -64, hi = 64;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
      }
      if (s.status != SolveStatus::Optimal) worst = kInf;
      worst = std::max(worst, std::abs(s.value - hi));
    }
    rec("interior-point SDP agrees with the bisection oracle (20 programs)",
        worst <= 1e-5, worst, 1e-5, "max deviation");
  }

  return out;
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  std::vector<CheckResult> checks = run_checks("all");
  const std::vector<CheckResult> props = property_checks();
  checks.insert(checks.end(), props.begin(), props.end());

  std::map<int, std::pair<bool, int>> by_criterion;
  for (const auto& c : checks) {
    auto [it, fresh] = by_criterion.try_emplace(c.criterion, true, 0);
    it->second.first = it->second.first && c.pass;
    it->second.second += 1;
  }

  printf("---- acceptance detail ----\n");
  for (const auto& c : checks) {
    printf("[%s] c%02d %-62s observed %10.3e tol %9.3e%s%s\n",
           c.pass ? "pass" : "FAIL", c.criterion, c.name.c_str(), c.observed,
           c.tolerance, c.note.empty() ? "" : "  ", c.note.c_str());
  }

  printf("---- acceptance criteria ----\n");
  bool all = true;
  for (const auto& [criterion, agg] : by_criterion) {
    printf("criterion %2d: %s (%d checks)\n", criterion,
           agg.first ? "PASS" : "FAIL", agg.second);
    all = all && agg.first;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  printf("total wall time %.1f s\n", secs);
  printf(all ? "ACCEPTANCE PASSED\n" : "ACCEPTANCE FAILED\n");
  return all ? 0 : 1;
}
