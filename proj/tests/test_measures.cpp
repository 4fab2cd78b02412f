#include <doctest.h>

#include <cmath>
#include <random>

#include "resq/measures.hpp"

using namespace resq;

namespace {

std::mt19937_64 rng(0xfeed5);

DensityMatrix random_density(Index d) {
  std::normal_distribution<double> g;
  ComplexMatrix a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

const FreeSet& qubit_hull() {
  static const FreeSet f = stabilizer_states(1);
  return f;
}
const FreeSet& qutrit_hull() {
  static const FreeSet f = stabilizer_states_qutrit(1);
  return f;
}

// frozen oracle value: exhaustive overlap of the face state over 6 vertices
constexpr double kFaceDmin = 0.3424969368840823;
// frozen oracle value: vertex LP for the face state, objective sqrt(3)
constexpr double kFaceDs = 0.4499843147810226;

// independent d_s oracle for the 6-vertex qubit hull: all solutions of
// rho = sum_i x_i v_i form a 2-plane; the l1 minimum of a piecewise-linear
// convex function is attained where two coordinates vanish, so scanning
// every sign pattern boundary pair is exhaustive
double ds_sign_pattern_oracle(const DensityMatrix& rho, const FreeSet& f) {
  const auto& verts = f.vertices();
  const Index nv = static_cast<Index>(verts.size());
  RealMatrix a(4, nv);
  for (Index i = 0; i < nv; ++i) a.col(i) = herm_vec(verts[i].matrix());
  const RealVector b = herm_vec(rho.matrix());
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(a);
  const RealVector x0 = cod.solve(b);
  Eigen::FullPivLU<RealMatrix> lu(a);
  const RealMatrix null = lu.kernel();  // nv x 2 for the qubit hull
  REQUIRE(null.cols() == 2);
  double best = x0.cwiseAbs().sum();
  for (Index i = 0; i < nv; ++i)
    for (Index j = i + 1; j < nv; ++j) {
      RealMatrix m(2, 2);
      m << null(i, 0), null(i, 1), null(j, 0), null(j, 1);
      if (std::abs(m.determinant()) < 1e-12) continue;
      RealVector rhs(2);
      rhs << -x0[i], -x0[j];
      const RealVector ab = m.inverse() * rhs;
      const RealVector x = x0 + null * ab;
      best = std::min(best, x.cwiseAbs().sum());
    }
  return std::log2(0.5 * (best + 1.0));
}

}  // namespace

TEST_CASE("d_min examples") {
  CHECK(d_min(named_state("strange"), qutrit_hull()).bits ==
        doctest::Approx(1.0).epsilon(1e-9));
  DensityMatrix mixed(ComplexMatrix::Identity(2, 2) * 0.5);
  CHECK(d_min(mixed, qubit_hull()).bits == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(d_min(named_state("face"), qubit_hull()).bits ==
        doctest::Approx(kFaceDmin).epsilon(1e-10));
  // witness: the optimal vertex achieves the overlap
  MeasureValue v = d_min(named_state("face"), qubit_hull());
  REQUIRE(v.witness_state.has_value());
  const double overlap =
      (v.witness_state->matrix() * named_state("face").matrix())
          .trace()
          .real();
  CHECK(overlap == doctest::Approx(std::pow(2.0, -v.bits)).epsilon(1e-9));
}

TEST_CASE("d_max examples") {
  CHECK(d_max(named_state("bell2"), ppt_set(2, 2)).bits ==
        doctest::Approx(1.0).epsilon(1e-7));
  CHECK(d_max(qutrit_hull().vertices()[3], qutrit_hull()).bits ==
        doctest::Approx(0.0).epsilon(1e-6));
  MeasureValue v = d_max(named_state("face"), qubit_hull());
  CHECK(v.bits == doctest::Approx(kFaceDmin).epsilon(1e-7));
  REQUIRE(v.witness_state.has_value());
  REQUIRE(v.complement.has_value());
  // complement is orthogonal to the face state
  CHECK((v.complement->matrix() * named_state("face").matrix())
            .trace()
            .real() <= 1e-6);
}

TEST_CASE("d_s examples and the sign-pattern oracle") {
  CHECK(d_s(named_state("norrell"), qutrit_hull()).bits ==
        doctest::Approx(std::log2(1.5)).epsilon(1e-9));
  CHECK(d_s(qubit_hull().vertices()[0], qubit_hull()).bits ==
        doctest::Approx(0.0).epsilon(1e-8));
  const MeasureValue face = d_s(named_state("face"), qubit_hull());
  CHECK(face.bits == doctest::Approx(kFaceDs).epsilon(1e-9));
  // the LP objective equals sqrt(3) for the face state
  CHECK(2.0 * std::pow(2.0, face.bits) - 1.0 ==
        doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
  CHECK(ds_sign_pattern_oracle(named_state("face"), qubit_hull()) ==
        doctest::Approx(face.bits).epsilon(1e-9));
  // oracle agrees on random qubit states as well
  for (int t = 0; t < 20; ++t) {
    const DensityMatrix rho = random_density(2);
    CHECK(ds_sign_pattern_oracle(rho, qubit_hull()) ==
          doctest::Approx(d_s(rho, qubit_hull()).bits).epsilon(1e-7));
  }
}

TEST_CASE("d_max detects states outside the hull support") {
  std::vector<DensityMatrix> single;
  ComplexMatrix zero(2, 2);
  zero << 1, 0, 0, 0;
  single.emplace_back(zero);
  const FreeSet tiny = FreeSet::vertex_hull(single, "point");
  ComplexMatrix one(2, 2);
  one << 0, 0, 0, 1;
  CHECK(d_max(DensityMatrix(one), tiny).infinite);
  CHECK(d_max(DensityMatrix(zero), tiny).bits ==
        doctest::Approx(0.0).epsilon(1e-7));
}

TEST_CASE("d_s is infinite on reduced-dimensional sets") {
  ComplexMatrix off(2, 2);
  off << 0.5, 0.25, 0.25, 0.5;
  const MeasureValue v = d_s(DensityMatrix(off), coherence_set(2));
  CHECK(v.infinite);
}

TEST_CASE("d_h examples") {
  CHECK(d_h(named_state("strange"), qutrit_hull(), 0.0).bits ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d_h(named_state("strange"), qutrit_hull(), 0.2).bits ==
        doctest::Approx(1.0 + std::log2(1.0 / 0.8)).epsilon(1e-7));
  CHECK(d_h(qutrit_hull().vertices()[0], qutrit_hull(), 0.0).bits ==
        doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS_AS(d_h(named_state("strange"), qutrit_hull(), 1.0), OutOfRange);
  // d_h(.,0) = d_min on random states
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = random_density(3);
    CHECK(std::abs(d_h(rho, qutrit_hull(), 0.0).bits -
                   d_min(rho, qutrit_hull()).bits) <= 1e-6);
  }
}

TEST_CASE("smoothed measures") {
  const DensityMatrix strange = named_state("strange");
  // eps = 0 degenerates to the unsmoothed measures
  CHECK(d_max_smooth(strange, qutrit_hull(), 0.0).bits ==
        doctest::Approx(d_max(strange, qutrit_hull()).bits).epsilon(1e-9));
  CHECK(d_s_smooth(strange, qutrit_hull(), 0.0).bits ==
        doctest::Approx(d_s(strange, qutrit_hull()).bits).epsilon(1e-9));
  // eta_min = 0.7 at eps = 0.3
  CHECK(d_max_smooth(strange, qutrit_hull(), 0.3).bits ==
        doctest::Approx(1.0 - std::log2(1.0 / 0.7)).epsilon(1e-5));
  // below the 2^-r threshold everything is contained
  const MeasureValue v = d_max_smooth(strange, qutrit_hull(), 0.55);
  CHECK(v.bits == 0.0);
  CHECK(v.contained);
}

TEST_CASE("affine measures") {
  // full-dimensional sets: zero by construction
  CHECK(d_min_aff(named_state("strange"), qutrit_hull()).bits == 0.0);
  // reduced-dimensional coherence theory
  for (int m : {2, 3}) {
    CHECK(d_min_aff(named_state("max_coherent" + std::to_string(m)),
                    coherence_set(m))
              .bits == doctest::Approx(std::log2(m)).epsilon(1e-7));
  }
  ComplexMatrix zero(2, 2);
  zero << 1, 0, 0, 0;
  CHECK(d_min_aff(DensityMatrix(zero), coherence_set(2)).bits ==
        doctest::Approx(0.0).epsilon(1e-7));
  // the affine SDP on a full-dimensional set also reports zero
  CHECK(d_h_aff(named_state("strange"), qutrit_hull(), 0.0).bits ==
        doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("weight examples") {
  CHECK(weight(qutrit_hull().vertices()[5], qutrit_hull()) ==
        doctest::Approx(1.0).epsilon(1e-8));
  const ComplexMatrix t = named_state("t_qutrit").matrix();
  CHECK(weight(DensityMatrix(0.5 * (ComplexMatrix::Identity(3, 3) - t)),
               qutrit_hull()) <= 1e-6);
  const ComplexMatrix s = named_state("strange").matrix();
  CHECK(weight(DensityMatrix(0.5 * (ComplexMatrix::Identity(3, 3) - s)),
               qutrit_hull()) >= 1.0 - 1e-6);
}

TEST_CASE("stab_norm examples") {
  CHECK(stab_norm(ComplexMatrix::Identity(2, 2) * 0.5, 1) ==
        doctest::Approx(0.5).epsilon(1e-14));
  ComplexMatrix zero(2, 2);
  zero << 1, 0, 0, 0;
  CHECK(stab_norm(zero, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(stab_norm(named_state("hoggar").matrix(), 3) ==
        doctest::Approx(2.75).epsilon(1e-12));
  CHECK_THROWS_AS(stab_norm(ComplexMatrix::Identity(3, 3) / 3.0, 1),
                  DimensionMismatch);
}

TEST_CASE("trace-distance measure") {
  CHECK(r_tr(qutrit_hull().vertices()[0], qutrit_hull()) <= 1e-7);
  CHECK(r_tr(named_state("strange"), qutrit_hull()) ==
        doctest::Approx(0.5).epsilon(1e-7));
  CHECK(r_tr(named_state("norrell"), qutrit_hull()) ==
        doctest::Approx(1.0 / 3).epsilon(1e-7));
}

TEST_CASE("distillation fidelity") {
  const GFidelity free4 =
      g_fidelity(qutrit_hull().vertices()[0], qutrit_hull(), 4.0);
  CHECK(free4.primal == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(std::abs(free4.primal - free4.dual) <= 1e-6);
  const GFidelity any1 = g_fidelity(random_density(3), qutrit_hull(), 1.0);
  CHECK(any1.primal == doctest::Approx(1.0).epsilon(1e-7));
  const GFidelity s2 = g_fidelity(named_state("strange"), qutrit_hull(), 2.0);
  CHECK(s2.primal == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(s2.primal - s2.dual) <= 1e-6);
  CHECK_THROWS_AS(g_fidelity(named_state("strange"), qutrit_hull(), 0.5),
                  OutOfRange);
}

TEST_CASE("one-shot yield and cost") {
  RateLadder ladder{{1.0, 2.0, 3.0}};
  const DensityMatrix strange = named_state("strange");
  CHECK(one_shot_yield(strange, qutrit_hull(), ladder, 0.0) ==
        doctest::Approx(1.0));
  CHECK(one_shot_cost(strange, qutrit_hull(), ladder, 0.0) ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(one_shot_yield(strange, qutrit_hull(), RateLadder{}, 0.0),
                  EmptyLadder);
  CHECK_THROWS_AS(
      one_shot_yield(strange, qutrit_hull(), RateLadder{{1.0, 1.0}}, 0.0),
      OutOfRange);
}

TEST_CASE("measure ordering chain on random states") {
  for (int t = 0; t < 30; ++t) {
    const DensityMatrix rho = random_density(3);
    const double aff = d_min_aff(rho, qutrit_hull()).bits;
    const double mn = d_min(rho, qutrit_hull()).bits;
    const double mx = d_max(rho, qutrit_hull()).bits;
    const MeasureValue ds_v = d_s(rho, qutrit_hull());
    CHECK(aff <= mn + 1e-6);
    CHECK(mn <= mx + 1e-6);
    if (!ds_v.infinite) CHECK(mx <= ds_v.bits + 1e-6);
  }
}

TEST_CASE("epsilon monotonicity") {
  const DensityMatrix face = named_state("face");
  double prev_h = -1, prev_m = 10, prev_s = 10;
  for (double eps : {0.0, 0.1, 0.2, 0.3}) {
    const double h = d_h(face, qubit_hull(), eps).bits;
    const double m = d_max_smooth(face, qubit_hull(), eps).bits;
    const double sv = d_s_smooth(face, qubit_hull(), eps).bits;
    CHECK(h >= prev_h - 1e-6);
    CHECK(m <= prev_m + 1e-6);
    CHECK(sv <= prev_s + 1e-6);
    prev_h = h;
    prev_m = m;
    prev_s = sv;
  }
}

TEST_CASE("hull and dual-route d_max agree on the 2-qubit hull") {
  const FreeSet hull = stabilizer_states(2);
  for (int t = 0; t < 5; ++t) {
    const DensityMatrix rho = random_density(4);
    const double primal = d_max(rho, hull).bits;
    const double dual = d_max_dual_route(rho, hull).bits;
    CHECK(std::abs(primal - dual) <= 1e-5);
  }
  const DensityMatrix bb(
      kron(named_state("face").matrix(), named_state("face").matrix()));
  CHECK(std::abs(d_max(bb, hull).bits - d_max_dual_route(bb, hull).bits) <=
        1e-5);
}

TEST_CASE("measures vanish on vertices") {
  for (const auto& f : {qubit_hull(), qutrit_hull()}) {
    for (size_t i = 0; i < f.vertices().size(); i += 2) {
      const DensityMatrix& v = f.vertices()[i];
      CHECK(d_min(v, f).bits <= 1e-6);
      CHECK(d_max(v, f).bits <= 1e-6);
      CHECK(d_s(v, f).bits <= 1e-6);
      CHECK(r_tr(v, f) <= 1e-6);
      CHECK(weight(v, f) >= 1.0 - 1e-6);
    }
  }
}
