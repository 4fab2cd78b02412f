#include <doctest.h>

#include <cmath>
#include <random>

#include "resq/twirl.hpp"

using namespace resq;

namespace {

std::mt19937_64 rng(0x7712);

DensityMatrix random_density(Index d) {
  std::normal_distribution<double> g;
  ComplexMatrix a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

const FreeSet& qutrit_hull() {
  static const FreeSet f = stabilizer_states_qutrit(1);
  return f;
}
const FreeSet& qubit_hull() {
  static const FreeSet f = stabilizer_states(1);
  return f;
}

}  // namespace

TEST_CASE("measure-and-prepare channel for the strange state") {
  const DensityMatrix strange = named_state("strange");
  const TwirlChannel chan = build_twirl_channel(strange, qutrit_hull());
  const ComplexMatrix comp =
      0.5 * (ComplexMatrix::Identity(3, 3) - strange.matrix());
  CHECK((chan.sigma_star.matrix() - comp).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK((chan.p_star * chan.sigma_star.matrix()).trace().real() <= 1e-8);
  CHECK((chan.p_star * strange.matrix()).trace().real() >= 1.0 - 1e-8);

  // fixed points
  CHECK((apply_channel(chan, strange).matrix() - strange.matrix())
            .cwiseAbs()
            .maxCoeff() <= 1e-10);
  CHECK((apply_channel(chan, chan.sigma_star).matrix() - comp)
            .cwiseAbs()
            .maxCoeff() <= 1e-9);

  // output lies in span{Phi, sigma*}; composition is idempotent
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = random_density(3);
    const DensityMatrix out = apply_channel(chan, rho);
    const double p = (strange.matrix() * rho.matrix()).trace().real();
    const ComplexMatrix proj = p * strange.matrix() + (1 - p) * comp;
    CHECK((out.matrix() - proj).norm() <= 1e-9);
    CHECK((apply_channel(chan, out).matrix() - out.matrix()).norm() <= 1e-9);
  }
}

TEST_CASE("measure-and-prepare channel preconditions") {
  CHECK_THROWS_AS(build_twirl_channel(qutrit_hull().vertices()[0],
                                       qutrit_hull()),
                  NoComplement);
  // qutrit T state: d_min < d_s, the precondition fails
  CHECK_THROWS_AS(build_twirl_channel(named_state("t_qutrit"), qutrit_hull()),
                  PreconditionFailed);
}

TEST_CASE("measure-and-prepare channel on the reduced coherence set") {
  const FreeSet coh = coherence_set(3);
  const DensityMatrix phi = named_state("max_coherent3");
  const TwirlChannel chan = build_twirl_channel(phi, coh);
  CHECK((chan.p_star * phi.matrix()).trace().real() >= 1.0 - 1e-7);
  CHECK((chan.p_star * chan.sigma_star.matrix()).trace().real() <= 1e-7);
  CHECK((phi.matrix() * chan.sigma_star.matrix()).trace().real() <= 1e-7);
  const FreenessReport rep = verify_free(chan, coh);
  CHECK(rep.free);
}

TEST_CASE("verify_free on ensembles") {
  // Clifford conjugation permutes the vertices
  const UnitaryEnsemble h = uniform_ensemble({qubit_hadamard()});
  CHECK(verify_free(h, qubit_hull()).free);
  // non-Clifford conjugation is caught with a violation
  ComplexMatrix t = ComplexMatrix::Identity(3, 3);
  t(0, 0) = std::polar(1.0, 2 * std::numbers::pi / 9);
  t(2, 2) = std::polar(1.0, -2 * std::numbers::pi / 9);
  const FreenessReport bad = verify_free(uniform_ensemble({t}), qutrit_hull());
  CHECK_FALSE(bad.free);
  CHECK(bad.worst_violation > 1e-4);
}

TEST_CASE("twirl averages") {
  const DensityMatrix rho = random_density(2);
  const UnitaryEnsemble id = uniform_ensemble({ComplexMatrix::Identity(2, 2)});
  CHECK((twirl_average(id, rho).matrix() - rho.matrix()).norm() <= 1e-12);

  const ComplexMatrix k = qubit_phase() * qubit_hadamard();
  const UnitaryEnsemble face_ens =
      uniform_ensemble({ComplexMatrix::Identity(2, 2), k, k * k});
  const DensityMatrix face = named_state("face");
  CHECK((twirl_average(face_ens, face).matrix() - face.matrix()).norm() <=
        1e-12);

  // full-group average is idempotent and commutes with the group
  const DensityMatrix out = twirl_average(face_ens, rho);
  CHECK((twirl_average(face_ens, out).matrix() - out.matrix()).norm() <= 1e-9);
  for (const auto& u : face_ens.unitaries)
    CHECK((u * out.matrix() * u.adjoint() - out.matrix()).norm() <= 1e-8);
}

TEST_CASE("SL(2,Z3) twirl sends SIC companions to (3I-S)/8") {
  const std::vector<ComplexMatrix> stab = strange_stabilizer_cliffords();
  CHECK(stab.size() == 24);
  const UnitaryEnsemble ens = uniform_ensemble(stab);
  const ComplexMatrix s = named_state("strange").matrix();
  const ComplexMatrix target = (3.0 * ComplexMatrix::Identity(3, 3) - s) / 8.0;
  const ComplexMatrix dk = weyl_operator(3, 1, 2);
  const DensityMatrix psi(dk * s * dk.adjoint());
  CHECK((twirl_average(ens, psi).matrix() - target).norm() <= 1e-9);
}

TEST_CASE("group closures") {
  const GroupClosure z = group_closure({pauli_string(1, 3)});
  CHECK(z.elements.size() == 2);
  CHECK_FALSE(z.capped);

  const ComplexMatrix k = qubit_phase() * qubit_hadamard();
  const GroupClosure kc = group_closure({k});
  CHECK(kc.elements.size() == 3);

  const GroupClosure capped = group_closure({qutrit_fourier(), qutrit_phase()},
                                            100);
  CHECK(capped.capped);
}

TEST_CASE("eigenvector uniqueness") {
  ComplexVector zero(2);
  zero << 1, 0;
  CHECK_FALSE(eigenvector_uniqueness({ComplexMatrix::Identity(2, 2)},
                                     PureState(zero)));
  CHECK(eigenvector_uniqueness({pauli_string(1, 3)}, PureState(zero)));
  CHECK_THROWS_AS(
      eigenvector_uniqueness({pauli_string(1, 3), pauli_string(1, 1)},
                             PureState(zero)),
      NotEigenvector);
}

TEST_CASE("clifford magic dephasing for the qubit T gate") {
  ComplexVector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const UnitaryEnsemble ens =
      clifford_magic_dephasing("t_qubit", PureState(plus));
  REQUIRE(ens.unitaries.size() == 2);

  // the T|+> state is stabilized by the average
  ComplexVector tplus(2);
  tplus << 1 / std::sqrt(2.0), std::polar(1.0 / std::sqrt(2.0),
                                          std::numbers::pi / 4);
  const DensityMatrix target = PureState(tplus).projector();
  CHECK((twirl_average(ens, target).matrix() - target.matrix()).norm() <=
        1e-10);
  CHECK(verify_free(ens, qubit_hull()).free);

  // the collapse it certifies: d_min = d_max on T|+>
  CHECK(std::abs(d_min(target, qubit_hull()).bits -
                 d_max(target, qubit_hull()).bits) <= 1e-5);
  CHECK(d_min(target, qubit_hull()).bits ==
        doctest::Approx(-std::log2((1 + 1 / std::sqrt(2.0)) / 2))
            .epsilon(1e-9));

  CHECK_THROWS_AS(clifford_magic_dephasing("s_gate", PureState(plus)),
                  CatalogMiss);
  ComplexVector magic(2);
  magic << std::sqrt(0.9), std::polar(std::sqrt(0.1), 0.3);
  CHECK_THROWS_AS(clifford_magic_dephasing("t_qubit", PureState(magic)),
                  PreconditionFailed);
}

TEST_CASE("clifford magic dephasing for the toffoli gate") {
  ComplexVector plus3 = ComplexVector::Constant(8, 1.0 / std::sqrt(8.0));
  const UnitaryEnsemble ens =
      clifford_magic_dephasing("toffoli", PureState(plus3));
  REQUIRE(ens.unitaries.size() == 8);
  // the Toffoli magic state is stabilized
  ComplexMatrix tof = ComplexMatrix::Identity(8, 8);
  tof(6, 6) = tof(7, 7) = 0;
  tof(6, 7) = tof(7, 6) = 1;
  const DensityMatrix target = PureState(ComplexVector(tof * plus3)).projector();
  CHECK((twirl_average(ens, target).matrix() - target.matrix()).norm() <=
        1e-9);
}

TEST_CASE("hoggar unitaries") {
  const ComplexMatrix u7 = hoggar_unitary_u7();
  const ComplexMatrix u12 = hoggar_unitary_u12();
  CHECK((u7 * u7.adjoint() - ComplexMatrix::Identity(8, 8)).norm() <= 1e-12);
  CHECK((u12 * u12.adjoint() - ComplexMatrix::Identity(8, 8)).norm() <= 1e-12);
  const ComplexVector hog = named_pure("hoggar").amplitudes();
  CHECK((u7 * hog - hog).norm() <= 1e-12);
  CHECK((u12 * hog - hog).norm() <= 1e-12);
  // orders 7 and 12
  ComplexMatrix p = u7;
  for (int i = 1; i < 7; ++i) p = u7 * p;
  CHECK((p - ComplexMatrix::Identity(8, 8)).norm() <= 1e-10);
  p = u12;
  for (int i = 1; i < 12; ++i) p = u12 * p;
  CHECK((p - ComplexMatrix::Identity(8, 8)).norm() <= 1e-10);
}
