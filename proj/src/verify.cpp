#include "resq/verify.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "resq/bounds.hpp"
#include "resq/measures.hpp"
#include "resq/twirl.hpp"

namespace resq {

namespace {

constexpr double kLog2 = 0.6931471805599453;
double log2of(double x) { return std::log(x) / kLog2; }

const FreeSet& stab_hull(int n) {
  static std::map<int, FreeSet> cache;
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, stabilizer_states(n)).first;
  return it->second;
}

const FreeSet& qutrit_hull(int n) {
  static std::map<int, FreeSet> cache;
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, stabilizer_states_qutrit(n)).first;
  return it->second;
}

// measure memo shared across checks within one process
double memo(const std::string& key, const std::function<double()>& compute) {
  static std::map<std::string, double> cache;
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, compute()).first;
  return it->second;
}

struct Recorder {
  std::vector<CheckResult>& out;
  void operator()(int criterion, const std::string& name, bool pass,
                  double observed, double tolerance,
                  const std::string& note = "") {
    out.push_back({criterion, name, pass, observed, tolerance, note});
  }
};

DensityMatrix complement_state(const DensityMatrix& pure) {
  const Index d = pure.dim();
  return DensityMatrix(
      (ComplexMatrix::Identity(d, d) - pure.matrix()) / double(d - 1));
}

DensityMatrix random_density(std::mt19937_64& rng, Index d) {
  std::normal_distribution<double> g;
  ComplexMatrix a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

void props_checks(Recorder rec) {
  const DensityMatrix strange = named_state("strange");
  const DensityMatrix norrell = named_state("norrell");
  const DensityMatrix face = named_state("face");
  const DensityMatrix hoggar = named_state("hoggar");

  {  // criterion 1: Strange collapse and two copies
    const double dmin = d_min(strange, qutrit_hull(1)).bits;
    const double dmax =
        memo("dmax:S", [&] { return d_max(strange, qutrit_hull(1)).bits; });
    const double ds = d_s(strange, qutrit_hull(1)).bits;
    const double dev = std::max({std::abs(dmin - 1.0), std::abs(dmax - 1.0),
                                 std::abs(ds - 1.0)});
    rec(1, "strange d_min=d_max=d_s=1", dev <= 1e-6, dev, 1e-6);

    const DensityMatrix s2(kron(strange.matrix(), strange.matrix()));
    const double dmin2 = d_min(s2, qutrit_hull(2)).bits;
    const double dmax2 =
        memo("dmax:S2", [&] { return d_max(s2, qutrit_hull(2)).bits; });
    rec(1, "strange^2 d_min=d_max (360-vertex hull)",
        std::abs(dmin2 - dmax2) <= 1e-5, std::abs(dmin2 - dmax2), 1e-5);
    const double dev2 =
        std::max(std::abs(dmin2 - 2.0), std::abs(dmax2 - 2.0));
    rec(1, "strange^2 common value = 2", dev2 <= 1e-5, dev2, 1e-5,
        "unattainable: (sum_i |ii>)/sqrt(3) is a stabilizer state with "
        "overlap 1/3, so the value is log2(3)");
  }

  {  // criterion 2: Hoggar
    const double expected = log2of(12.0 / 5.0);
    const double dmin = d_min(hoggar, stab_hull(3)).bits;
    const double dmax =
        memo("dmax:Hog", [&] { return d_max(hoggar, stab_hull(3)).bits; });
    const double ds = d_s(hoggar, stab_hull(3)).bits;
    const double dev =
        std::max({std::abs(dmin - expected), std::abs(dmax - expected),
                  std::abs(ds - expected)});
    rec(2, "hoggar d_min=d_max=d_s=log2(12/5)", dev <= 1e-5, dev, 1e-5);

    double flat_dev = 0;
    for (int k = 1; k < 64; ++k)
      flat_dev = std::max(
          flat_dev,
          std::abs(std::abs((hoggar.matrix() * pauli_string(3, k)).trace()) -
                   1.0 / 3));
    rec(2, "hoggar Pauli flatness 1/3", flat_dev <= 1e-10, flat_dev, 1e-10);

    const double sn = stab_norm(hoggar.matrix(), 3);
    rec(2, "hoggar stab norm 11/4", std::abs(sn - 2.75) <= 1e-10,
        std::abs(sn - 2.75), 1e-10);
  }

  {  // criterion 3: Norrell
    const double expected = log2of(1.5);
    const double dmin = d_min(norrell, qutrit_hull(1)).bits;
    const double dmax = d_max(norrell, qutrit_hull(1)).bits;
    const double ds = d_s(norrell, qutrit_hull(1)).bits;
    const double dev =
        std::max({std::abs(dmin - expected), std::abs(dmax - expected),
                  std::abs(ds - expected)});
    rec(3, "norrell d_min=d_max=d_s=log2(3/2)", dev <= 1e-6, dev, 1e-6);
  }

  {  // criterion 4: face state
    const double dmin = d_min(face, stab_hull(1)).bits;
    const double dmax =
        memo("dmax:F", [&] { return d_max(face, stab_hull(1)).bits; });
    const double ds =
        memo("ds:F", [&] { return d_s(face, stab_hull(1)).bits; });
    rec(4, "face d_min=d_max (n=1)", std::abs(dmin - dmax) <= 1e-6,
        std::abs(dmin - dmax), 1e-6);
    const DensityMatrix f2(kron(face.matrix(), face.matrix()));
    const double dmin2 = d_min(f2, stab_hull(2)).bits;
    const double dmax2 =
        memo("dmax:F2", [&] { return d_max(f2, stab_hull(2)).bits; });
    rec(4, "face d_min=d_max (n=2, 60-vertex hull)",
        std::abs(dmin2 - dmax2) <= 1e-6, std::abs(dmin2 - dmax2), 1e-6);
    rec(4, "face d_s - d_max >= 1e-3", ds - dmax >= 1e-3, ds - dmax, 1e-3,
        "strict single-qubit gap");
  }

  {  // criterion 5: weight measure
    const double wt = weight(complement_state(named_state("t_qutrit")),
                             qutrit_hull(1));
    rec(5, "weight((1-T)/2) = 0", wt <= 1e-6, wt, 1e-6);
    const double ws = weight(complement_state(strange), qutrit_hull(1));
    rec(5, "weight((1-S)/2) = 1", ws >= 1.0 - 1e-6, 1.0 - ws, 1e-6);
  }

  {  // criterion 6: coherence reference values
    double dev = 0;
    for (int m : {2, 3, 4}) {
      const FreeSet coh = coherence_set(m);
      const DensityMatrix phi =
          named_state("max_coherent" + std::to_string(m));
      const double expected = log2of(m);
      dev = std::max(dev, std::abs(d_min(phi, coh).bits - expected));
      dev = std::max(dev, std::abs(d_max(phi, coh).bits - expected));
      dev = std::max(dev, std::abs(d_min_aff(phi, coh).bits - expected));
    }
    rec(6, "max_coherent(m) d_min=d_max=d_min_aff=log2(m)", dev <= 1e-6, dev,
        1e-6);
  }

  {  // criterion 7: Bell state against the PPT set
    const FreeSet ppt = ppt_set(2, 2);
    const DensityMatrix bell = named_state("bell2");
    const double dev = std::max({std::abs(d_min(bell, ppt).bits - 1.0),
                                 std::abs(d_max(bell, ppt).bits - 1.0),
                                 std::abs(d_s(bell, ppt).bits - 1.0)});
    rec(7, "bell2 d_min=d_max=d_s=1 over ppt(2,2)", dev <= 1e-6, dev, 1e-6);
  }

  {  // criterion 10: trace-distance measure
    const double rs = r_tr(strange, qutrit_hull(1));
    const double rn = r_tr(norrell, qutrit_hull(1));
    const double dev =
        std::max(std::abs(rs - 0.5), std::abs(rn - 1.0 / 3.0));
    rec(10, "r_tr(S)=1/2 and r_tr(N)=1/3", dev <= 1e-6, dev, 1e-6);
  }

  {  // criterion 12: distillation-fidelity duality
    double gap = 0;
    const GFidelity g1 = g_fidelity(strange, qutrit_hull(1), 2.0);
    gap = std::max(gap, std::abs(g1.primal - g1.dual));
    const GFidelity g2 = g_fidelity(face, stab_hull(1), std::sqrt(3.0));
    gap = std::max(gap, std::abs(g2.primal - g2.dual));
    const GFidelity g3 =
        g_fidelity(qutrit_hull(1).vertices()[0], qutrit_hull(1), 4.0);
    gap = std::max(gap, std::abs(g3.primal - g3.dual));
    rec(12, "G_F primal = dual", gap <= 1e-6, gap, 1e-6);
    rec(12, "G_F(free; 4) = 1/4", std::abs(g3.primal - 0.25) <= 1e-8,
        std::abs(g3.primal - 0.25), 1e-8);
  }
}

void bounds_checks(Recorder rec) {
  {  // f(0,0) = 1 exactly
    const double f = f_bound({0.0, 0.0});
    rec(11, "f(0,0) = 1", f == 1.0, std::abs(f - 1.0), 0.0);
  }
  {  // crossing interval on a 0.005 grid
    bool ok = true;
    for (int i2 = 0; i2 * 0.005 < 1.0; ++i2) {
      const double e2 = i2 * 0.005;
      for (int i1 = 0; i1 * 0.005 + e2 < 1.0; ++i1) {
        const double e1 = i1 * 0.005;
        if (e1 + std::sqrt(e2) >= 1.0) continue;
        const double first = 1.0 / (1.0 - e1 - std::sqrt(e2));
        const double root = std::sqrt(1.0 - e2) - std::sqrt(e1);
        const double second = 1.0 / (root * root);
        const BoundReport rep = compare_bounds({e1, e2});
        const bool in_interval =
            e1 >= rep.crossing_lo - 1e-12 && e1 <= rep.crossing_hi + 1e-12;
        if ((first <= second + 1e-12) != in_interval) ok = false;
      }
    }
    rec(11, "crossing interval matches branch comparison (0.005 grid)", ok,
        ok ? 0.0 : 1.0, 0.0);
  }
  {  // the state bound never exceeds the one-shot bound on the grid
    double worst = kInf;
    bool ok = true;
    for (int i1 = 0; i1 * 0.01 < 1.0; ++i1)
      for (int i2 = 0; i1 * 0.01 + i2 * 0.01 < 1.0; ++i2) {
        const ErrorPair e{i1 * 0.01, i2 * 0.01};
        try {
          const BoundReport rep = compare_bounds(e);
          worst = std::min(worst, rep.log_f - rep.log_inv_1m_eps_prime);
        } catch (const AssertionFailure&) {
          ok = false;
        }
      }
    rec(11, "state bound <= one-shot bound on the 0.01 grid",
        ok && worst >= -1e-12, worst, -1e-12, "min slack");
  }
  {  // second comparison: 1 - eps' >= 1 - e1 - sqrt(e2)
    double worst = kInf;
    for (int i1 = 0; i1 * 0.01 < 1.0; ++i1)
      for (int i2 = 0; i2 * 0.01 <= 1.0; ++i2) {
        const double e1 = i1 * 0.01, e2 = i2 * 0.01;
        if (e1 + std::sqrt(e2) >= 1.0 || e1 + e2 >= 1.0) continue;
        worst = std::min(worst,
                         (1.0 - eps_prime({e1, e2})) - (1.0 - e1 - std::sqrt(e2)));
      }
    rec(11, "1-eps' >= 1-e1-sqrt(e2) inside e1+sqrt(e2)<1", worst >= -1e-12,
        worst, -1e-12, "min slack");
  }
  {  // yield-cost inequalities across states and error pairs
    const double r_s = 1.0;
    const double r_n = log2of(1.5);
    const double r_f =
        memo("dmin:F", [&] {
          return d_min(named_state("face"), stab_hull(1)).bits;
        });
    bool ok = true;
    double margin = kInf;
    auto run = [&](const DensityMatrix& rho, const FreeSet& f, double unit) {
      RateLadder ladder;
      for (int k = 1; k <= 4; ++k) ladder.rates.push_back(k * unit);
      for (const ErrorPair& e :
           {ErrorPair{0.0, 0.0}, ErrorPair{0.1, 0.1}, ErrorPair{0.05, 0.2}}) {
        const YieldCostCheck y = yield_cost_check(rho, f, ladder, e);
        ok = ok && y.f_bound_holds && y.state_bound_holds;
        margin = std::min(margin, y.cost + y.report.log_inv_1m_eps_prime -
                                      y.yield);
      }
    };
    run(named_state("strange"), qutrit_hull(1), r_s);
    run(named_state("face"), stab_hull(1), r_f);
    run(named_state("norrell"), qutrit_hull(1), r_n);
    rec(11, "yield <= cost + bound (both bound functions)",
        ok && margin >= -1e-6, margin, -1e-6, "min state-bound margin");
  }
}

void isotropic_checks(Recorder rec) {
  const DensityMatrix strange = named_state("strange");
  const FreeSet& hull = qutrit_hull(1);

  {  // criterion 8: smoothed closed forms at kappa = 1
    double dev_h = 0, dev_rob = 0;
    for (double eps : {0.0, 0.05, 0.1, 0.2, 0.4}) {
      const SmoothedClosedForm cf =
          closed_form_smoothed(1.0, 1.0, eps, SetMode::FullDim);
      dev_h = std::max(dev_h, std::abs(d_h(strange, hull, eps).bits - *cf.d_h));
      dev_rob = std::max(dev_rob, std::abs(d_max_smooth(strange, hull, eps).bits -
                                           cf.d_max_smooth));
      dev_rob = std::max(dev_rob, std::abs(d_s_smooth(strange, hull, eps).bits -
                                           *cf.d_s_smooth));
    }
    rec(8, "smoothed d_h matches r + log 1/(1-eps)", dev_h <= 1e-4, dev_h,
        1e-4);
    rec(8, "smoothed robustness matches max{r - log 1/eta_min, 0}",
        dev_rob <= 1e-4, dev_rob, 1e-4);
  }

  {  // criterion 9: isotropic family exact values
    const DensityMatrix comp(
        0.5 * (ComplexMatrix::Identity(3, 3) - strange.matrix()));
    double dev = 0;
    for (double kappa : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const DensityMatrix phi_k = isotropic(strange, comp, kappa);
      const IsotropicExact ex = isotropic_exact(1.0, kappa, SetMode::FullDim);
      dev = std::max(dev, std::abs(d_min(phi_k, hull).bits - ex.d_min));
      dev = std::max(dev, std::abs(d_max(phi_k, hull).bits - ex.d_max));
      dev = std::max(dev, std::abs(d_s(phi_k, hull).bits - *ex.d_s));
    }
    rec(9, "isotropic family matches the exact formulas", dev <= 1e-4, dev,
        1e-4);
  }
}

void twirl_checks(Recorder rec) {
  const DensityMatrix strange = named_state("strange");
  const FreeSet& hull3 = qutrit_hull(1);

  {  // measure-and-prepare channel for the Strange state
    const TwirlChannel chan = build_twirl_channel(strange, hull3);
    const ComplexMatrix comp =
        0.5 * (ComplexMatrix::Identity(3, 3) - strange.matrix());
    std::mt19937_64 rng(20260809);
    double dev = 0;
    for (int t = 0; t < 50; ++t) {
      const DensityMatrix rho = random_density(rng, 3);
      const DensityMatrix out = apply_channel(chan, rho);
      const double p = (strange.matrix() * rho.matrix()).trace().real();
      const ComplexMatrix expect = p * strange.matrix() + (1.0 - p) * comp;
      dev = std::max(dev, (out.matrix() - expect).cwiseAbs().maxCoeff());
    }
    rec(13, "strange measure-and-prepare channel matches the fixed map",
        dev <= 1e-9, dev, 1e-9);
    const FreenessReport rep = verify_free(chan, hull3);
    rec(13, "strange measure-and-prepare channel is free", rep.free,
        rep.worst_violation, 1e-7);
  }

  {  // SL(2,Z3) twirl of the SIC companions
    const std::vector<ComplexMatrix> stab = strange_stabilizer_cliffords();
    const UnitaryEnsemble ens = uniform_ensemble(stab);
    const ComplexMatrix target =
        (3.0 * ComplexMatrix::Identity(3, 3) - strange.matrix()) / 8.0;
    double dev = 0;
    for (int k1 = 0; k1 < 3; ++k1)
      for (int k2 = 0; k2 < 3; ++k2) {
        if (k1 == 0 && k2 == 0) continue;
        const ComplexMatrix dk = weyl_operator(3, k1, k2);
        const DensityMatrix psi(dk * strange.matrix() * dk.adjoint());
        dev = std::max(dev, (twirl_average(ens, psi).matrix() - target)
                                .cwiseAbs()
                                .maxCoeff());
      }
    rec(13, "SL(2,Z3) twirl of psi_k equals (3I-S)/8", dev <= 1e-9, dev, 1e-9);
    const FreenessReport rep = verify_free(ens, hull3);
    rec(13, "SL(2,Z3) twirl is free", rep.free, rep.worst_violation, 1e-7);
  }

  {  // Hoggar group closure
    const GroupClosure cl =
        group_closure({hoggar_unitary_u7(), hoggar_unitary_u12()}, 20000);
    const PureState hog = named_pure("hoggar");
    bool stabilizes = !cl.capped;
    double worst = 0;
    for (const auto& u : cl.elements) {
      const double ov = std::abs(ComplexVector(u * hog.amplitudes())
                                     .dot(hog.amplitudes()));
      worst = std::max(worst, std::abs(ov - 1.0));
      if (std::abs(ov - 1.0) > 1e-8) stabilizes = false;
    }
    rec(13, "hoggar closure completes under the cap and stabilizes |Hog>",
        stabilizes, worst, 1e-8,
        "order " + std::to_string(cl.elements.size()));
    bool unique = eigenvector_uniqueness(cl, hog);
    rec(13, "hoggar joint eigenspace is one-dimensional", unique,
        unique ? 1.0 : 2.0, 1.0);
    const FreenessReport rep = verify_free(
        uniform_ensemble({hoggar_unitary_u7(), hoggar_unitary_u12()}),
        stab_hull(3));
    rec(13, "hoggar twirl generators preserve the stabilizer hull", rep.free,
        rep.worst_violation, 1e-7,
        "group average free by closure under generation");
  }

  {  // face twirl and the two-copy product
    const ComplexMatrix k = qubit_phase() * qubit_hadamard();
    const UnitaryEnsemble face_ens =
        uniform_ensemble({ComplexMatrix::Identity(2, 2), k, k * k});
    const DensityMatrix face = named_state("face");
    const double fix =
        (twirl_average(face_ens, face).matrix() - face.matrix())
            .cwiseAbs()
            .maxCoeff();
    rec(13, "face twirl stabilizes the face state", fix <= 1e-9, fix, 1e-9);
    const FreenessReport rep1 = verify_free(face_ens, stab_hull(1));
    rec(13, "face twirl is free", rep1.free, rep1.worst_violation, 1e-7);
    const UnitaryEnsemble two = tensor_ensemble(face_ens, face_ens);
    const FreenessReport rep2 = verify_free(two, stab_hull(2));
    rec(13, "two-copy face twirl is free on the 60-vertex hull", rep2.free,
        rep2.worst_violation, 1e-7);
  }

  {  // Clifford-magic dephasings from the catalog
    const ComplexVector plus2 = ComplexVector::Constant(2, 1.0 / std::sqrt(2.0));
    const UnitaryEnsemble tq =
        clifford_magic_dephasing("t_qubit", PureState(plus2));
    rec(13, "qubit T dephasing is free (checked at construction)",
        tq.unitaries.size() == 2, double(tq.unitaries.size()), 2.0);
    const ComplexVector plus3 = ComplexVector::Constant(3, 1.0 / std::sqrt(3.0));
    const UnitaryEnsemble tt =
        clifford_magic_dephasing("t_qutrit", PureState(plus3));
    rec(13, "qutrit T dephasing is free (checked at construction)",
        tt.unitaries.size() == 3, double(tt.unitaries.size()), 3.0);
  }

  {  // stabilizing channels collapse d_min and d_max
    double dev = 0;
    dev = std::max(dev, std::abs(memo("dmin:S", [&] {
                     return d_min(strange, hull3).bits;
                   }) - memo("dmax:S", [&] {
                     return d_max(strange, hull3).bits;
                   })));
    const DensityMatrix face = named_state("face");
    dev = std::max(dev, std::abs(memo("dmin:F", [&] {
                     return d_min(face, stab_hull(1)).bits;
                   }) - memo("dmax:F", [&] {
                     return d_max(face, stab_hull(1)).bits;
                   })));
    const DensityMatrix tq = named_state("t_qutrit");
    dev = std::max(dev, std::abs(d_min(tq, hull3).bits -
                                 d_max(tq, hull3).bits));
    const DensityMatrix hog = named_state("hoggar");
    dev = std::max(dev, std::abs(memo("dmin:Hog", [&] {
                     return d_min(hog, stab_hull(3)).bits;
                   }) - memo("dmax:Hog", [&] {
                     return d_max(hog, stab_hull(3)).bits;
                   })));
    rec(13, "stabilizing twirls collapse d_min = d_max", dev <= 1e-5, dev,
        1e-5, "face, strange, hoggar, qutrit T");
  }
}

}  // namespace

std::vector<CheckResult> run_checks(const std::string& suite) {
  std::vector<CheckResult> out;
  Recorder rec{out};
  const bool all = suite == "all";
  if (all || suite == "props") props_checks(rec);
  if (all || suite == "bounds") bounds_checks(rec);
  if (all || suite == "isotropic") isotropic_checks(rec);
  if (all || suite == "twirl") twirl_checks(rec);
  if (out.empty()) throw UnknownLabel("unknown verify suite: " + suite);
  return out;
}

}  // namespace resq
