#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "resq/bounds.hpp"
#include "resq/io.hpp"
#include "resq/measures.hpp"
#include "resq/twirl.hpp"
#include "resq/verify.hpp"

namespace {

using namespace resq;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitParse = 2;
constexpr int kExitSolver = 3;
constexpr int kExitCombination = 4;

struct Timer {
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  }
};

DensityMatrix load_input_state(const std::string& arg) {
  if (arg.find('.') != std::string::npos || arg.find('/') != std::string::npos)
    return load_state(arg).state();
  return named_state(arg);
}

FreeSet select_set(const std::string& name, Index dim) {
  if (name == "stab") {
    switch (dim) {
      case 2: return stabilizer_states(1);
      case 4: return stabilizer_states(2);
      case 8: return stabilizer_states(3);
      case 3: return stabilizer_states_qutrit(1);
      case 9: return stabilizer_states_qutrit(2);
      default:
        throw UnknownLabel("stab: state dimension is not 2^n or 3^n in range");
    }
  }
  if (name == "stab3") {
    switch (dim) {
      case 3: return stabilizer_states_qutrit(1);
      case 9: return stabilizer_states_qutrit(2);
      default: throw UnknownLabel("stab3: state dimension is not 3^n");
    }
  }
  if (name == "coh") return coherence_set(dim);
  if (name == "ppt") {
    const Index m = static_cast<Index>(std::llround(std::sqrt(double(dim))));
    if (m * m != dim)
      throw UnknownLabel("ppt: state dimension is not a square");
    return ppt_set(m, m);
  }
  throw UnknownLabel("unknown set: " + name);
}

int cmd_measure(const std::string& state_arg, const std::string& set_name,
                const std::string& measure, double eps, double k) {
  Timer timer;
  DensityMatrix rho = load_input_state(state_arg);

  json report;
  report["command"] = "measure";
  report["inputs"] = {{"state", state_arg},
                      {"set", set_name},
                      {"measure", measure},
                      {"eps", eps},
                      {"k", k}};

  double value = 0.0;
  bool infinite = false;
  double dual_gap = 0.0;
  if (measure == "stabnorm") {
    const int n = static_cast<int>(std::llround(std::log2(double(rho.dim()))));
    if ((Index(1) << n) != rho.dim())
      throw UnknownLabel("stabnorm requires qubit dimensions");
    value = stab_norm(rho.matrix(), n);
  } else {
    FreeSet f = select_set(set_name, rho.dim());
    if (measure == "dmin") {
      const MeasureValue v = d_min(rho, f);
      value = v.bits;
      infinite = v.infinite;
      dual_gap = v.dual_gap;
    } else if (measure == "dmax") {
      const MeasureValue v =
          eps > 0.0 ? d_max_smooth(rho, f, eps) : d_max(rho, f);
      value = v.bits;
      infinite = v.infinite;
      dual_gap = v.dual_gap;
    } else if (measure == "ds") {
      const MeasureValue v = eps > 0.0 ? d_s_smooth(rho, f, eps) : d_s(rho, f);
      value = v.bits;
      infinite = v.infinite;
      dual_gap = v.dual_gap;
    } else if (measure == "dh") {
      const MeasureValue v = d_h(rho, f, eps);
      value = v.bits;
      dual_gap = v.dual_gap;
    } else if (measure == "dmin_aff" || measure == "dmins_aff") {
      const MeasureValue v = d_min_aff(rho, f);
      value = v.bits;
      infinite = v.infinite;
      dual_gap = v.dual_gap;
    } else if (measure == "weight") {
      value = weight(rho, f);
    } else if (measure == "rtr") {
      value = r_tr(rho, f);
    } else if (measure == "gfid") {
      const GFidelity g = g_fidelity(rho, f, k);
      value = g.primal;
      dual_gap = std::abs(g.primal - g.dual);
    } else {
      throw UnknownLabel("unknown measure: " + measure);
    }
  }

  report["result"] = {{"value", value},
                      {"infinite", infinite},
                      {"dual_gap", dual_gap}};
  report["solver"] = {{"feas_tol", measure_solver_options().feas_tol},
                      {"gap_tol", measure_solver_options().gap_tol},
                      {"max_iter", measure_solver_options().max_iter}};

  char line[64];
  if (infinite)
    snprintf(line, sizeof line, "inf");
  else
    snprintf(line, sizeof line, "%.9f", value);
  std::cout << line << "\n" << report.dump(2) << "\n";
  std::cerr << "wall_time_s " << timer.seconds() << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& suite) {
  Timer timer;
  const std::vector<CheckResult> checks = run_checks(suite);
  bool all_pass = true;
  for (const auto& c : checks) {
    all_pass = all_pass && c.pass;
    char buf[160];
    snprintf(buf, sizeof buf, "[%s] c%02d %-58s observed %.3e tol %.3e",
             c.pass ? "PASS" : "FAIL", c.criterion, c.name.c_str(), c.observed,
             c.tolerance);
    std::cout << buf;
    if (!c.note.empty()) std::cout << "  (" << c.note << ")";
    std::cout << "\n";
  }
  std::cout << (all_pass ? "all checks passed" : "CHECKS FAILED") << "\n";
  std::cerr << "wall_time_s " << timer.seconds() << "\n";
  return all_pass ? kExitOk : kExitVerifyFailed;
}

int cmd_sweep(const std::string& kind, double step, const std::string& out,
              double eps) {
  Timer timer;
  if (step <= 0.0 || step > 0.5) throw OutOfRange("step must be in (0, 0.5]");
  std::ofstream os(out);
  if (!os) {
    std::cerr << "cannot write " << out << "\n";
    return kExitParse;
  }
  char buf[256];
  if (kind == "bounds") {
    os << "eps1,eps2,log_f,log_thm5,region\n";
    for (int i = 1; i * step < 1.0; ++i)
      for (int j = 1; (i + j) * step < 1.0; ++j) {
        const ErrorPair e{i * step, j * step};
        const BoundReport rep = compare_bounds(e);
        snprintf(buf, sizeof buf, "%.6f,%.6f,%.12f,%.12f,%s\n", e.eps1, e.eps2,
                 rep.log_f, rep.log_inv_1m_eps_prime,
                 rep.region == FBranch::SqrtRegion ? "sqrt" : "fallback");
        os << buf;
      }
  } else if (kind == "isotropic") {
    os << "kappa,dmin,dmax,ds,dh_eps,closed_form_delta\n";
    const DensityMatrix strange = named_state("strange");
    const DensityMatrix comp(
        0.5 * (ComplexMatrix::Identity(3, 3) - strange.matrix()));
    const FreeSet hull = stabilizer_states_qutrit(1);
    for (int i = 0;; ++i) {
      const double kappa = std::min(1.0, i * step);
      const DensityMatrix phi_k = isotropic(strange, comp, kappa);
      const double dmin = d_min(phi_k, hull).bits;
      const double dmax = d_max(phi_k, hull).bits;
      const double ds = d_s(phi_k, hull).bits;
      const double dh = d_h(phi_k, hull, eps).bits;
      const IsotropicExact ex = isotropic_exact(1.0, kappa, SetMode::FullDim);
      const double delta =
          std::max({std::abs(dmin - ex.d_min), std::abs(dmax - ex.d_max),
                    std::abs(ds - *ex.d_s)});
      snprintf(buf, sizeof buf, "%.6f,%.9f,%.9f,%.9f,%.9f,%.3e\n", kappa, dmin,
               dmax, ds, dh, delta);
      os << buf;
      if (kappa >= 1.0) break;
    }
  } else {
    throw UnknownLabel("unknown sweep kind: " + kind);
  }
  std::cerr << "wall_time_s " << timer.seconds() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-shot resource measures over explicit free sets"};
  app.require_subcommand(1);

  std::string state_arg, set_name = "stab", measure_name = "dmin";
  double eps = 0.0, kval = 1.0;
  CLI::App* measure = app.add_subcommand("measure", "compute a measure");
  measure->add_option("--state", state_arg, "state label or JSON path")
      ->required();
  measure->add_option("--set", set_name, "stab|stab3|coh|ppt");
  measure->add_option("--measure", measure_name,
                      "dmin|dmax|ds|dh|dmin_aff|weight|stabnorm|rtr|gfid");
  measure->add_option("--eps", eps, "smoothing / hypothesis error");
  measure->add_option("--k", kval, "target normalization for gfid");

  std::string suite = "all";
  CLI::App* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("--suite", suite, "props|bounds|isotropic|twirl|all");

  std::string kind = "bounds", out_path = "sweep.csv";
  double step = 0.01;
  CLI::App* sweep = app.add_subcommand("sweep", "emit CSV grids");
  sweep->add_option("--kind", kind, "bounds|isotropic");
  sweep->add_option("--step", step, "grid step in (0, 0.5]");
  sweep->add_option("--out", out_path, "output CSV path")->required();
  sweep->add_option("--eps", eps, "epsilon for the dh column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  if (const char* tol = std::getenv("RESQ_TOL")) {
    const double t = std::atof(tol);
    if (t > 0) {
      resq::measure_solver_options().feas_tol = t;
      resq::measure_solver_options().gap_tol = t;
    }
  }

  try {
    if (measure->parsed())
      return cmd_measure(state_arg, set_name, measure_name, eps, kval);
    if (verify->parsed()) return cmd_verify(suite);
    if (sweep->parsed()) return cmd_sweep(kind, step, out_path, eps);
  } catch (const resq::UnknownLabel& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCombination;
  } catch (const resq::OutOfRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const resq::SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const resq::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitParse;
}
