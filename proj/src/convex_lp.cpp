#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "resq/convex.hpp"

namespace resq {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::MaxIter: return "MaxIter";
    case SolveStatus::NumericalBreakdown: return "NumericalBreakdown";
  }
  return "?";
}

void LinearProgram::validate() const {
  const Index n = objective.size();
  if (n == 0) throw MalformedProgram("lp: empty objective");
  if (eq_lhs.rows() != eq_rhs.size() || (eq_lhs.size() > 0 && eq_lhs.cols() != n))
    throw MalformedProgram("lp: inconsistent equality dimensions");
  if (lower.size() != n) throw MalformedProgram("lp: lower bound size");
  if (!eq_rhs.allFinite()) throw MalformedProgram("lp: non-finite rhs");
  if (!objective.allFinite()) throw MalformedProgram("lp: non-finite objective");
}

void debug_dump(const LinearProgram& p, std::ostream& os) {
  os << "lp vars " << p.objective.size() << " eqs " << p.eq_rhs.size() << "\n";
  os << "c " << p.objective.transpose() << "\n";
  os << "lower " << p.lower.transpose() << "\n";
  for (Index i = 0; i < p.eq_lhs.rows(); ++i)
    os << "row " << p.eq_lhs.row(i) << " = " << p.eq_rhs[i] << "\n";
}

namespace {

struct StandardForm {
  RealMatrix a;
  RealVector b;
  RealVector c;
  double shift = 0.0;          // objective constant from bound shifts
  std::vector<int> pos_of;     // original var -> standard index (shifted part)
  std::vector<int> neg_of;     // second half for free splits, else -1
};

// x = lower + u for finite bounds, x = u+ - u- for free variables.
StandardForm to_standard(const LinearProgram& p) {
  const Index n = p.objective.size();
  StandardForm sf;
  sf.pos_of.assign(n, -1);
  sf.neg_of.assign(n, -1);
  Index cols = 0;
  for (Index j = 0; j < n; ++j) {
    sf.pos_of[j] = static_cast<int>(cols++);
    if (!std::isfinite(p.lower[j])) sf.neg_of[j] = static_cast<int>(cols++);
  }
  sf.a.setZero(p.eq_lhs.rows(), cols);
  sf.c.setZero(cols);
  sf.b = p.eq_rhs;
  for (Index j = 0; j < n; ++j) {
    const Index jp = sf.pos_of[j];
    if (p.eq_lhs.size() > 0) sf.a.col(jp) = p.eq_lhs.col(j);
    sf.c[jp] = p.objective[j];
    if (sf.neg_of[j] >= 0) {
      const Index jn = sf.neg_of[j];
      if (p.eq_lhs.size() > 0) sf.a.col(jn) = -p.eq_lhs.col(j);
      sf.c[jn] = -p.objective[j];
    } else {
      sf.b -= p.eq_lhs.col(j) * p.lower[j];
      sf.shift += p.objective[j] * p.lower[j];
    }
  }
  return sf;
}

double max_step(const RealVector& v, const RealVector& dv) {
  double a = kInf;
  for (Index i = 0; i < v.size(); ++i)
    if (dv[i] < 0) a = std::min(a, -v[i] / dv[i]);
  return a;
}

}  // namespace

Solution solve_lp(const LinearProgram& prog, const SolverOptions& opts) {
  prog.validate();
  StandardForm sf = to_standard(prog);

  Solution out;
  const Index nvars = prog.objective.size();

  // Drop dependent equality rows; detect inconsistent equalities outright.
  RealMatrix a = sf.a;
  RealVector b = sf.b;
  if (a.rows() > 0) {
    Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(a);
    RealVector x_ls = cod.solve(b);
    const double resid = (a * x_ls - b).cwiseAbs().maxCoeff();
    if (resid > 1e-9 * (1.0 + b.cwiseAbs().maxCoeff())) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
    Eigen::ColPivHouseholderQR<RealMatrix> qr(a.transpose());
    qr.setThreshold(1e-11);
    const Index rank = qr.rank();
    if (rank < a.rows()) {
      std::vector<Index> keep(qr.colsPermutation().indices().data(),
                              qr.colsPermutation().indices().data() + rank);
      std::sort(keep.begin(), keep.end());
      RealMatrix ar(rank, a.cols());
      RealVector br(rank);
      for (Index i = 0; i < rank; ++i) {
        ar.row(i) = a.row(keep[i]);
        br[i] = b[keep[i]];
      }
      a = std::move(ar);
      b = std::move(br);
    }
  }

  const Index n = sf.c.size();
  const Index m = a.rows();
  const RealVector& c = sf.c;

  RealVector x = RealVector::Ones(n), s = RealVector::Ones(n);
  RealVector y = RealVector::Zero(m);
  double tau = 1.0, kappa = 1.0;

  const double bnorm = 1.0 + (m > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  const double cnorm = 1.0 + c.cwiseAbs().maxCoeff();

  double mu0 = (x.dot(s) + tau * kappa) / (n + 1);

  Solution best;
  double best_score = kInf;
  auto record_scaled = [&](int iter) {
    if (tau <= 1e-10) return;
    const RealVector xh = x / tau;
    const RealVector sh = s / tau;
    const RealVector yh = y / tau;
    const double pres = m > 0 ? (a * xh - b).cwiseAbs().maxCoeff() : 0.0;
    const double dres = (a.transpose() * yh + sh - c).cwiseAbs().maxCoeff();
    const double pobj = c.dot(xh), dobj = b.dot(yh);
    const double gap = std::abs(pobj - dobj);
    const double score = std::max({pres / bnorm, dres / cnorm,
                                   gap / (1.0 + std::abs(pobj))});
    if (score >= best_score) return;
    best_score = score;
    best.value = pobj + sf.shift;
    best.dual_value = dobj + sf.shift;
    best.gap = gap;
    best.primal_residual = pres;
    best.dual_residual = dres;
    best.iterations = iter;
    best.primal.resize(nvars);
    for (Index j = 0; j < nvars; ++j) {
      double v = xh[sf.pos_of[j]];
      if (sf.neg_of[j] >= 0)
        v -= xh[sf.neg_of[j]];
      else
        v += prog.lower[j];
      best.primal[j] = v;
    }
    best.dual = yh;
  };
  auto finish_best = [&](SolveStatus fallback) {
    if (best_score == kInf) {
      out.status = fallback;
      return;
    }
    out = best;
    out.status = SolveStatus::MaxIter;
  };

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    RealVector rp = b * tau - a * x;
    RealVector rd = c * tau - a.transpose() * y - s;
    double rg = kappa - b.dot(y) + c.dot(x);
    double mu = (x.dot(s) + tau * kappa) / (n + 1);

    record_scaled(iter);
    // convergence on the scaled point
    if (tau > 1e-10) {
      const RealVector xh = x / tau;
      const RealVector sh = s / tau;
      const RealVector yh = y / tau;
      const double pres = m > 0 ? (a * xh - b).cwiseAbs().maxCoeff() : 0.0;
      const double dres = (a.transpose() * yh + sh - c).cwiseAbs().maxCoeff();
      const double pobj = c.dot(xh), dobj = b.dot(yh);
      const double gap = std::abs(pobj - dobj);
      if (pres <= opts.feas_tol * bnorm && dres <= opts.feas_tol * cnorm &&
          gap <= opts.gap_tol * (1.0 + std::abs(pobj) + std::abs(dobj)) / 2.0) {
        out.status = SolveStatus::Optimal;
        out.value = pobj + sf.shift;
        out.dual_value = dobj + sf.shift;
        out.gap = gap;
        out.primal_residual = pres;
        out.dual_residual = dres;
        out.iterations = iter;
        out.primal.resize(nvars);
        for (Index j = 0; j < nvars; ++j) {
          double v = xh[sf.pos_of[j]];
          if (sf.neg_of[j] >= 0)
            v -= xh[sf.neg_of[j]];
          else
            v += prog.lower[j];
          out.primal[j] = v;
        }
        out.dual = yh;
        return out;
      }
    }

    // infeasibility / unboundedness certificate
    if (mu < 1e-12 * mu0 || (tau < 1e-12 && kappa > 1e-8)) {
      if (tau <= 1e-8 * std::max(1.0, kappa)) {
        out.iterations = iter;
        if (b.dot(y) > 1e-10)
          out.status = SolveStatus::Infeasible;
        else if (c.dot(x) < -1e-10)
          out.status = SolveStatus::Unbounded;
        else
          out.status = SolveStatus::Infeasible;
        return out;
      }
    }

    RealVector d = x.cwiseQuotient(s);
    RealMatrix mm = m > 0 ? RealMatrix(a * d.asDiagonal() * a.transpose())
                          : RealMatrix(0, 0);
    Eigen::LDLT<RealMatrix> ldlt;
    if (m > 0) {
      ldlt.compute(mm);
      if (ldlt.info() != Eigen::Success) {
        finish_best(SolveStatus::NumericalBreakdown);
        return out;
      }
    }

    RealVector dx(n), ds(n), dy(m);
    double dtau = 0, dkappa = 0;
    auto newton = [&](const RealVector& rxs, double rtk) {
      // dx = D(A^T dy - c dtau + rxs/x - rd), dy = u + dtau v
      RealVector w = rxs.cwiseQuotient(x) - rd;
      RealVector rhs_u = rp - a * d.cwiseProduct(w).matrix();
      RealVector rhs_v = b + a * d.cwiseProduct(c).matrix();
      RealVector u = m > 0 ? RealVector(ldlt.solve(rhs_u)) : RealVector(0);
      RealVector v = m > 0 ? RealVector(ldlt.solve(rhs_v)) : RealVector(0);
      RealVector dx_u = d.cwiseProduct(a.transpose() * u + w);
      RealVector dx_v = d.cwiseProduct(a.transpose() * v - c);
      const double denom = b.dot(v) - c.dot(dx_v) + kappa / tau;
      const double numer = rg - b.dot(u) + c.dot(dx_u) + rtk / tau;
      dtau = std::abs(denom) > 1e-300 ? numer / denom : 0.0;
      dy = u + dtau * v;
      dx = dx_u + dtau * dx_v;
      ds = rxs.cwiseQuotient(x) - s.cwiseProduct(dx).cwiseQuotient(x);
      dkappa = (rtk - kappa * dtau) / tau;
    };

    // predictor
    RealVector rxs = -x.cwiseProduct(s);
    double rtk = -tau * kappa;
    newton(rxs, rtk);
    double ap = std::min({1.0, max_step(x, dx), max_step(s, ds),
                          dtau < 0 ? -tau / dtau : kInf,
                          dkappa < 0 ? -kappa / dkappa : kInf});
    const double mu_aff = ((x + ap * dx).dot(s + ap * ds) +
                           (tau + ap * dtau) * (kappa + ap * dkappa)) /
                          (n + 1);
    double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

    // corrector
    RealVector dxa = dx, dsa = ds;
    const double dtaua = dtau, dkappaa = dkappa;
    rxs = -x.cwiseProduct(s) - dxa.cwiseProduct(dsa) +
          RealVector::Constant(n, sigma * mu);
    rtk = -tau * kappa - dtaua * dkappaa + sigma * mu;
    newton(rxs, rtk);

    double alpha = std::min({1.0, max_step(x, dx), max_step(s, ds),
                             dtau < 0 ? -tau / dtau : kInf,
                             dkappa < 0 ? -kappa / dkappa : kInf});
    alpha = std::min(1.0, 0.98 * alpha);
    if (alpha < 1e-10) {
      finish_best(SolveStatus::NumericalBreakdown);
      return out;
    }
    if (!dx.allFinite() || !ds.allFinite() || !dy.allFinite() ||
        !std::isfinite(dtau) || !std::isfinite(dkappa)) {
      finish_best(SolveStatus::NumericalBreakdown);
      return out;
    }
    x += alpha * dx;
    s += alpha * ds;
    y += alpha * dy;
    tau += alpha * dtau;
    kappa += alpha * dkappa;
  }

  record_scaled(opts.max_iter);
  finish_best(SolveStatus::MaxIter);
  return out;
}

double check_duality_gap(const Solution& sol) {
  if (sol.status != SolveStatus::Optimal)
    throw NotSolved("check_duality_gap: solution is not Optimal");
  return std::abs(sol.value - sol.dual_value);
}

}  // namespace resq
