#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "resq/convex.hpp"

namespace resq {

void SdpProblem::validate() const {
  if (num_vars <= 0) throw MalformedProgram("sdp: no variables");
  if (objective.size() != num_vars)
    throw MalformedProgram("sdp: objective size mismatch");
  for (const auto& blk : blocks) {
    if (blk.constant.rows() != blk.constant.cols())
      throw MalformedProgram("sdp: non-square block constant");
    if (blk.constant.rows() > 64)
      throw MalformedProgram("sdp: block dimension above 64");
    if (!is_hermitian(blk.constant, 1e-10))
      throw MalformedProgram("sdp: block constant not Hermitian");
    if (static_cast<int>(blk.coeffs.size()) > num_vars)
      throw MalformedProgram("sdp: more coefficients than variables");
    for (const auto& f : blk.coeffs) {
      if (f.size() == 0) continue;
      if (f.rows() != blk.constant.rows() || f.cols() != blk.constant.cols())
        throw MalformedProgram("sdp: coefficient dimension mismatch");
      if (!is_hermitian(f, 1e-10))
        throw MalformedProgram("sdp: coefficient not Hermitian");
    }
  }
  if (ineq_lhs.rows() != ineq_rhs.size() ||
      (ineq_lhs.size() > 0 && ineq_lhs.cols() != num_vars))
    throw MalformedProgram("sdp: inequality row dimensions");
  if (eq_lhs.rows() != eq_rhs.size() ||
      (eq_lhs.size() > 0 && eq_lhs.cols() != num_vars))
    throw MalformedProgram("sdp: equality row dimensions");
}

void debug_dump(const SdpProblem& p, std::ostream& os) {
  os << "sdp vars " << p.num_vars << " blocks " << p.blocks.size()
     << " ineqs " << p.ineq_rhs.size() << " eqs " << p.eq_rhs.size() << "\n";
  os << "c " << p.objective.transpose() << "\n";
  for (size_t b = 0; b < p.blocks.size(); ++b) {
    os << "block " << b << " dim " << p.blocks[b].constant.rows() << "\n";
    os << "G re\n" << p.blocks[b].constant.real() << "\nG im\n"
       << p.blocks[b].constant.imag() << "\n";
    for (size_t j = 0; j < p.blocks[b].coeffs.size(); ++j) {
      if (p.blocks[b].coeffs[j].size() == 0) continue;
      os << "F " << j << " re\n" << p.blocks[b].coeffs[j].real() << "\nF " << j
         << " im\n" << p.blocks[b].coeffs[j].imag() << "\n";
    }
  }
  for (Index r = 0; r < p.ineq_lhs.rows(); ++r)
    os << "ineq " << p.ineq_lhs.row(r) << " >= " << p.ineq_rhs[r] << "\n";
  for (Index r = 0; r < p.eq_lhs.rows(); ++r)
    os << "eq " << p.eq_lhs.row(r) << " = " << p.eq_rhs[r] << "\n";
}

namespace {

RealMatrix embed(const ComplexMatrix& h) {
  const Index d = h.rows();
  RealMatrix out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = h.real();
  out.topRightCorner(d, d) = -h.imag();
  out.bottomLeftCorner(d, d) = h.imag();
  out.bottomRightCorner(d, d) = h.real();
  return out;
}

ComplexMatrix unembed_doubled(const RealMatrix& x) {
  const Index d = x.rows() / 2;
  ComplexMatrix h =
      (x.topLeftCorner(d, d) + x.bottomRightCorner(d, d)).cast<Complex>() +
      Complex(0, 1) *
          (x.bottomLeftCorner(d, d) - x.topRightCorner(d, d)).cast<Complex>();
  return 0.5 * (h + h.adjoint());
}

struct DenseBlk {
  Index dim = 0;
  std::vector<int> vars;
  std::vector<RealMatrix> f;  // aligned with vars
  RealMatrix g;
};

// largest alpha with x + alpha d >= 0 on the PSD cone (x > 0)
double psd_max_step(const RealMatrix& x, const RealMatrix& d) {
  Eigen::LLT<RealMatrix> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const RealMatrix l = llt.matrixL();
  RealMatrix w = l.triangularView<Eigen::Lower>().solve(d);
  w = l.triangularView<Eigen::Lower>().solve(RealMatrix(w.transpose()));
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (w + w.transpose()),
                                               Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin >= -1e-14 ? kInf : -1.0 / lmin;
}

double vec_max_step(const RealVector& x, const RealVector& d) {
  double a = kInf;
  for (Index i = 0; i < x.size(); ++i)
    if (d[i] < 0) a = std::min(a, -x[i] / d[i]);
  return a;
}

}  // namespace

Solution solve_sdp(const SdpProblem& prob, const SolverOptions& opts) {
  prob.validate();
  Solution out;
  const int n_orig = prob.num_vars;

  // ---- presolve: eliminate equality rows through the nullspace ----
  RealVector y0 = RealVector::Zero(n_orig);
  RealMatrix nullb = RealMatrix::Identity(n_orig, n_orig);
  if (prob.eq_lhs.rows() > 0) {
    Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(prob.eq_lhs);
    y0 = cod.solve(prob.eq_rhs);
    const double resid = (prob.eq_lhs * y0 - prob.eq_rhs).cwiseAbs().maxCoeff();
    if (resid > 1e-9 * (1.0 + prob.eq_rhs.cwiseAbs().maxCoeff())) {
      out.status = SolveStatus::Infeasible;
      return out;
    }
    Eigen::FullPivLU<RealMatrix> lu(prob.eq_lhs);
    lu.setThreshold(1e-11);
    nullb = lu.kernel();
    if (lu.dimensionOfKernel() == 0) nullb = RealMatrix::Zero(n_orig, 0);
  }
  const Index m = nullb.cols();

  auto finish_y = [&](const RealVector& z) -> RealVector {
    return m > 0 ? RealVector(y0 + nullb * z) : y0;
  };

  // transformed objective
  RealVector c = m > 0 ? RealVector(nullb.transpose() * prob.objective)
                       : RealVector(0);

  // transformed dense blocks (embedded real symmetric)
  std::vector<DenseBlk> blks;
  blks.reserve(prob.blocks.size());
  for (const auto& blk : prob.blocks) {
    DenseBlk d;
    ComplexMatrix g = blk.constant;
    for (size_t j = 0; j < blk.coeffs.size(); ++j)
      if (blk.coeffs[j].size() > 0 && y0[j] != 0.0) g -= y0[j] * blk.coeffs[j];
    d.g = embed(g);
    d.dim = d.g.rows();
    for (Index i = 0; i < m; ++i) {
      ComplexMatrix f = ComplexMatrix::Zero(blk.constant.rows(),
                                            blk.constant.cols());
      bool nz = false;
      for (size_t j = 0; j < blk.coeffs.size(); ++j)
        if (blk.coeffs[j].size() > 0 && nullb(j, i) != 0.0) {
          f += nullb(j, i) * blk.coeffs[j];
          nz = true;
        }
      if (nz && f.cwiseAbs().maxCoeff() > 1e-14) {
        d.vars.push_back(static_cast<int>(i));
        d.f.push_back(embed(f));
      }
    }
    blks.push_back(std::move(d));
  }

  // transformed inequality rows
  RealMatrix ia(prob.ineq_lhs.rows(), m);
  RealVector ig(prob.ineq_rhs.size());
  if (prob.ineq_lhs.rows() > 0) {
    ia = prob.ineq_lhs * nullb;
    ig = prob.ineq_rhs - prob.ineq_lhs * y0;
  }
  const Index nrows = ig.size();

  if (m == 0) {
    // fully determined by the equalities; just check feasibility
    bool ok = true;
    for (const auto& b : blks) {
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(-b.g, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -opts.feas_tol) ok = false;
    }
    if (nrows > 0 && (-ig).minCoeff() < -opts.feas_tol) ok = false;
    out.status = ok ? SolveStatus::Optimal : SolveStatus::Infeasible;
    out.primal = y0;
    out.value = prob.objective.dot(y0);
    out.dual_value = out.value;
    out.gap = 0;
    return out;
  }

  // ---- interior-point state ----
  std::vector<RealMatrix> zs, xs;
  for (const auto& b : blks) {
    double scale = 1.0 + b.g.cwiseAbs().maxCoeff();
    for (const auto& f : b.f) scale = std::max(scale, f.cwiseAbs().maxCoeff());
    zs.push_back(RealMatrix::Identity(b.dim, b.dim) * scale);
    xs.push_back(RealMatrix::Identity(b.dim, b.dim) * scale);
  }
  RealVector zd, xd;
  if (nrows > 0) {
    double scale = 1.0 + ig.cwiseAbs().maxCoeff() + ia.cwiseAbs().maxCoeff();
    zd = RealVector::Constant(nrows, scale);
    xd = RealVector::Constant(nrows, scale);
  }
  RealVector y = RealVector::Zero(m);

  double total_dim = 0;
  for (const auto& b : blks) total_dim += b.dim;
  total_dim += nrows;

  const auto adjoint = [&](const std::vector<RealMatrix>& xblk,
                           const RealVector& xdg) -> RealVector {
    RealVector a = RealVector::Zero(m);
    for (size_t bi = 0; bi < blks.size(); ++bi)
      for (size_t k = 0; k < blks[bi].vars.size(); ++k)
        a[blks[bi].vars[k]] +=
            (blks[bi].f[k].array() * xblk[bi].array()).sum();
    if (nrows > 0) a += ia.transpose() * xdg;
    return a;
  };

  const bool trace = std::getenv("RESQ_SDP_TRACE") != nullptr;
  int stall = 0;
  int no_progress = 0;
  // best-so-far iterate, returned when later steps break down numerically
  double best_score = kInf;
  RealVector best_y = y;
  std::vector<RealMatrix> best_xs = xs, best_zs = zs;
  RealVector best_xd = xd, best_zd = zd;
  int best_iter = 0;
  bool finished = false;
  for (int iter = 0; iter < opts.max_iter && !finished; ++iter) {
    // residuals
    RealVector resid_p = c - adjoint(xs, xd);
    std::vector<RealMatrix> resid_d(blks.size());
    double resid_d_norm = 0;
    for (size_t bi = 0; bi < blks.size(); ++bi) {
      RealMatrix py = -blks[bi].g;
      for (size_t k = 0; k < blks[bi].vars.size(); ++k)
        py += y[blks[bi].vars[k]] * blks[bi].f[k];
      resid_d[bi] = py - zs[bi];
      resid_d_norm =
          std::max(resid_d_norm, resid_d[bi].cwiseAbs().maxCoeff());
    }
    RealVector resid_d_diag;
    if (nrows > 0) {
      resid_d_diag = (ia * y - ig) - zd;
      resid_d_norm =
          std::max(resid_d_norm, resid_d_diag.cwiseAbs().maxCoeff());
    }

    double pobj = c.dot(y);
    double dobj = 0;
    for (size_t bi = 0; bi < blks.size(); ++bi)
      dobj += (blks[bi].g.array() * xs[bi].array()).sum();
    if (nrows > 0) dobj += ig.dot(xd);
    const double gap = pobj - dobj;

    double mu = 0;
    for (size_t bi = 0; bi < blks.size(); ++bi)
      mu += (xs[bi].array() * zs[bi].array()).sum();
    if (nrows > 0) mu += xd.dot(zd);
    mu /= total_dim;

    const double pres = resid_p.size() ? resid_p.cwiseAbs().maxCoeff() : 0.0;
    if (trace)
      fprintf(stderr, "it %3d pobj %.9e dobj %.9e gap %.2e pres %.2e dres %.2e mu %.2e\n",
              iter, pobj, dobj, gap, pres, resid_d_norm, mu);
    const double score = std::max({std::abs(gap) / (1.0 + std::abs(pobj)),
                                   pres, resid_d_norm});
    if (score < 0.99 * best_score) {
      no_progress = 0;
    } else if (++no_progress >= 8) {
      out.status = SolveStatus::MaxIter;
      out.iterations = iter;
      break;
    }
    if (score < best_score) {
      best_score = score;
      best_y = y;
      best_xs = xs;
      best_zs = zs;
      best_xd = xd;
      best_zd = zd;
      best_iter = iter;
    }
    if (std::abs(gap) <= opts.gap_tol && pres <= opts.feas_tol &&
        resid_d_norm <= opts.feas_tol) {
      out.status = SolveStatus::Optimal;
      out.iterations = iter;
      break;
    }

    // Schur complement
    RealMatrix schur = RealMatrix::Zero(m, m);
    std::vector<RealMatrix> zinv(blks.size());
    bool bad = false;
    for (size_t bi = 0; bi < blks.size(); ++bi) {
      Eigen::LLT<RealMatrix> llt(zs[bi]);
      if (llt.info() != Eigen::Success) {
        bad = true;
        break;
      }
      zinv[bi] = llt.solve(RealMatrix::Identity(blks[bi].dim, blks[bi].dim));
      const size_t nb = blks[bi].vars.size();
      if (nb == 0) continue;
      const Index dd = blks[bi].dim * blks[bi].dim;
      RealMatrix px(nb, dd), pz(nb, dd);
      for (size_t k = 0; k < nb; ++k) {
        RealMatrix xf = xs[bi] * blks[bi].f[k];
        RealMatrix fz = blks[bi].f[k] * zinv[bi];
        px.row(k) = Eigen::Map<const RealVector>(xf.data(), dd);
        pz.row(k) = Eigen::Map<const RealVector>(fz.data(), dd);
      }
      RealMatrix mloc = px * pz.transpose();
      for (size_t kj = 0; kj < nb; ++kj)
        for (size_t kk = 0; kk < nb; ++kk)
          schur(blks[bi].vars[kj], blks[bi].vars[kk]) += mloc(kj, kk);
    }
    if (bad) {
      out.status = SolveStatus::MaxIter;
      out.iterations = iter;
      finished = true;
      break;
    }
    if (nrows > 0) {
      RealMatrix scaled =
          (xd.cwiseQuotient(zd)).cwiseSqrt().asDiagonal() * ia;
      schur.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
      schur.triangularView<Eigen::StrictlyUpper>() =
          schur.transpose().triangularView<Eigen::StrictlyUpper>();
    }
    schur = 0.5 * (schur + schur.transpose());

    Eigen::LDLT<RealMatrix> schur_f(schur);
    if (schur_f.info() != Eigen::Success || schur_f.isNegative()) {
      schur_f.compute(schur + 1e-12 * RealMatrix::Identity(m, m));
      if (schur_f.info() != Eigen::Success) {
        out.status = SolveStatus::MaxIter;
        out.iterations = iter;
        finished = true;
        break;
      }
    }

    std::vector<RealMatrix> dxs(blks.size()), dzs(blks.size());
    RealVector dxd, dzd, dy;
    if (nrows > 0) {
      dxd.resize(nrows);
      dzd.resize(nrows);
    }

    auto newton = [&](const std::vector<RealMatrix>& rblk,
                      const RealVector& rdg) {
      RealVector rhs = -resid_p;
      for (size_t bi = 0; bi < blks.size(); ++bi) {
        const RealMatrix t =
            (rblk[bi] - xs[bi] * resid_d[bi]) * zinv[bi];
        for (size_t k = 0; k < blks[bi].vars.size(); ++k)
          rhs[blks[bi].vars[k]] +=
              (blks[bi].f[k].array() * t.array()).sum();
      }
      if (nrows > 0)
        rhs += ia.transpose() *
               ((rdg - xd.cwiseProduct(resid_d_diag)).cwiseQuotient(zd));
      dy = schur_f.solve(rhs);
      for (size_t bi = 0; bi < blks.size(); ++bi) {
        RealMatrix dz = resid_d[bi];
        for (size_t k = 0; k < blks[bi].vars.size(); ++k)
          dz += dy[blks[bi].vars[k]] * blks[bi].f[k];
        RealMatrix dx = (rblk[bi] - xs[bi] * dz) * zinv[bi];
        dzs[bi] = dz;
        dxs[bi] = 0.5 * (dx + dx.transpose());
      }
      if (nrows > 0) {
        dzd = resid_d_diag + ia * dy;
        dxd = (rdg - xd.cwiseProduct(dzd)).cwiseQuotient(zd);
      }
    };

    // predictor
    std::vector<RealMatrix> rblk(blks.size());
    for (size_t bi = 0; bi < blks.size(); ++bi) rblk[bi] = -xs[bi] * zs[bi];
    RealVector rdg;
    if (nrows > 0) rdg = -xd.cwiseProduct(zd);
    newton(rblk, rdg);

    double ap = 1.0, ad = 1.0;
    for (size_t bi = 0; bi < blks.size(); ++bi) {
      ap = std::min(ap, psd_max_step(xs[bi], dxs[bi]));
      ad = std::min(ad, psd_max_step(zs[bi], dzs[bi]));
    }
    if (nrows > 0) {
      ap = std::min(ap, vec_max_step(xd, dxd));
      ad = std::min(ad, vec_max_step(zd, dzd));
    }

    double mu_aff = 0;
    for (size_t bi = 0; bi < blks.size(); ++bi)
      mu_aff += ((xs[bi] + ap * dxs[bi]).array() *
                 (zs[bi] + ad * dzs[bi]).array())
                    .sum();
    if (nrows > 0) mu_aff += (xd + ap * dxd).dot(zd + ad * dzd);
    mu_aff /= total_dim;
    const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

    // corrector
    for (size_t bi = 0; bi < blks.size(); ++bi)
      rblk[bi] = sigma * mu * RealMatrix::Identity(blks[bi].dim, blks[bi].dim) -
                 xs[bi] * zs[bi] - dxs[bi] * dzs[bi];
    if (nrows > 0)
      rdg = RealVector::Constant(nrows, sigma * mu) - xd.cwiseProduct(zd) -
            dxd.cwiseProduct(dzd);
    newton(rblk, rdg);

    ap = 1.0;
    ad = 1.0;
    for (size_t bi = 0; bi < blks.size(); ++bi) {
      ap = std::min(ap, psd_max_step(xs[bi], dxs[bi]));
      ad = std::min(ad, psd_max_step(zs[bi], dzs[bi]));
    }
    if (nrows > 0) {
      ap = std::min(ap, vec_max_step(xd, dxd));
      ad = std::min(ad, vec_max_step(zd, dzd));
    }
    const double gamma = iter < 2 ? 0.9 : 0.98;
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    bool numeric_ok = dy.allFinite();
    for (size_t bi = 0; bi < blks.size() && numeric_ok; ++bi)
      numeric_ok = dxs[bi].allFinite() && dzs[bi].allFinite();
    if (nrows > 0) numeric_ok = numeric_ok && dxd.allFinite() && dzd.allFinite();
    if (!numeric_ok || (std::min(ap, ad) < 1e-8 && ++stall >= 3)) {
      out.status = SolveStatus::MaxIter;
      out.iterations = iter;
      finished = true;
      break;
    }

    for (size_t bi = 0; bi < blks.size(); ++bi) {
      xs[bi] += ap * dxs[bi];
      zs[bi] += ad * dzs[bi];
    }
    if (nrows > 0) {
      xd += ap * dxd;
      zd += ad * dzd;
    }
    y += ad * dy;
    if (iter + 1 == opts.max_iter) {
      out.status = SolveStatus::MaxIter;
      out.iterations = opts.max_iter;
    }
  }
  if (out.status == SolveStatus::MaxIter) {
    if (best_score < kInf) {
      y = best_y;
      xs = best_xs;
      zs = best_zs;
      xd = best_xd;
      zd = best_zd;
      out.iterations = best_iter;
    } else {
      out.status = SolveStatus::NumericalBreakdown;
      return out;
    }
  }

  if (out.status != SolveStatus::Optimal &&
      out.status != SolveStatus::MaxIter)
    return out;

  // report in original coordinates
  out.primal = finish_y(y);
  out.value = prob.objective.dot(out.primal);
  double pobj = c.dot(y);
  double dobj = 0;
  for (size_t bi = 0; bi < blks.size(); ++bi)
    dobj += (blks[bi].g.array() * xs[bi].array()).sum();
  if (nrows > 0) dobj += ig.dot(xd);
  out.gap = pobj - dobj;
  out.dual_value = out.value - out.gap;
  RealVector rp_final = c - adjoint(xs, xd);
  out.primal_residual = rp_final.size() ? rp_final.cwiseAbs().maxCoeff() : 0.0;
  double rd_final = 0;
  for (size_t bi = 0; bi < blks.size(); ++bi) {
    RealMatrix py = -blks[bi].g;
    for (size_t k = 0; k < blks[bi].vars.size(); ++k)
      py += y[blks[bi].vars[k]] * blks[bi].f[k];
    rd_final = std::max(rd_final, (py - zs[bi]).cwiseAbs().maxCoeff());
  }
  out.dual_residual = rd_final;

  out.dual_blocks.clear();
  for (size_t bi = 0; bi < blks.size(); ++bi)
    out.dual_blocks.push_back(unembed_doubled(xs[bi]));
  if (nrows > 0) out.dual = xd;

  return out;
}

}  // namespace resq
