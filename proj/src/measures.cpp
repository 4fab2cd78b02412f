#include "resq/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace resq {

SolverOptions& measure_solver_options() {
  static SolverOptions opts{1e-9, 1e-9, 200};
  return opts;
}

namespace {

constexpr double kLog2 = 0.6931471805599453;

double log2_clamped(double x) { return std::log(x) / kLog2; }

// linear functional coefficients of Tr[M sigma(y)] in herm_vec coordinates
RealVector herm_functional(const ComplexMatrix& m) {
  RealVector v = herm_vec(m);
  const Index d = m.rows();
  v.tail(d * d - d) *= 2.0;
  return v;
}

// coordinate basis matrix of herm_vec coordinate j
ComplexMatrix herm_basis_element(Index d, Index j) {
  RealVector e = RealVector::Zero(d * d);
  e[j] = 1.0;
  return herm_unvec(e, d);
}

struct RowAccum {
  std::vector<std::pair<int, double>> entries;
  double rhs = 0.0;
};

class ProblemBuilder {
 public:
  int add_var(double obj = 0.0) {
    objective_.push_back(obj);
    return static_cast<int>(objective_.size()) - 1;
  }
  int add_herm_vars(Index d, const RealVector& obj_functional = RealVector()) {
    const int base = static_cast<int>(objective_.size());
    for (Index j = 0; j < d * d; ++j)
      objective_.push_back(obj_functional.size() ? obj_functional[j] : 0.0);
    return base;
  }

  int new_block(ComplexMatrix constant) {
    blocks_.push_back(SdpBlock{std::move(constant), {}});
    return static_cast<int>(blocks_.size()) - 1;
  }
  void coeff(int blk, int var, const ComplexMatrix& f) {
    auto& coeffs = blocks_[blk].coeffs;
    if (coeffs.size() <= static_cast<size_t>(var)) coeffs.resize(var + 1);
    if (coeffs[var].size() == 0)
      coeffs[var] = f;
    else
      coeffs[var] += f;
  }
  /// adds the affine image of a Hermitian variable: scale * sigma(y_base..)
  void herm_expr(int blk, int base, Index d, double scale = 1.0,
                 bool transpose_b = false, Index da = 0, Index db = 0) {
    for (Index j = 0; j < d * d; ++j) {
      ComplexMatrix e = herm_basis_element(d, j);
      if (transpose_b) e = partial_transpose(e, {da, db}, 1);
      coeff(blk, base + static_cast<int>(j), scale * e);
    }
  }

  void add_ineq(RowAccum row) { ineqs_.push_back(std::move(row)); }
  void add_eq(RowAccum row) { eqs_.push_back(std::move(row)); }

  SdpProblem finish() {
    SdpProblem p;
    p.num_vars = static_cast<int>(objective_.size());
    p.objective = Eigen::Map<RealVector>(objective_.data(), objective_.size());
    p.blocks = std::move(blocks_);
    p.ineq_lhs = RealMatrix::Zero(ineqs_.size(), p.num_vars);
    p.ineq_rhs = RealVector::Zero(ineqs_.size());
    for (size_t r = 0; r < ineqs_.size(); ++r) {
      for (auto [j, v] : ineqs_[r].entries) p.ineq_lhs(r, j) += v;
      p.ineq_rhs[r] = ineqs_[r].rhs;
    }
    p.eq_lhs = RealMatrix::Zero(eqs_.size(), p.num_vars);
    p.eq_rhs = RealVector::Zero(eqs_.size());
    for (size_t r = 0; r < eqs_.size(); ++r) {
      for (auto [j, v] : eqs_[r].entries) p.eq_lhs(r, j) += v;
      p.eq_rhs[r] = eqs_[r].rhs;
    }
    return p;
  }

 private:
  std::vector<double> objective_;
  std::vector<SdpBlock> blocks_;
  std::vector<RowAccum> ineqs_;
  std::vector<RowAccum> eqs_;
};

void nonneg_rows(ProblemBuilder& pb, int base, Index count) {
  for (Index i = 0; i < count; ++i)
    pb.add_ineq(RowAccum{{{base + static_cast<int>(i), 1.0}}, 0.0});
}

ComplexMatrix herm_at(const RealVector& y, int base, Index d) {
  return herm_unvec(y.segment(base, d * d), d);
}

Solution run_sdp(const SdpProblem& p, double accept_gap = 1e-6,
                 double accept_feas = 1e-7) {
  Solution s = solve_sdp(p, measure_solver_options());
  if (s.status == SolveStatus::MaxIter && std::abs(s.gap) <= accept_gap &&
      s.primal_residual <= accept_feas && s.dual_residual <= accept_feas)
    s.status = SolveStatus::Optimal;  // accuracy the caller needs is reached
  if (s.status != SolveStatus::Optimal)
    throw SolverFailure(std::string("sdp did not reach optimality: ") +
                        to_string(s.status));
  return s;
}

DensityMatrix clean_state(ComplexMatrix m) {
  m = 0.5 * (m + m.adjoint());
  m /= m.trace().real();
  EigenSystem es = herm_eig(m);
  RealVector lam = es.values.cwiseMax(0.0);
  lam /= lam.sum();
  return DensityMatrix(es.vectors * lam.asDiagonal() * es.vectors.adjoint());
}

// least-squares re-fit of an LP optimizer on its detected support;
// keeps the value and lands on the canonical (symmetric) optimal point
RealVector polish_lp_point(const RealMatrix& a, const RealVector& b,
                           const RealVector& x, double total) {
  const double thresh = 1e-6 * std::max(1.0, x.cwiseAbs().maxCoeff());
  std::vector<Index> support;
  for (Index i = 0; i < x.size(); ++i)
    if (x[i] > thresh) support.push_back(i);
  if (support.empty()) return x;
  RealMatrix as(a.rows() + 1, static_cast<Index>(support.size()));
  for (size_t k = 0; k < support.size(); ++k) {
    as.col(k).head(a.rows()) = a.col(support[k]);
    as(a.rows(), k) = 1.0;
  }
  RealVector bs(b.size() + 1);
  bs.head(b.size()) = b;
  bs[b.size()] = total;
  Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(as);
  RealVector xs = cod.solve(bs);
  if ((as * xs - bs).cwiseAbs().maxCoeff() > 1e-8) return x;
  if (xs.minCoeff() < -1e-10) return x;
  RealVector out = RealVector::Zero(x.size());
  for (size_t k = 0; k < support.size(); ++k)
    out[support[k]] = std::max(0.0, xs[k]);
  return out;
}

struct ConeVar {
  int base = 0;  // herm coordinates of the cone element
};

// appends a cone(F) element: sigma_tilde >= 0 (+ PPT block); trace free
ConeVar add_cone_element(ProblemBuilder& pb, const FreeSet& f,
                         const RealVector& obj = RealVector()) {
  const Index d = f.dim();
  ConeVar cv;
  cv.base = pb.add_herm_vars(d, obj);
  const int psd = pb.new_block(ComplexMatrix::Zero(d, d));
  pb.herm_expr(psd, cv.base, d);
  if (f.cone().ppt) {
    const int pt = pb.new_block(ComplexMatrix::Zero(d, d));
    pb.herm_expr(pt, cv.base, d, 1.0, true, f.cone().dim_a, f.cone().dim_b);
  }
  return cv;
}

RowAccum trace_row(int base, Index d, double coeff = 1.0) {
  RowAccum row;
  for (Index i = 0; i < d; ++i)
    row.entries.push_back({base + static_cast<int>(i), coeff});
  return row;
}

// Encodes F(rho'(y), rho) >= 1 - eps. For pure rho the fidelity is the
// linear overlap Tr[rho' rho]; otherwise the Watrous block
// [[rho', X],[X^dag, rho]] >= 0 with Re Tr X >= sqrt(1-eps) is used.
void add_fidelity_constraint(
    ProblemBuilder& pb, const DensityMatrix& rho, double eps,
    const std::vector<std::pair<int, ComplexMatrix>>& rho_prime_terms) {
  const Index d = rho.dim();
  EigenSystem es = herm_eig(rho.matrix());
  if (es.values[0] >= 1.0 - 1e-12) {
    RowAccum row;
    for (const auto& [var, term] : rho_prime_terms)
      row.entries.push_back({var, (term * rho.matrix()).trace().real()});
    row.rhs = 1.0 - eps;
    pb.add_ineq(std::move(row));
    return;
  }
  // singular mixed rho: nudge toward the maximally mixed state so the
  // block keeps an interior; the value shift is below measure tolerances
  ComplexMatrix target = rho.matrix();
  if (es.values.minCoeff() < 1e-9) {
    const double delta = 1e-9;
    target = (1.0 - delta) * target +
             delta * ComplexMatrix::Identity(d, d) / double(d);
  }
  const int x_base = pb.add_var();
  for (Index k = 1; k < 2 * d * d; ++k) pb.add_var();
  ComplexMatrix g = ComplexMatrix::Zero(2 * d, 2 * d);
  g.bottomRightCorner(d, d) = -target;
  const int blk = pb.new_block(g);
  for (const auto& [var, term] : rho_prime_terms) {
    ComplexMatrix e = ComplexMatrix::Zero(2 * d, 2 * d);
    e.topLeftCorner(d, d) = term;
    pb.coeff(blk, var, e);
  }
  RowAccum trace_re;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      const int vre = x_base + static_cast<int>(2 * (i * d + j));
      const int vim = vre + 1;
      ComplexMatrix ere = ComplexMatrix::Zero(2 * d, 2 * d);
      ere(i, d + j) = 1.0;
      ere(d + j, i) = 1.0;
      pb.coeff(blk, vre, ere);
      ComplexMatrix eim = ComplexMatrix::Zero(2 * d, 2 * d);
      eim(i, d + j) = Complex(0, 1);
      eim(d + j, i) = Complex(0, -1);
      pb.coeff(blk, vim, eim);
      if (i == j) trace_re.entries.push_back({vre, 1.0});
    }
  trace_re.rhs = std::sqrt(std::max(0.0, 1.0 - eps));
  pb.add_ineq(std::move(trace_re));
}

void check_dims(const DensityMatrix& rho, const FreeSet& f) {
  if (rho.dim() != f.dim())
    throw DimensionMismatch("measure: state and free set dimensions differ");
}

}  // namespace

MeasureValue d_min(const DensityMatrix& rho, const FreeSet& f) {
  check_dims(rho, f);
  const ComplexMatrix proj = support_projector(rho);
  MeasureValue out;
  out.witness_operator = proj;
  if (f.kind() == FreeSetKind::VertexHull) {
    const auto& verts = f.vertices();
    if (verts.empty()) throw EmptySet("d_min: empty free set");
    double best = -1.0;
    size_t best_i = 0;
    for (size_t i = 0; i < verts.size(); ++i) {
      const double ov = (proj * verts[i].matrix()).trace().real();
      if (ov > best) {
        best = ov;
        best_i = i;
      }
    }
    if (best <= 1e-300) {
      out.infinite = true;
      return out;
    }
    out.bits = -log2_clamped(best);
    out.witness_state = verts[best_i];
    return out;
  }
  // cone: maximize Tr[proj sigma] over the membership rule
  const Index d = f.dim();
  ProblemBuilder pb;
  ConeVar sigma = add_cone_element(pb, f, -herm_functional(proj));
  RowAccum tr = trace_row(sigma.base, d);
  tr.rhs = 1.0;
  pb.add_eq(std::move(tr));
  Solution s = run_sdp(pb.finish());
  const double best = -s.value;
  out.dual_gap = std::abs(s.gap);
  if (best <= 1e-300) {
    out.infinite = true;
    return out;
  }
  out.bits = -log2_clamped(best);
  out.witness_state = clean_state(herm_at(s.primal, sigma.base, d));
  return out;
}

MeasureValue d_max(const DensityMatrix& rho, const FreeSet& f) {
  check_dims(rho, f);
  const Index d = f.dim();
  MeasureValue out;
  Solution s;
  ComplexMatrix sigma_total;  // t * sigma
  if (f.kind() == FreeSetKind::VertexHull) {
    const auto& verts = f.vertices();
    // no dominating sigma exists when rho leaves the hull's support
    EigenSystem base = herm_eig(f.affine_base_point());
    Index base_rank = 0;
    while (base_rank < d && base.values[base_rank] > kDefaultRankTol)
      ++base_rank;
    if (base_rank < d) {
      const ComplexMatrix iso = base.vectors.leftCols(base_rank);
      const ComplexMatrix outside =
          rho.matrix() - iso * (iso.adjoint() * rho.matrix() * iso) *
                             iso.adjoint();
      if (outside.cwiseAbs().maxCoeff() > 1e-9) {
        out.infinite = true;
        return out;
      }
    }
    ProblemBuilder pb;
    const int base_var = pb.add_var(1.0);
    for (size_t i = 1; i < verts.size(); ++i) pb.add_var(1.0);
    if (base_rank == d) {
      const int blk = pb.new_block(rho.matrix());
      for (size_t i = 0; i < verts.size(); ++i)
        pb.coeff(blk, base_var + static_cast<int>(i), verts[i].matrix());
    } else {
      // compress onto the hull support so the program keeps an interior
      const ComplexMatrix iso = base.vectors.leftCols(base_rank);
      const int blk = pb.new_block(iso.adjoint() * rho.matrix() * iso);
      for (size_t i = 0; i < verts.size(); ++i)
        pb.coeff(blk, base_var + static_cast<int>(i),
                 iso.adjoint() * verts[i].matrix() * iso);
    }
    nonneg_rows(pb, base_var, static_cast<Index>(verts.size()));
    s = run_sdp(pb.finish());
    sigma_total = ComplexMatrix::Zero(d, d);
    for (size_t i = 0; i < verts.size(); ++i)
      sigma_total += std::max(0.0, s.primal[base_var + i]) * verts[i].matrix();
    out.witness_operator = s.dual_blocks[0];
  } else {
    ProblemBuilder pb;
    RealVector tr_obj = RealVector::Zero(d * d);
    tr_obj.head(d).setOnes();
    ConeVar sigma = add_cone_element(pb, f, tr_obj);
    const int dom = pb.new_block(rho.matrix());
    pb.herm_expr(dom, sigma.base, d);
    s = run_sdp(pb.finish());
    sigma_total = herm_at(s.primal, sigma.base, d);
    out.witness_operator = s.dual_blocks.back();
  }
  const double t = std::max(s.value, 1.0);
  out.bits = log2_clamped(t);
  out.dual_gap = std::abs(s.gap);
  out.witness_state = clean_state(sigma_total);
  if (t > 1.0 + 1e-9)
    out.complement = clean_state(sigma_total - rho.matrix());
  return out;
}

MeasureValue d_max_dual_route(const DensityMatrix& rho, const FreeSet& f) {
  check_dims(rho, f);
  const Index d = f.dim();
  ProblemBuilder pb;
  const int base = pb.add_herm_vars(d, -herm_functional(rho.matrix()));
  const int psd = pb.new_block(ComplexMatrix::Zero(d, d));
  pb.herm_expr(psd, base, d);
  if (f.kind() == FreeSetKind::VertexHull) {
    for (const auto& v : f.vertices()) {
      RowAccum row;
      const RealVector fn = herm_functional(v.matrix());
      for (Index j = 0; j < d * d; ++j)
        if (fn[j] != 0.0) row.entries.push_back({base + static_cast<int>(j),
                                                 -fn[j]});
      row.rhs = -1.0;
      pb.add_ineq(std::move(row));
    }
  } else {
    // Tr[Y sigma] <= 1 for all unit-trace cone members:
    // exists B >= 0 with I - Y - B^{T_B} >= 0 (B absent without PPT)
    const int dual = pb.new_block(-ComplexMatrix::Identity(d, d));
    pb.herm_expr(dual, base, d, -1.0);
    if (f.cone().ppt) {
      const int bb = pb.add_herm_vars(d);
      const int bpsd = pb.new_block(ComplexMatrix::Zero(d, d));
      pb.herm_expr(bpsd, bb, d);
      pb.herm_expr(dual, bb, d, -1.0, true, f.cone().dim_a, f.cone().dim_b);
    }
  }
  Solution s = run_sdp(pb.finish());
  MeasureValue out;
  const double t = std::max(-s.value, 1.0);
  out.bits = log2_clamped(t);
  out.dual_gap = std::abs(s.gap);
  out.witness_operator = herm_at(s.primal, base, d);
  return out;
}

MeasureValue d_s(const DensityMatrix& rho, const FreeSet& f) {
  check_dims(rho, f);
  const Index d = f.dim();
  MeasureValue out;
  if (f.kind() == FreeSetKind::VertexHull) {
    const auto& verts = f.vertices();
    const Index nv = static_cast<Index>(verts.size());
    RealMatrix a(d * d, 2 * nv);
    for (Index i = 0; i < nv; ++i) {
      a.col(i) = herm_vec(verts[i].matrix());
      a.col(nv + i) = -a.col(i);
    }
    LinearProgram lp;
    lp.objective = RealVector::Ones(2 * nv);
    lp.eq_lhs = a;
    lp.eq_rhs = herm_vec(rho.matrix());
    lp.lower = RealVector::Zero(2 * nv);
    Solution s = solve_lp(lp, SolverOptions{1e-10, 1e-10, 300});
    if (s.status == SolveStatus::Infeasible) {
      out.infinite = true;
      return out;
    }
    if (s.status == SolveStatus::MaxIter && std::abs(s.gap) <= 1e-6 &&
        s.primal_residual <= 1e-7 && s.dual_residual <= 1e-7)
      s.status = SolveStatus::Optimal;
    if (s.status != SolveStatus::Optimal)
      throw SolverFailure("d_s LP did not solve");
    RealVector x = polish_lp_point(a, lp.eq_rhs, s.primal, s.value);
    const double s_plus = x.head(nv).sum();   // 1 + s
    const double s_minus = x.tail(nv).sum();  // s
    out.bits = log2_clamped(std::max(1.0, 0.5 * (s_plus + s_minus + 1.0)));
    out.dual_gap = std::abs(s.gap);
    ComplexMatrix sig_hat = ComplexMatrix::Zero(d, d);
    for (Index i = 0; i < nv; ++i) sig_hat += x[i] * verts[i].matrix();
    out.witness_state = clean_state(sig_hat);
    if (s_minus > 1e-7) {
      ComplexMatrix sig_star = ComplexMatrix::Zero(d, d);
      for (Index i = 0; i < nv; ++i)
        sig_star += x[nv + i] * verts[i].matrix();
      out.complement = clean_state(sig_star);
    }
    return out;
  }
  // cone: sigma_tilde - rho in cone(F), sigma_tilde in cone(F); min trace
  ProblemBuilder pb;
  RealVector tr_obj = RealVector::Zero(d * d);
  tr_obj.head(d).setOnes();
  ConeVar sigma = add_cone_element(pb, f, tr_obj);
  const int dom = pb.new_block(rho.matrix());
  pb.herm_expr(dom, sigma.base, d);
  if (f.cone().ppt) {
    const int dom_pt = pb.new_block(
        partial_transpose(rho.matrix(), {f.cone().dim_a, f.cone().dim_b}, 1));
    pb.herm_expr(dom_pt, sigma.base, d, 1.0, true, f.cone().dim_a,
                 f.cone().dim_b);
  }
  Solution s = run_sdp(pb.finish());
  const double t = std::max(s.value, 1.0);
  out.bits = log2_clamped(t);
  out.dual_gap = std::abs(s.gap);
  ComplexMatrix sig = herm_at(s.primal, sigma.base, d);
  out.witness_state = clean_state(sig);
  if (t > 1.0 + 1e-9) out.complement = clean_state(sig - rho.matrix());
  return out;
}

MeasureValue d_h(const DensityMatrix& rho, const FreeSet& f, double eps) {
  check_dims(rho, f);
  if (eps < 0.0 || eps >= 1.0) throw OutOfRange("d_h: eps must be in [0,1)");
  if (eps <= 1e-12) return d_min(rho, f);  // D_H^0 = D_min; see Sec. V
  const Index d = f.dim();
  ProblemBuilder pb;
  const int pbase = pb.add_herm_vars(d);
  const int tvar = pb.add_var(1.0);
  const int ppos = pb.new_block(ComplexMatrix::Zero(d, d));
  pb.herm_expr(ppos, pbase, d);
  const int pcap = pb.new_block(-ComplexMatrix::Identity(d, d));
  pb.herm_expr(pcap, pbase, d, -1.0);
  // Tr[P rho] >= 1 - eps
  RowAccum row;
  const RealVector fr = herm_functional(rho.matrix());
  for (Index j = 0; j < d * d; ++j)
    if (fr[j] != 0.0) row.entries.push_back({pbase + static_cast<int>(j),
                                             fr[j]});
  row.rhs = 1.0 - eps;
  pb.add_ineq(std::move(row));
  if (f.kind() == FreeSetKind::VertexHull) {
    for (const auto& v : f.vertices()) {
      RowAccum r;
      const RealVector fv = herm_functional(v.matrix());
      for (Index j = 0; j < d * d; ++j)
        if (fv[j] != 0.0)
          r.entries.push_back({pbase + static_cast<int>(j), -fv[j]});
      r.entries.push_back({tvar, 1.0});
      pb.add_ineq(std::move(r));
    }
  } else {
    // t I - P - B^{T_B} >= 0 with B >= 0 bounds Tr[P sigma] over the cone
    const int dual = pb.new_block(ComplexMatrix::Zero(d, d));
    pb.coeff(dual, tvar, ComplexMatrix::Identity(d, d));
    pb.herm_expr(dual, pbase, d, -1.0);
    if (f.cone().ppt) {
      const int bb = pb.add_herm_vars(d);
      const int bpsd = pb.new_block(ComplexMatrix::Zero(d, d));
      pb.herm_expr(bpsd, bb, d);
      pb.herm_expr(dual, bb, d, -1.0, true, f.cone().dim_a, f.cone().dim_b);
    }
  }
  Solution s = run_sdp(pb.finish());
  MeasureValue out;
  const double t = std::clamp(s.value, 1e-300, 1.0);
  out.bits = -log2_clamped(t);
  out.dual_gap = std::abs(s.gap);
  out.witness_operator = herm_at(s.primal, pbase, d);
  return out;
}

namespace {

MeasureValue smooth_robustness(const DensityMatrix& rho, const FreeSet& f,
                               double eps, bool standard) {
  const Index d = f.dim();
  ProblemBuilder pb;
  MeasureValue out;
  if (f.kind() == FreeSetKind::VertexHull) {
    const auto& verts = f.vertices();
    const Index nv = static_cast<Index>(verts.size());
    // a-weights build (1+s) sigma_hat; b-weights build s tau (standard) or
    // the free-dominating part minus rho' (generalized)
    const int abase = pb.add_var(standard ? 0.0 : 1.0);
    for (Index i = 1; i < nv; ++i) pb.add_var(standard ? 0.0 : 1.0);
    int bbase = -1;
    int rbase = -1;
    if (standard) {
      bbase = pb.add_var(1.0);
      for (Index i = 1; i < nv; ++i) pb.add_var(1.0);
    } else {
      rbase = pb.add_herm_vars(d);
    }
    // rho' psd block
    const int rpsd = pb.new_block(ComplexMatrix::Zero(d, d));
    if (standard) {
      for (Index i = 0; i < nv; ++i) {
        pb.coeff(rpsd, abase + static_cast<int>(i), verts[i].matrix());
        pb.coeff(rpsd, bbase + static_cast<int>(i), -verts[i].matrix());
      }
    } else {
      pb.herm_expr(rpsd, rbase, d);
      // domination: sum_a a_i v_i - rho' >= 0
      const int dom = pb.new_block(ComplexMatrix::Zero(d, d));
      for (Index i = 0; i < nv; ++i)
        pb.coeff(dom, abase + static_cast<int>(i), verts[i].matrix());
      pb.herm_expr(dom, rbase, d, -1.0);
    }
    nonneg_rows(pb, abase, nv);
    if (standard) nonneg_rows(pb, bbase, nv);
    // trace(rho') = 1
    if (standard) {
      RowAccum tr;
      for (Index i = 0; i < nv; ++i) {
        tr.entries.push_back({abase + static_cast<int>(i), 1.0});
        tr.entries.push_back({bbase + static_cast<int>(i), -1.0});
      }
      tr.rhs = 1.0;
      pb.add_eq(std::move(tr));
    } else {
      RowAccum tr = trace_row(rbase, d);
      tr.rhs = 1.0;
      pb.add_eq(std::move(tr));
    }
    // fidelity constraint against rho'(y)
    std::vector<std::pair<int, ComplexMatrix>> terms;
    if (standard) {
      for (Index i = 0; i < nv; ++i) {
        terms.push_back({abase + static_cast<int>(i), verts[i].matrix()});
        terms.push_back({bbase + static_cast<int>(i), -verts[i].matrix()});
      }
    } else {
      for (Index j = 0; j < d * d; ++j)
        terms.push_back({rbase + static_cast<int>(j),
                         herm_basis_element(d, j)});
    }
    add_fidelity_constraint(pb, rho, eps, terms);
    Solution s = run_sdp(pb.finish(), 3e-5, 1e-5);
    double value;
    ComplexMatrix rho_prime;
    if (standard) {
      const double smix = s.primal.segment(bbase, nv).sum();
      value = 1.0 + std::max(0.0, smix);
      rho_prime = ComplexMatrix::Zero(d, d);
      for (Index i = 0; i < nv; ++i)
        rho_prime += (s.primal[abase + i] - s.primal[bbase + i]) *
                     verts[i].matrix();
    } else {
      value = std::max(1.0, s.primal.segment(abase, nv).sum());
      rho_prime = herm_at(s.primal, rbase, d);
    }
    out.bits = log2_clamped(value);
    out.dual_gap = std::abs(s.gap);
    out.witness_state = clean_state(rho_prime);
  } else {
    // cone form
    const int rbase = pb.add_herm_vars(d);
    RealVector tr_obj = RealVector::Zero(d * d);
    tr_obj.head(d).setOnes();
    ConeVar sig = add_cone_element(pb, f, tr_obj);  // dominating cone element
    ConeVar tau;
    if (standard) {
      // sigma_tilde - rho' must lie in cone(F) as well
      tau = add_cone_element(pb, f);
      for (Index j = 0; j < d * d; ++j) {
        RowAccum r;
        r.entries.push_back({sig.base + static_cast<int>(j), 1.0});
        r.entries.push_back({tau.base + static_cast<int>(j), -1.0});
        r.entries.push_back({rbase + static_cast<int>(j), -1.0});
        pb.add_eq(std::move(r));
      }
    } else {
      const int dom = pb.new_block(ComplexMatrix::Zero(d, d));
      pb.herm_expr(dom, sig.base, d);
      pb.herm_expr(dom, rbase, d, -1.0);
    }
    const int rpsd = pb.new_block(ComplexMatrix::Zero(d, d));
    pb.herm_expr(rpsd, rbase, d);
    RowAccum tr = trace_row(rbase, d);
    tr.rhs = 1.0;
    pb.add_eq(std::move(tr));
    std::vector<std::pair<int, ComplexMatrix>> terms;
    for (Index j = 0; j < d * d; ++j)
      terms.push_back({rbase + static_cast<int>(j),
                       herm_basis_element(d, j)});
    add_fidelity_constraint(pb, rho, eps, terms);
    Solution s = run_sdp(pb.finish(), 3e-5, 1e-5);
    const double t = std::max(1.0, s.value);
    out.bits = log2_clamped(t);
    out.dual_gap = std::abs(s.gap);
    out.witness_state = clean_state(herm_at(s.primal, rbase, d));
  }
  if (out.bits <= 1e-7) {
    out.bits = 0.0;
    out.contained = true;
  }
  return out;
}

}  // namespace

MeasureValue d_max_smooth(const DensityMatrix& rho, const FreeSet& f,
                          double eps) {
  check_dims(rho, f);
  if (eps < 0.0 || eps >= 1.0)
    throw OutOfRange("d_max_smooth: eps must be in [0,1)");
  if (eps <= 1e-12) return d_max(rho, f);
  return smooth_robustness(rho, f, eps, /*standard=*/false);
}

MeasureValue d_s_smooth(const DensityMatrix& rho, const FreeSet& f,
                        double eps) {
  check_dims(rho, f);
  if (eps < 0.0 || eps >= 1.0)
    throw OutOfRange("d_s_smooth: eps must be in [0,1)");
  if (eps <= 1e-12) return d_s(rho, f);
  return smooth_robustness(rho, f, eps, /*standard=*/true);
}

namespace {

MeasureValue aff_hypothesis(const DensityMatrix& rho, const FreeSet& f,
                            double eps) {
  const Index d = f.dim();
  ProblemBuilder pb;
  // maximize (1-eps) y - Tr Y  ==  minimize Tr Y - (1-eps) y
  const int yvar = pb.add_var(-(1.0 - eps));
  RealVector tr_obj = RealVector::Zero(d * d);
  tr_obj.head(d).setOnes();
  const int ybase = pb.add_herm_vars(d, tr_obj);
  const Index nb = static_cast<Index>(f.affine_basis().size());
  const int xbase = nb ? pb.add_var() : -1;
  for (Index i = 1; i < nb; ++i) pb.add_var();
  pb.add_ineq(RowAccum{{{yvar, 1.0}}, 0.0});  // y >= 0
  const int ypsd = pb.new_block(ComplexMatrix::Zero(d, d));
  pb.herm_expr(ypsd, ybase, d);
  // Y - y rho + sigma0 + sum x_i B_i >= 0
  const int main = pb.new_block(-f.affine_base_point());
  pb.herm_expr(main, ybase, d);
  pb.coeff(main, yvar, -rho.matrix());
  for (Index i = 0; i < nb; ++i)
    pb.coeff(main, xbase + static_cast<int>(i), f.affine_basis()[i]);
  Solution s = run_sdp(pb.finish());
  MeasureValue out;
  const double opt = -s.value;
  out.dual_gap = std::abs(s.gap);
  out.witness_operator = s.dual_blocks.back();  // optimal effect P*
  if (opt <= 1e-9) {
    out.infinite = true;
    return out;
  }
  out.bits = -log2_clamped(std::min(1.0, opt));
  return out;
}

}  // namespace

MeasureValue d_min_aff(const DensityMatrix& rho, const FreeSet& f) {
  check_dims(rho, f);
  if (f.full_dimensional()) {
    // aff(F) is the whole trace-one hyperplane: value 0 by construction
    MeasureValue out;
    out.bits = 0.0;
    out.witness_operator = ComplexMatrix::Identity(f.dim(), f.dim());
    return out;
  }
  return aff_hypothesis(rho, f, 0.0);
}

MeasureValue d_h_aff(const DensityMatrix& rho, const FreeSet& f, double eps) {
  check_dims(rho, f);
  if (eps < 0.0 || eps >= 1.0)
    throw OutOfRange("d_h_aff: eps must be in [0,1)");
  return aff_hypothesis(rho, f, eps);
}

double weight(const DensityMatrix& rho, const FreeSet& f) {
  check_dims(rho, f);
  const Index d = f.dim();
  if (f.kind() == FreeSetKind::VertexHull) {
    // only vertices inside supp(rho) can carry weight
    const ComplexMatrix proj = support_projector(rho);
    const ComplexMatrix cokernel = ComplexMatrix::Identity(d, d) - proj;
    EigenSystem es = herm_eig(rho.matrix());
    Index rank = 0;
    while (rank < d && es.values[rank] > kDefaultRankTol) ++rank;
    const ComplexMatrix iso = es.vectors.leftCols(rank);
    std::vector<ComplexMatrix> kept;
    for (const auto& v : f.vertices())
      if ((cokernel * v.matrix()).trace().real() <= 1e-9)
        kept.push_back(iso.adjoint() * v.matrix() * iso);
    if (kept.empty()) return 0.0;
    const ComplexMatrix rho_r = iso.adjoint() * rho.matrix() * iso;
    ProblemBuilder pb;
    const int base = pb.add_var(-1.0);
    for (size_t i = 1; i < kept.size(); ++i) pb.add_var(-1.0);
    const int blk = pb.new_block(-rho_r);
    for (size_t i = 0; i < kept.size(); ++i)
      pb.coeff(blk, base + static_cast<int>(i), -kept[i]);
    nonneg_rows(pb, base, static_cast<Index>(kept.size()));
    Solution s = run_sdp(pb.finish());
    return std::clamp(-s.value, 0.0, 1.0);
  }
  ProblemBuilder pb;
  RealVector tr_obj = RealVector::Zero(d * d);
  tr_obj.head(d) = RealVector::Constant(d, -1.0);
  ConeVar sig = add_cone_element(pb, f, tr_obj);
  const int dom = pb.new_block(-rho.matrix());
  pb.herm_expr(dom, sig.base, d, -1.0);
  Solution s = run_sdp(pb.finish());
  return std::clamp(-s.value, 0.0, 1.0);
}

double stab_norm(const ComplexMatrix& a, int num_qubits) {
  if (!is_hermitian(a)) throw NonHermitian("stab_norm: input not Hermitian");
  Index dim = 1;
  for (int q = 0; q < num_qubits; ++q) dim *= 2;
  if (a.rows() != dim)
    throw DimensionMismatch("stab_norm: dimension is not 2^n");
  long total = 1;
  for (int q = 0; q < num_qubits; ++q) total *= 4;
  double sum = 0;
  for (long k = 0; k < total; ++k)
    sum += std::abs((a * pauli_string(num_qubits, static_cast<int>(k)))
                        .trace());
  return sum / static_cast<double>(dim);
}

double r_tr(const DensityMatrix& rho, const FreeSet& f) {
  check_dims(rho, f);
  const Index d = f.dim();
  ProblemBuilder pb;
  RealVector tr_obj = RealVector::Zero(d * d);
  tr_obj.head(d).setOnes();
  const int abase = pb.add_herm_vars(d, tr_obj);
  const int apsd = pb.new_block(ComplexMatrix::Zero(d, d));
  pb.herm_expr(apsd, abase, d);
  const int dom = pb.new_block(rho.matrix());  // A + sigma - rho >= 0
  pb.herm_expr(dom, abase, d);
  if (f.kind() == FreeSetKind::VertexHull) {
    const auto& verts = f.vertices();
    const int cbase = pb.add_var();
    for (size_t i = 1; i < verts.size(); ++i) pb.add_var();
    for (size_t i = 0; i < verts.size(); ++i)
      pb.coeff(dom, cbase + static_cast<int>(i), verts[i].matrix());
    nonneg_rows(pb, cbase, static_cast<Index>(verts.size()));
    RowAccum tr;
    for (size_t i = 0; i < verts.size(); ++i)
      tr.entries.push_back({cbase + static_cast<int>(i), 1.0});
    tr.rhs = 1.0;
    pb.add_eq(std::move(tr));
  } else {
    ConeVar sig = add_cone_element(pb, f);
    pb.herm_expr(dom, sig.base, d);
    RowAccum tr = trace_row(sig.base, d);
    tr.rhs = 1.0;
    pb.add_eq(std::move(tr));
  }
  Solution s = run_sdp(pb.finish());
  return std::clamp(s.value, 0.0, 1.0);
}

GFidelity g_fidelity(const DensityMatrix& rho, const FreeSet& f, double k) {
  check_dims(rho, f);
  if (k < 1.0) throw OutOfRange("g_fidelity: K must be >= 1");
  const Index d = f.dim();
  GFidelity out;
  {
    // primal: sup Tr[W rho], 0 <= W <= 1, Tr[W sigma] <= 1/K over F
    ProblemBuilder pb;
    const int wbase = pb.add_herm_vars(d, -herm_functional(rho.matrix()));
    const int wpos = pb.new_block(ComplexMatrix::Zero(d, d));
    pb.herm_expr(wpos, wbase, d);
    const int wcap = pb.new_block(-ComplexMatrix::Identity(d, d));
    pb.herm_expr(wcap, wbase, d, -1.0);
    if (f.kind() == FreeSetKind::VertexHull) {
      for (const auto& v : f.vertices()) {
        RowAccum row;
        const RealVector fv = herm_functional(v.matrix());
        for (Index j = 0; j < d * d; ++j)
          if (fv[j] != 0.0)
            row.entries.push_back({wbase + static_cast<int>(j), -fv[j]});
        row.rhs = -1.0 / k;
        pb.add_ineq(std::move(row));
      }
    } else {
      const int dual = pb.new_block(-ComplexMatrix::Identity(d, d) / k);
      pb.herm_expr(dual, wbase, d, -1.0);
      if (f.cone().ppt) {
        const int bb = pb.add_herm_vars(d);
        const int bpsd = pb.new_block(ComplexMatrix::Zero(d, d));
        pb.herm_expr(bpsd, bb, d);
        pb.herm_expr(dual, bb, d, -1.0, true, f.cone().dim_a, f.cone().dim_b);
      }
    }
    Solution s = run_sdp(pb.finish());
    out.primal = std::clamp(-s.value, 0.0, 1.0);
    out.witness = herm_at(s.primal, wbase, d);
  }
  {
    // dual: inf Tr[Y] + (1/K) Tr[Z], Y >= 0, Y >= rho - Z, Z in cone(F)
    ProblemBuilder pb;
    RealVector tr_obj = RealVector::Zero(d * d);
    tr_obj.head(d).setOnes();
    const int ybase = pb.add_herm_vars(d, tr_obj);
    const int ypsd = pb.new_block(ComplexMatrix::Zero(d, d));
    pb.herm_expr(ypsd, ybase, d);
    const int dom = pb.new_block(rho.matrix());  // Y + Z - rho >= 0
    pb.herm_expr(dom, ybase, d);
    if (f.kind() == FreeSetKind::VertexHull) {
      const auto& verts = f.vertices();
      const int cbase = pb.add_var(1.0 / k);
      for (size_t i = 1; i < verts.size(); ++i) pb.add_var(1.0 / k);
      for (size_t i = 0; i < verts.size(); ++i)
        pb.coeff(dom, cbase + static_cast<int>(i), verts[i].matrix());
      nonneg_rows(pb, cbase, static_cast<Index>(verts.size()));
    } else {
      RealVector zc = RealVector::Zero(d * d);
      zc.head(d) = RealVector::Constant(d, 1.0 / k);
      ConeVar z = add_cone_element(pb, f, zc);
      pb.herm_expr(dom, z.base, d);
    }
    Solution s = run_sdp(pb.finish());
    out.dual = std::max(s.value, 0.0);
  }
  return out;
}

double one_shot_yield(const DensityMatrix& rho, const FreeSet& f,
                      const RateLadder& ladder, double eps) {
  if (ladder.rates.empty()) throw EmptyLadder("one_shot_yield: empty ladder");
  for (size_t i = 1; i < ladder.rates.size(); ++i)
    if (ladder.rates[i] <= ladder.rates[i - 1])
      throw OutOfRange("ladder rates must be strictly increasing");
  const MeasureValue v =
      f.full_dimensional() ? d_h(rho, f, eps) : d_h_aff(rho, f, eps);
  const double cap = v.infinite ? kInf : v.bits;
  double best = 0.0;
  for (double r : ladder.rates)
    if (r <= cap + 1e-9) best = r;
  return best;
}

double one_shot_cost(const DensityMatrix& rho, const FreeSet& f,
                     const RateLadder& ladder, double eps) {
  if (ladder.rates.empty()) throw EmptyLadder("one_shot_cost: empty ladder");
  for (size_t i = 1; i < ladder.rates.size(); ++i)
    if (ladder.rates[i] <= ladder.rates[i - 1])
      throw OutOfRange("ladder rates must be strictly increasing");
  const MeasureValue v = f.full_dimensional() ? d_s_smooth(rho, f, eps)
                                              : d_max_smooth(rho, f, eps);
  if (v.infinite) return kInf;
  for (double r : ladder.rates)
    if (r >= v.bits - 1e-9) return r;
  return kInf;
}

}  // namespace resq
