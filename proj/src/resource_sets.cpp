#include "resq/resource_sets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <unordered_map>

#include "resq/convex.hpp"

namespace resq {

RealVector herm_vec(const ComplexMatrix& m) {
  const Index d = m.rows();
  RealVector v(d * d);
  Index k = 0;
  for (Index i = 0; i < d; ++i) v[k++] = m(i, i).real();
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j) {
      v[k++] = m(i, j).real();
      v[k++] = m(i, j).imag();
    }
  return v;
}

ComplexMatrix herm_unvec(const RealVector& v, Index d) {
  ComplexMatrix m(d, d);
  Index k = 0;
  for (Index i = 0; i < d; ++i) m(i, i) = v[k++];
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j) {
      m(i, j) = Complex(v[k], v[k + 1]);
      m(j, i) = Complex(v[k], -v[k + 1]);
      k += 2;
    }
  return m;
}

namespace {

std::string key_of(const ComplexMatrix& m) {
  std::string key;
  key.reserve(m.size() * 18);
  char buf[24];
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      auto push = [&](double x) {
        long long q = llround(x * 1e6);
        if (q == 0) q = 0;  // merge the -0 bucket
        const int len = snprintf(buf, sizeof buf, "%lld,", q);
        key.append(buf, len);
      };
      push(m(i, j).real());
      push(m(i, j).imag());
    }
  return key;
}

std::vector<DensityMatrix> orbit_closure(
    const ComplexVector& seed, const std::vector<ComplexMatrix>& generators,
    size_t expected) {
  std::vector<DensityMatrix> states;
  std::unordered_map<std::string, int> seen;
  std::deque<ComplexVector> queue;
  auto visit = [&](const ComplexVector& v) {
    ComplexMatrix p = v * v.adjoint();
    p = 0.5 * (p + p.adjoint());
    const std::string key = key_of(p);
    if (seen.emplace(key, static_cast<int>(states.size())).second) {
      if (states.size() >= expected)
        throw Error("stabilizer orbit exceeded the expected count");
      states.emplace_back(p);
      queue.push_back(v);
    }
  };
  visit(seed);
  while (!queue.empty()) {
    const ComplexVector v = queue.front();
    queue.pop_front();
    for (const auto& g : generators) visit(g * v);
  }
  if (states.size() != expected)
    throw Error("stabilizer orbit produced " + std::to_string(states.size()) +
                " states, expected " + std::to_string(expected));
  return states;
}

size_t stabilizer_count(Index d, int n) {
  size_t count = 1;
  for (int k = 1; k <= n; ++k) {
    size_t p = 1;
    for (int i = 0; i < k; ++i) p *= d;
    count *= p + 1;
  }
  for (int i = 0; i < n; ++i) count *= d;
  return count;
}

void compute_affine_hull(const std::vector<DensityMatrix>& verts,
                         std::vector<ComplexMatrix>& basis,
                         ComplexMatrix& base_point, bool& full_dim) {
  const Index d = verts.front().dim();
  base_point = ComplexMatrix::Zero(d, d);
  for (const auto& v : verts) base_point += v.matrix();
  base_point /= static_cast<double>(verts.size());

  basis.clear();
  std::vector<RealVector> ortho;
  for (const auto& v : verts) {
    RealVector w = herm_vec(v.matrix() - base_point);
    for (const auto& u : ortho) w -= u.dot(w) * u;
    for (const auto& u : ortho) w -= u.dot(w) * u;  // re-orthogonalize
    const double nrm = w.norm();
    if (nrm > kDefaultRankTol) {
      w /= nrm;
      ortho.push_back(w);
      basis.push_back(herm_unvec(w, d));
    }
  }
  full_dim = static_cast<Index>(basis.size()) == d * d - 1;
}

// two-qudit gate embedded at digit positions (a,b)
ComplexMatrix embed_two(const ComplexMatrix& u, int a, int b, int n, Index d) {
  Index dim = 1;
  for (int q = 0; q < n; ++q) dim *= d;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  std::vector<Index> digits(n);
  for (Index col = 0; col < dim; ++col) {
    Index rem = col;
    for (int q = n - 1; q >= 0; --q) {
      digits[q] = rem % d;
      rem /= d;
    }
    const Index sub = digits[a] * d + digits[b];
    for (Index sub2 = 0; sub2 < d * d; ++sub2) {
      if (u(sub2, sub) == Complex(0, 0)) continue;
      auto nd = digits;
      nd[a] = sub2 / d;
      nd[b] = sub2 % d;
      Index row = 0;
      for (int q = 0; q < n; ++q) row = row * d + nd[q];
      out(row, col) += u(sub2, sub);
    }
  }
  return out;
}

}  // namespace

ComplexMatrix qubit_hadamard() {
  ComplexMatrix h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

ComplexMatrix qubit_phase() {
  ComplexMatrix s(2, 2);
  s << 1, 0, 0, Complex(0, 1);
  return s;
}

ComplexMatrix qutrit_fourier() {
  ComplexMatrix f(3, 3);
  const Complex w = std::polar(1.0, 2.0 * std::numbers::pi / 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      f(i, j) = std::pow(w, Complex(i * j)) / std::sqrt(3.0);
  return f;
}

ComplexMatrix qutrit_phase() {
  // diag(w^{j(j-1)/2}) = diag(1, 1, w)
  ComplexMatrix s = ComplexMatrix::Identity(3, 3);
  s(2, 2) = std::polar(1.0, 2.0 * std::numbers::pi / 3);
  return s;
}

ComplexMatrix embed_one(const ComplexMatrix& u, int pos, int n, Index d) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int q = 0; q < n; ++q)
    out = kron(out, q == pos ? u : ComplexMatrix::Identity(d, d));
  return out;
}

ComplexMatrix embed_cnot(int control, int target, int n) {
  ComplexMatrix cnot = ComplexMatrix::Zero(4, 4);
  cnot(0, 0) = cnot(1, 1) = cnot(3, 2) = cnot(2, 3) = 1;
  return embed_two(cnot, control, target, n, 2);
}

ComplexMatrix embed_sum(int control, int target, int n) {
  ComplexMatrix sum = ComplexMatrix::Zero(9, 9);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) sum(i * 3 + (i + j) % 3, i * 3 + j) = 1;
  return embed_two(sum, control, target, n, 3);
}

FreeSet FreeSet::vertex_hull(std::vector<DensityMatrix> vertices,
                             std::string label) {
  if (vertices.empty()) throw EmptySet("vertex hull needs vertices");
  FreeSet f;
  f.kind_ = FreeSetKind::VertexHull;
  f.dim_ = vertices.front().dim();
  for (const auto& v : vertices)
    if (v.dim() != f.dim_)
      throw DimensionMismatch("vertex hull: mixed dimensions");
  f.label_ = std::move(label);
  f.vertices_ = std::move(vertices);
  compute_affine_hull(f.vertices_, f.basis_, f.base_point_, f.full_dim_);
  return f;
}

FreeSet FreeSet::sdp_cone(Index dim, SdpConeDescriptor desc,
                          std::string label) {
  FreeSet f;
  f.kind_ = FreeSetKind::SdpCone;
  f.dim_ = dim;
  if (desc.ppt && desc.dim_a * desc.dim_b != dim)
    throw DimensionMismatch("sdp cone: bipartition does not match dim");
  f.label_ = std::move(label);
  f.cone_ = desc;
  // PSD (+PPT) sets contain a ball around I/d: full trace-one hyperplane.
  f.base_point_ = ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
  f.full_dim_ = true;
  RealVector base = herm_vec(ComplexMatrix::Zero(dim, dim));
  for (Index i = 1; i < dim * dim; ++i) {
    RealVector e = base;
    e[i] = 1.0;
    ComplexMatrix dir = herm_unvec(e, dim);
    if (i < dim) dir(0, 0) = -1.0;  // keep diagonal directions traceless
    f.basis_.push_back(dir);
  }
  return f;
}

const std::vector<DensityMatrix>& FreeSet::vertices() const {
  if (kind_ != FreeSetKind::VertexHull)
    throw Error("free set has no vertex list");
  return vertices_;
}

const SdpConeDescriptor& FreeSet::cone() const {
  if (kind_ != FreeSetKind::SdpCone)
    throw Error("free set has no cone descriptor");
  return cone_;
}

FreeSet stabilizer_states(int num_qubits) {
  if (num_qubits < 1 || num_qubits > 3)
    throw OutOfRange("stabilizer_states supports 1 to 3 qubits");
  const int n = num_qubits;
  std::vector<ComplexMatrix> gens;
  for (int q = 0; q < n; ++q) {
    gens.push_back(embed_one(qubit_hadamard(), q, n, 2));
    gens.push_back(embed_one(qubit_phase(), q, n, 2));
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) gens.push_back(embed_cnot(a, b, n));
  ComplexVector seed = ComplexVector::Zero(Index(1) << n);
  seed[0] = 1;
  auto verts = orbit_closure(seed, gens, stabilizer_count(2, n));
  return FreeSet::vertex_hull(std::move(verts),
                              "stab" + std::to_string(n) + "q");
}

FreeSet stabilizer_states_qutrit(int num_qutrits) {
  if (num_qutrits < 1 || num_qutrits > 2)
    throw OutOfRange("stabilizer_states_qutrit supports 1 or 2 qutrits");
  const int n = num_qutrits;
  std::vector<ComplexMatrix> gens;
  for (int q = 0; q < n; ++q) {
    gens.push_back(embed_one(qutrit_fourier(), q, n, 3));
    gens.push_back(embed_one(qutrit_phase(), q, n, 3));
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) gens.push_back(embed_sum(a, b, n));
  Index dim = 1;
  for (int q = 0; q < n; ++q) dim *= 3;
  ComplexVector seed = ComplexVector::Zero(dim);
  seed[0] = 1;
  auto verts = orbit_closure(seed, gens, stabilizer_count(3, n));
  return FreeSet::vertex_hull(std::move(verts),
                              "stab" + std::to_string(n) + "t");
}

FreeSet coherence_set(Index d) {
  if (d < 2) throw OutOfRange("coherence_set needs d >= 2");
  std::vector<DensityMatrix> verts;
  for (Index k = 0; k < d; ++k) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(k, k) = 1;
    verts.emplace_back(m);
  }
  return FreeSet::vertex_hull(std::move(verts), "coh" + std::to_string(d));
}

FreeSet ppt_set(Index dim_a, Index dim_b) {
  SdpConeDescriptor desc;
  desc.dim_a = dim_a;
  desc.dim_b = dim_b;
  desc.ppt = true;
  return FreeSet::sdp_cone(
      dim_a * dim_b, desc,
      "ppt" + std::to_string(dim_a) + "x" + std::to_string(dim_b));
}

MembershipResult membership(const DensityMatrix& rho, const FreeSet& f) {
  if (rho.dim() != f.dim())
    throw DimensionMismatch("membership: dimension mismatch");
  MembershipResult out;
  if (f.kind() == FreeSetKind::SdpCone) {
    // direct constraint evaluation
    double viol = std::max(0.0, -min_eigenvalue(rho.matrix()));
    ComplexMatrix wit;
    if (f.cone().ppt) {
      const ComplexMatrix pt = partial_transpose(
          rho.matrix(), {f.cone().dim_a, f.cone().dim_b}, 1);
      EigenSystem es = herm_eig(pt);
      const double lmin = es.values.minCoeff();
      if (-lmin > viol) {
        const Index k = es.values.size() - 1;  // ascending reversed: last
        const ComplexMatrix proj =
            es.vectors.col(k) * es.vectors.col(k).adjoint();
        wit = -partial_transpose(proj, {f.cone().dim_a, f.cone().dim_b}, 1);
        viol = -lmin;
      }
    }
    out.member = viol <= 1e-7;
    out.residual = viol;
    if (!out.member) out.witness = wit;
    return out;
  }

  // vertex hull: phase-1 decomposition LP
  const auto& verts = f.vertices();
  const Index d = f.dim();
  const Index nv = static_cast<Index>(verts.size());
  const Index nc = d * d;
  RealMatrix a = RealMatrix::Zero(nc + 1, nv + 2 * nc);
  for (Index i = 0; i < nv; ++i) {
    a.col(i).head(nc) = herm_vec(verts[i].matrix());
    a(nc, i) = 1.0;
  }
  a.block(0, nv, nc, nc) = RealMatrix::Identity(nc, nc);
  a.block(0, nv + nc, nc, nc) = -RealMatrix::Identity(nc, nc);
  RealVector b(nc + 1);
  b.head(nc) = herm_vec(rho.matrix());
  b[nc] = 1.0;

  LinearProgram lp;
  lp.objective = RealVector::Zero(nv + 2 * nc);
  lp.objective.tail(2 * nc).setOnes();
  lp.eq_lhs = a;
  lp.eq_rhs = b;
  lp.lower = RealVector::Zero(nv + 2 * nc);
  Solution s = solve_lp(lp, SolverOptions{1e-9, 1e-9, 200});
  if (s.status == SolveStatus::MaxIter && std::abs(s.gap) <= 1e-6 &&
      s.primal_residual <= 1e-7 && s.dual_residual <= 1e-7)
    s.status = SolveStatus::Optimal;
  if (s.status != SolveStatus::Optimal)
    throw SolverFailure("membership LP did not solve");
  out.residual = std::max(0.0, s.value);
  out.member = out.residual <= 1e-7;
  if (!out.member) {
    ComplexMatrix w = herm_unvec(s.dual.head(nc), d);
    out.witness = 0.5 * (w + w.adjoint());
  }
  return out;
}

PureState named_pure(const std::string& label) {
  using std::numbers::pi;
  if (label == "face") {
    EigenSystem es = herm_eig(named_state("face").matrix());
    ComplexVector v = es.vectors.col(0);
    Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    v *= std::abs(v[imax]) / v[imax];
    return PureState(v);
  }
  if (label == "hoggar") {
    ComplexVector v(8);
    v << Complex(1, 1), 0, -1, 1, Complex(0, -1), -1, 0, 0;
    return PureState(v / std::sqrt(6.0));
  }
  if (label == "strange") {
    ComplexVector v(3);
    v << 0, 1, -1;
    return PureState(v / std::sqrt(2.0));
  }
  if (label == "norrell") {
    ComplexVector v(3);
    v << -1, 2, -1;
    return PureState(v / std::sqrt(6.0));
  }
  if (label == "t_qutrit") {
    ComplexVector v(3);
    v << std::polar(1.0, 2 * pi / 9), 1.0, std::polar(1.0, -2 * pi / 9);
    return PureState(v / std::sqrt(3.0));
  }
  if (label.rfind("bell", 0) == 0 && label.size() > 4) {
    const int m = std::stoi(label.substr(4));
    if (m < 2) throw UnknownLabel("bell dimension must be >= 2");
    ComplexVector v = ComplexVector::Zero(Index(m) * m);
    for (int i = 0; i < m; ++i) v[Index(i) * m + i] = 1.0 / std::sqrt(m);
    return PureState(v);
  }
  if (label.rfind("max_coherent", 0) == 0 && label.size() > 12) {
    const int m = std::stoi(label.substr(12));
    if (m < 2) throw UnknownLabel("max_coherent dimension must be >= 2");
    return PureState(ComplexVector::Constant(m, 1.0 / std::sqrt(m)));
  }
  throw UnknownLabel("unknown state label: " + label);
}

DensityMatrix named_state(const std::string& label) {
  if (label == "face") {
    const ComplexMatrix sum =
        pauli_string(1, 1) + pauli_string(1, 2) + pauli_string(1, 3);
    return DensityMatrix(
        0.5 * (ComplexMatrix::Identity(2, 2) + sum / std::sqrt(3.0)));
  }
  return named_pure(label).projector();
}

DensityMatrix isotropic(const DensityMatrix& phi,
                        const DensityMatrix& sigma_star, double kappa) {
  if (phi.dim() != sigma_star.dim())
    throw DimensionMismatch("isotropic: dimension mismatch");
  if (kappa < 0.0 || kappa > 1.0)
    throw OutOfRange("isotropic: kappa must lie in [0,1]");
  const double overlap = (phi.matrix() * sigma_star.matrix()).trace().real();
  if (std::abs(overlap) > 1e-8)
    throw NotOrthogonal("isotropic: states are not orthogonal");
  return DensityMatrix(kappa * phi.matrix() +
                       (1.0 - kappa) * sigma_star.matrix());
}

}  // namespace resq
