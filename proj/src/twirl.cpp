#include "resq/twirl.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>
#include <unordered_map>

namespace resq {

namespace {

std::string matrix_key(const ComplexMatrix& m) {
  std::string key;
  key.reserve(m.size() * 18);
  char buf[24];
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      auto push = [&](double x) {
        long long q = llround(x * 1e6);
        if (q == 0) q = 0;
        const int len = snprintf(buf, sizeof buf, "%lld,", q);
        key.append(buf, len);
      };
      push(m(i, j).real());
      push(m(i, j).imag());
    }
  return key;
}

// rotate the first near-maximal entry onto the positive real axis
ComplexMatrix canonical_phase(const ComplexMatrix& u) {
  const double mx = u.cwiseAbs().maxCoeff();
  for (Index j = 0; j < u.cols(); ++j)
    for (Index i = 0; i < u.rows(); ++i)
      if (std::abs(u(i, j)) >= mx - 1e-7) {
        const Complex ph = u(i, j) / std::abs(u(i, j));
        return u / ph;
      }
  return u;
}

void check_unitary(const ComplexMatrix& u) {
  if (u.rows() != u.cols())
    throw DimensionMismatch("ensemble member is not square");
  const ComplexMatrix res =
      u * u.adjoint() - ComplexMatrix::Identity(u.rows(), u.rows());
  if (res.cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidState("ensemble member is not unitary");
}

void check_ensemble(const UnitaryEnsemble& e) {
  if (e.unitaries.empty()) throw EmptySet("empty unitary ensemble");
  if (e.weights.size() != static_cast<Index>(e.unitaries.size()))
    throw DimensionMismatch("ensemble weights size mismatch");
  if (std::abs(e.weights.sum() - 1.0) > 1e-9 || e.weights.minCoeff() < -1e-12)
    throw InvalidState("ensemble weights are not a distribution");
  for (const auto& u : e.unitaries) check_unitary(u);
}

DensityMatrix clean_density(ComplexMatrix m) {
  m = 0.5 * (m + m.adjoint());
  m /= m.trace().real();
  return DensityMatrix(std::move(m));
}

}  // namespace

UnitaryEnsemble uniform_ensemble(std::vector<ComplexMatrix> unitaries) {
  UnitaryEnsemble e;
  e.weights =
      RealVector::Constant(unitaries.size(), 1.0 / unitaries.size());
  e.unitaries = std::move(unitaries);
  return e;
}

UnitaryEnsemble tensor_ensemble(const UnitaryEnsemble& a,
                                const UnitaryEnsemble& b) {
  UnitaryEnsemble out;
  out.weights.resize(a.weights.size() * b.weights.size());
  Index k = 0;
  for (Index i = 0; i < a.weights.size(); ++i)
    for (Index j = 0; j < b.weights.size(); ++j) {
      out.unitaries.push_back(kron(a.unitaries[i], b.unitaries[j]));
      out.weights[k++] = a.weights[i] * b.weights[j];
    }
  return out;
}

TwirlChannel build_twirl_channel(const DensityMatrix& phi, const FreeSet& f) {
  if (phi.dim() != f.dim())
    throw DimensionMismatch("build_twirl_channel: dimension mismatch");
  ComplexMatrix p_star;
  std::optional<DensityMatrix> sigma_star;
  if (f.full_dimensional()) {
    const MeasureValue mmin = d_min(phi, f);
    const MeasureValue ms = d_s(phi, f);
    if (ms.infinite || std::abs(mmin.bits - ms.bits) > 1e-5)
      throw PreconditionFailed(
          "build_twirl_channel: d_min and d_s do not collapse");
    if (!ms.complement)
      throw NoComplement("build_twirl_channel: zero robustness");
    p_star = support_projector(phi);
    sigma_star = ms.complement;
  } else {
    const MeasureValue maff = d_min_aff(phi, f);
    const MeasureValue mmax = d_max(phi, f);
    if (maff.infinite || std::abs(maff.bits - mmax.bits) > 1e-5)
      throw PreconditionFailed(
          "build_twirl_channel: d_min_aff and d_max do not collapse");
    if (!mmax.complement)
      throw NoComplement("build_twirl_channel: zero robustness");
    // clip the extracted effect into [0,1]
    EigenSystem es = herm_eig(*maff.witness_operator);
    RealVector lam = es.values.cwiseMax(0.0).cwiseMin(1.0);
    p_star = es.vectors * lam.asDiagonal() * es.vectors.adjoint();
    sigma_star = mmax.complement;
  }
  TwirlChannel c{p_star, phi, *sigma_star};
  const double on_phi = (c.p_star * phi.matrix()).trace().real();
  const double on_sigma = (c.p_star * c.sigma_star.matrix()).trace().real();
  const double cross = (phi.matrix() * c.sigma_star.matrix()).trace().real();
  if (on_phi < 1.0 - 1e-8 || std::abs(on_sigma) > 1e-8 ||
      std::abs(cross) > 1e-8)
    throw PreconditionFailed(
        "build_twirl_channel: extracted witnesses violate orthogonality");
  return c;
}

DensityMatrix apply_channel(const TwirlChannel& c, const DensityMatrix& rho) {
  if (rho.dim() != c.phi.dim())
    throw DimensionMismatch("apply_channel: dimension mismatch");
  const double p = std::clamp(
      (c.p_star * rho.matrix()).trace().real(), 0.0, 1.0);
  return clean_density(p * c.phi.matrix() +
                       (1.0 - p) * c.sigma_star.matrix());
}

namespace {

FreenessReport hull_freeness_of_images(
    const std::vector<DensityMatrix>& images, const FreeSet& f) {
  FreenessReport rep;
  rep.free = true;
  for (const auto& img : images) {
    const MembershipResult m = membership(img, f);
    rep.worst_violation = std::max(rep.worst_violation, m.residual);
    if (!m.member) rep.free = false;
  }
  return rep;
}

std::vector<DensityMatrix> cone_samples(const FreeSet& f) {
  const Index d = f.dim();
  std::vector<DensityMatrix> samples;
  for (Index k = 0; k < d; ++k) {
    ComplexMatrix m = ComplexMatrix::Zero(d, d);
    m(k, k) = 1.0;
    samples.emplace_back(m);
  }
  samples.emplace_back(ComplexMatrix::Identity(d, d) / double(d));
  // deterministic Fourier-type pure states
  for (Index shift = 1; shift < std::min<Index>(d, 4); ++shift) {
    ComplexVector v(d);
    for (Index j = 0; j < d; ++j)
      v[j] = std::polar(1.0 / std::sqrt(double(d)),
                        2.0 * std::numbers::pi * double(shift * j) / double(d));
    samples.push_back(PureState(v).projector());
  }
  return samples;
}

}  // namespace

FreenessReport verify_free(const TwirlChannel& c, const FreeSet& f) {
  if (c.phi.dim() != f.dim())
    throw DimensionMismatch("verify_free: dimension mismatch");
  if (f.kind() == FreeSetKind::VertexHull) {
    // images of the hull lie on the segment between the extreme mixtures,
    // so the two endpoints decide freeness of every vertex image
    double p_lo = 1.0, p_hi = 0.0;
    for (const auto& v : f.vertices()) {
      const double p =
          std::clamp((c.p_star * v.matrix()).trace().real(), 0.0, 1.0);
      p_lo = std::min(p_lo, p);
      p_hi = std::max(p_hi, p);
    }
    std::vector<DensityMatrix> endpoints;
    for (double p : {p_lo, p_hi})
      endpoints.push_back(clean_density(p * c.phi.matrix() +
                                        (1.0 - p) * c.sigma_star.matrix()));
    return hull_freeness_of_images(endpoints, f);
  }
  FreenessReport rep;
  rep.free = true;
  rep.sampled = true;
  for (const auto& s : cone_samples(f)) {
    const MembershipResult m = membership(apply_channel(c, s), f);
    rep.worst_violation = std::max(rep.worst_violation, m.residual);
    if (!m.member) rep.free = false;
  }
  return rep;
}

FreenessReport verify_free(const UnitaryEnsemble& e, const FreeSet& f) {
  check_ensemble(e);
  if (e.unitaries.front().rows() != f.dim())
    throw DimensionMismatch("verify_free: dimension mismatch");
  if (f.kind() == FreeSetKind::SdpCone) {
    FreenessReport rep;
    rep.free = true;
    rep.sampled = true;
    for (const auto& s : cone_samples(f)) {
      const MembershipResult m = membership(twirl_average(e, s), f);
      rep.worst_violation = std::max(rep.worst_violation, m.residual);
      if (!m.member) rep.free = false;
    }
    return rep;
  }
  // fast path: if every element permutes the vertex set, the average is free
  std::unordered_map<std::string, int> keys;
  const auto& verts = f.vertices();
  for (size_t i = 0; i < verts.size(); ++i)
    keys.emplace(matrix_key(verts[i].matrix()), static_cast<int>(i));
  bool all_match = true;
  for (const auto& u : e.unitaries) {
    for (const auto& v : verts) {
      ComplexMatrix img = u * v.matrix() * u.adjoint();
      img = 0.5 * (img + img.adjoint());
      if (!keys.count(matrix_key(img))) {
        all_match = false;
        break;
      }
    }
    if (!all_match) break;
  }
  if (all_match) {
    FreenessReport rep;
    rep.free = true;
    return rep;
  }
  // exact fallback: membership of every vertex image of the averaged channel
  std::vector<DensityMatrix> images;
  images.reserve(verts.size());
  for (const auto& v : verts) images.push_back(twirl_average(e, v));
  return hull_freeness_of_images(images, f);
}

DensityMatrix twirl_average(const UnitaryEnsemble& e,
                            const DensityMatrix& rho) {
  check_ensemble(e);
  if (e.unitaries.front().rows() != rho.dim())
    throw DimensionMismatch("twirl_average: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (size_t k = 0; k < e.unitaries.size(); ++k)
    out += e.weights[k] *
           (e.unitaries[k] * rho.matrix() * e.unitaries[k].adjoint());
  return clean_density(std::move(out));
}

GroupClosure group_closure(const std::vector<ComplexMatrix>& generators,
                           size_t cap) {
  if (generators.empty()) throw EmptySet("group_closure: no generators");
  for (const auto& g : generators) check_unitary(g);
  GroupClosure out;
  std::unordered_map<std::string, int> seen;
  std::deque<ComplexMatrix> queue;
  const Index d = generators.front().rows();
  auto visit = [&](const ComplexMatrix& u) {
    if (out.capped) return;
    const ComplexMatrix cu = canonical_phase(u);
    if (seen.emplace(matrix_key(cu), static_cast<int>(out.elements.size()))
            .second) {
      if (out.elements.size() >= cap) {
        out.capped = true;
        return;
      }
      out.elements.push_back(cu);
      queue.push_back(cu);
    }
  };
  visit(ComplexMatrix::Identity(d, d));
  while (!queue.empty() && !out.capped) {
    const ComplexMatrix u = queue.front();
    queue.pop_front();
    for (const auto& g : generators) visit(g * u);
  }
  for (size_t i = 0; i < generators.size(); ++i)
    out.generator_labels.push_back("g" + std::to_string(i));
  return out;
}

bool eigenvector_uniqueness(const std::vector<ComplexMatrix>& elements,
                            const PureState& phi) {
  if (elements.empty()) throw EmptySet("eigenvector_uniqueness: no elements");
  const Index d = phi.dim();
  ComplexMatrix joint = ComplexMatrix::Identity(d, d);
  Index k = d;
  for (const auto& u : elements) {
    check_unitary(u);
    if (u.rows() != d)
      throw DimensionMismatch("eigenvector_uniqueness: dimension mismatch");
    const ComplexVector moved = u * phi.amplitudes();
    const Complex phase = phi.amplitudes().dot(moved);
    if ((moved - phase * phi.amplitudes()).norm() > 1e-8 ||
        std::abs(std::abs(phase) - 1.0) > 1e-8)
      throw NotEigenvector(
          "eigenvector_uniqueness: phi is not an eigenvector of an element");
    // intersect with the eigenspace of u at the extracted phase
    const ComplexMatrix a =
        (u - phase * ComplexMatrix::Identity(d, d)) * joint;
    Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullV);
    Index null_dim = 0;
    for (Index i = 0; i < k; ++i)
      if (i >= svd.singularValues().size() ||
          svd.singularValues()[i] <= 1e-8)
        ++null_dim;
    joint = joint * svd.matrixV().rightCols(null_dim);
    k = null_dim;
    if (k == 0)
      throw NotEigenvector("eigenvector_uniqueness: joint eigenspace vanished");
  }
  return k == 1;
}

bool eigenvector_uniqueness(const UnitaryEnsemble& e, const PureState& phi) {
  return eigenvector_uniqueness(e.unitaries, phi);
}

bool eigenvector_uniqueness(const GroupClosure& g, const PureState& phi) {
  return eigenvector_uniqueness(g.elements, phi);
}

namespace {

// BFS over the Clifford orbit of |0...0>, tracking the preparing unitary
ComplexMatrix clifford_preparing(const PureState& phi, int n, Index d) {
  std::vector<ComplexMatrix> gens;
  if (d == 2) {
    for (int q = 0; q < n; ++q) {
      gens.push_back(embed_one(qubit_hadamard(), q, n, 2));
      gens.push_back(embed_one(qubit_phase(), q, n, 2));
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b) gens.push_back(embed_cnot(a, b, n));
  } else if (d == 3) {
    for (int q = 0; q < n; ++q) {
      gens.push_back(embed_one(qutrit_fourier(), q, n, 3));
      gens.push_back(embed_one(qutrit_phase(), q, n, 3));
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (a != b) gens.push_back(embed_sum(a, b, n));
  } else {
    throw CatalogMiss("clifford_magic_dephasing: unsupported local dimension");
  }
  Index dim = 1;
  for (int q = 0; q < n; ++q) dim *= d;
  if (phi.dim() != dim)
    throw DimensionMismatch("clifford_magic_dephasing: input dimension");
  const std::string target = matrix_key(phi.projector_matrix());

  ComplexVector seed = ComplexVector::Zero(dim);
  seed[0] = 1;
  std::unordered_map<std::string, int> seen;
  std::deque<std::pair<ComplexVector, ComplexMatrix>> queue;
  const ComplexMatrix id = ComplexMatrix::Identity(dim, dim);
  auto proj_key = [](const ComplexVector& v) {
    ComplexMatrix p = v * v.adjoint();
    p = 0.5 * (p + p.adjoint());
    return matrix_key(p);
  };
  std::string k0 = proj_key(seed);
  if (k0 == target) return id;
  seen.emplace(k0, 0);
  queue.push_back({seed, id});
  while (!queue.empty()) {
    auto [v, u] = queue.front();
    queue.pop_front();
    for (const auto& g : gens) {
      ComplexVector w = g * v;
      const std::string key = proj_key(w);
      if (seen.count(key)) continue;
      ComplexMatrix gu = g * u;
      if (key == target) return gu;
      seen.emplace(key, static_cast<int>(seen.size()));
      queue.push_back({std::move(w), std::move(gu)});
    }
  }
  throw PreconditionFailed(
      "clifford_magic_dephasing: input is not a stabilizer state");
}

}  // namespace

UnitaryEnsemble clifford_magic_dephasing(const std::string& gate_label,
                                         const PureState& stab_input) {
  ComplexMatrix v;
  int n = 0;
  Index d = 0;
  if (gate_label == "t_qubit") {
    v = ComplexMatrix::Identity(2, 2);
    v(1, 1) = std::polar(1.0, std::numbers::pi / 4);
    n = 1;
    d = 2;
  } else if (gate_label == "t_qutrit") {
    v = ComplexMatrix::Zero(3, 3);
    v(0, 0) = std::polar(1.0, 2 * std::numbers::pi / 9);
    v(1, 1) = 1.0;
    v(2, 2) = std::polar(1.0, -2 * std::numbers::pi / 9);
    n = 1;
    d = 3;
  } else if (gate_label == "toffoli") {
    v = ComplexMatrix::Identity(8, 8);
    v(6, 6) = v(7, 7) = 0;
    v(6, 7) = v(7, 6) = 1;
    n = 3;
    d = 2;
  } else {
    throw CatalogMiss("clifford_magic_dephasing: unknown gate " + gate_label);
  }
  const ComplexMatrix u = clifford_preparing(stab_input, n, d);

  // W_{jk} = (VU) Z_k^j (VU)^dag: conjugating the stabilizer generators of
  // phi = U|0...0> by the third-level V keeps the elements Clifford and
  // gives W |psi_z> = w^{j z_k} |psi_z> for psi_z = VU|z>
  std::vector<ComplexMatrix> w_base;  // W_{1k} per qudit position
  const ComplexMatrix z1 = qudit_clock(d);
  for (int q = 0; q < n; ++q) {
    const ComplexMatrix zq = embed_one(z1, q, n, d);
    w_base.push_back(v * u * zq * u.adjoint() * v.adjoint());
  }
  std::vector<ComplexMatrix> elements;
  std::vector<int> idx(n, 0);
  const Index dim = w_base.front().rows();
  while (true) {
    ComplexMatrix prod = ComplexMatrix::Identity(dim, dim);
    for (int q = 0; q < n; ++q)
      for (int rep = 0; rep < idx[q]; ++rep) prod = w_base[q] * prod;
    elements.push_back(prod);
    int q = 0;
    while (q < n && ++idx[q] == static_cast<int>(d)) idx[q++] = 0;
    if (q == n) break;
  }
  UnitaryEnsemble out = uniform_ensemble(std::move(elements));

  // catalog gates are third-level: every element must preserve the hull
  const FreeSet hull = d == 2 ? stabilizer_states(n)
                              : stabilizer_states_qutrit(n);
  const FreenessReport rep = verify_free(out, hull);
  if (!rep.free)
    throw PreconditionFailed(
        "clifford_magic_dephasing: ensemble element left the stabilizer hull");
  return out;
}

ComplexMatrix hoggar_unitary_u7() {
  const Complex om = std::polar(1.0, 2 * std::numbers::pi / 8);
  const Complex i(0, 1);
  ComplexMatrix m(8, 8);
  m << 0, 0, 1, 0, -i, 0, 0, 0,
       0, 0, i, 0, -1, 0, 0, 0,
       0, 0, 0, -i, 0, -1, 0, 0,
       0, 0, 0, -1, 0, -i, 0, 0,
       1, 0, 0, 0, 0, 0, -i, 0,
       -i, 0, 0, 0, 0, 0, 1, 0,
       0, -i, 0, 0, 0, 0, 0, -1,
       0, 1, 0, 0, 0, 0, 0, i;
  return std::pow(om, 5) / std::sqrt(2.0) * m;
}

ComplexMatrix hoggar_unitary_u12() {
  const Complex om = std::polar(1.0, 2 * std::numbers::pi / 8);
  const Complex i(0, 1);
  ComplexMatrix m(8, 8);
  m << 0, 0, 0, 0, 1, i, 0, 0,
       0, 0, 0, 0, -1, i, 0, 0,
       1, -i, 0, 0, 0, 0, 0, 0,
       -1, -i, 0, 0, 0, 0, 0, 0,
       0, 0, 1, i, 0, 0, 0, 0,
       0, 0, -1, i, 0, 0, 0, 0,
       0, 0, 0, 0, 0, 0, 1, -i,
       0, 0, 0, 0, 0, 0, -1, -i;
  return std::pow(om, 3) / std::sqrt(2.0) * m;
}

std::vector<ComplexMatrix> strange_stabilizer_cliffords() {
  const GroupClosure cl =
      group_closure({qutrit_fourier(), qutrit_phase()}, 1000);
  if (cl.capped || cl.elements.size() != 216)
    throw Error("qutrit Clifford closure has unexpected size");
  const ComplexVector s = named_pure("strange").amplitudes();
  std::vector<ComplexMatrix> stab;
  for (const auto& u : cl.elements)
    if (std::abs(std::abs(ComplexVector(u * s).dot(s)) - 1.0) < 1e-9)
      stab.push_back(u);
  if (stab.size() != 24)
    throw Error("Strange stabilizer subgroup has unexpected size");
  return stab;
}

}  // namespace resq
