#include "resq/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace resq {

bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() == 0)
    throw InvalidState("density matrix must be square and nonempty");
  if (!is_hermitian(mat_, kHermTol))
    throw NonHermitian("density matrix is not Hermitian");
  if (std::abs(mat_.trace().real() - 1.0) > kTraceTol ||
      std::abs(mat_.trace().imag()) > kTraceTol)
    throw InvalidState("density matrix trace differs from 1");
  if (min_eigenvalue(mat_) < -kPsdTol)
    throw InvalidState("density matrix has a negative eigenvalue");
}

PureState::PureState(ComplexVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw InvalidState("empty state vector");
  if (std::abs(amps_.norm() - 1.0) > kNormTol)
    throw InvalidState("state vector is not normalized");
}

EigenSystem herm_eig(const ComplexMatrix& a) {
  if (!is_hermitian(a, kHermTol))
    throw NonHermitian("herm_eig requires a Hermitian input");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a);
  if (solver.info() != Eigen::Success)
    throw Error("Hermitian eigendecomposition failed to converge");
  EigenSystem out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

double min_eigenvalue(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a,
                                                      Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

ComplexMatrix herm_sqrt(const ComplexMatrix& a) {
  EigenSystem es = herm_eig(a);
  RealVector clipped = es.values.cwiseMax(0.0).cwiseSqrt();
  return es.vectors * clipped.asDiagonal() * es.vectors.adjoint();
}

double trace_norm(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim())
    throw DimensionMismatch("fidelity: dimension mismatch");
  const ComplexMatrix root = herm_sqrt(rho.matrix()) * herm_sqrt(sigma.matrix());
  const double f = trace_norm(root);
  return std::clamp(f * f, 0.0, 1.0);
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim())
    throw DimensionMismatch("trace_distance: dimension mismatch");
  return std::clamp(0.5 * trace_norm(rho.matrix() - sigma.matrix()), 0.0, 1.0);
}

double purified_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return std::sqrt(std::max(0.0, 1.0 - fidelity(rho, sigma)));
}

ComplexMatrix support_projector(const DensityMatrix& rho, double rank_tol) {
  EigenSystem es = herm_eig(rho.matrix());
  ComplexMatrix proj = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (Index k = 0; k < es.values.size(); ++k) {
    if (es.values[k] > rank_tol)
      proj += es.vectors.col(k) * es.vectors.col(k).adjoint();
  }
  return proj;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m,
                                std::pair<Index, Index> dims, int subsystem) {
  const auto [da, db] = dims;
  if (m.rows() != m.cols() || m.rows() != da * db)
    throw DimensionMismatch("partial_transpose: dims do not factor the matrix");
  if (subsystem != 0 && subsystem != 1)
    throw IndexOutOfRange("partial_transpose: subsystem must be 0 or 1");
  ComplexMatrix out(m.rows(), m.cols());
  for (Index a = 0; a < da; ++a)
    for (Index b = 0; b < db; ++b)
      for (Index ap = 0; ap < da; ++ap)
        for (Index bp = 0; bp < db; ++bp) {
          const Index row = a * db + b, col = ap * db + bp;
          const Index trow = subsystem == 0 ? ap * db + b : a * db + bp;
          const Index tcol = subsystem == 0 ? a * db + bp : ap * db + b;
          out(trow, tcol) = m(row, col);
        }
  return out;
}

ComplexMatrix pauli_string(int num_qubits, int index) {
  if (num_qubits < 1) throw IndexOutOfRange("pauli_string: need >= 1 qubit");
  long total = 1;
  for (int q = 0; q < num_qubits; ++q) total *= 4;
  if (index < 0 || index >= total)
    throw IndexOutOfRange("pauli_string: index out of range");

  static const ComplexMatrix kI = ComplexMatrix::Identity(2, 2);
  static const ComplexMatrix kX = [] {
    ComplexMatrix x(2, 2);
    x << 0, 1, 1, 0;
    return x;
  }();
  static const ComplexMatrix kY = [] {
    ComplexMatrix y(2, 2);
    y << 0, Complex(0, -1), Complex(0, 1), 0;
    return y;
  }();
  static const ComplexMatrix kZ = [] {
    ComplexMatrix z(2, 2);
    z << 1, 0, 0, -1;
    return z;
  }();
  const ComplexMatrix* table[4] = {&kI, &kX, &kY, &kZ};

  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  long rem = index;
  long place = total / 4;
  for (int q = 0; q < num_qubits; ++q) {
    const int digit = static_cast<int>(rem / place);
    rem %= place;
    place /= 4;
    out = kron(out, *table[digit]);
  }
  return out;
}

ComplexMatrix qudit_shift(int d) {
  ComplexMatrix x = ComplexMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) x((j + 1) % d, j) = 1.0;
  return x;
}

ComplexMatrix qudit_clock(int d) {
  ComplexMatrix z = ComplexMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j)
    z(j, j) = std::polar(1.0, 2.0 * std::numbers::pi * j / d);
  return z;
}

ComplexMatrix weyl_operator(int d, int k1, int k2) {
  if (d < 2) throw IndexOutOfRange("weyl_operator: d must be >= 2");
  if (k1 < 0 || k1 >= d || k2 < 0 || k2 >= d)
    throw IndexOutOfRange("weyl_operator: k out of range");
  ComplexMatrix xk = ComplexMatrix::Identity(d, d);
  const ComplexMatrix x = qudit_shift(d);
  for (int i = 0; i < k1; ++i) xk = x * xk;
  ComplexMatrix zk = ComplexMatrix::Identity(d, d);
  const ComplexMatrix z = qudit_clock(d);
  for (int i = 0; i < k2; ++i) zk = z * zk;
  const Complex phase = -std::polar(1.0, std::numbers::pi / d);
  return phase * xk * zk;
}

}  // namespace resq
