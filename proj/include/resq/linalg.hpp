#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>

#include "resq/errors.hpp"

namespace resq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kHermTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kDefaultRankTol = 1e-8;

bool is_hermitian(const ComplexMatrix& a, double tol = kHermTol);

/// Validated density operator: Hermitian, unit trace, PSD up to kPsdTol.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);

  Index dim() const { return mat_.rows(); }
  const ComplexMatrix& matrix() const { return mat_; }

 private:
  ComplexMatrix mat_;
};

/// Normalized state vector (norm within kNormTol).
class PureState {
 public:
  explicit PureState(ComplexVector amplitudes);

  Index dim() const { return amps_.size(); }
  const ComplexVector& amplitudes() const { return amps_; }
  ComplexMatrix projector_matrix() const { return amps_ * amps_.adjoint(); }
  DensityMatrix projector() const { return DensityMatrix(projector_matrix()); }

 private:
  ComplexVector amps_;
};

struct EigenSystem {
  RealVector values;      // descending
  ComplexMatrix vectors;  // columns match values
};

/// Hermitian eigendecomposition, eigenvalues sorted descending.
EigenSystem herm_eig(const ComplexMatrix& a);

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
double purified_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Projector onto the eigenspaces with eigenvalue > rank_tol.
ComplexMatrix support_projector(const DensityMatrix& rho,
                                double rank_tol = kDefaultRankTol);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Transpose on one tensor factor; subsystem is 0 (A) or 1 (B).
ComplexMatrix partial_transpose(const ComplexMatrix& m,
                                std::pair<Index, Index> dims, int subsystem);

/// n-qubit Pauli string; index is read base-4 (I,X,Y,Z), qubit 0 most
/// significant.
ComplexMatrix pauli_string(int num_qubits, int index);

/// Qudit displacement D_k = -e^{i pi/d} X^{k1} Z^{k2}.
ComplexMatrix weyl_operator(int d, int k1, int k2);

// shared helpers
double trace_norm(const ComplexMatrix& m);
ComplexMatrix herm_sqrt(const ComplexMatrix& a);  // clips spectrum below 0
double min_eigenvalue(const ComplexMatrix& a);

ComplexMatrix qudit_shift(int d);  // X |j> = |j+1 mod d>
ComplexMatrix qudit_clock(int d);  // Z |j> = w^j |j>

}  // namespace resq
