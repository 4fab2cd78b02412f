#pragma once

#include <string>
#include <vector>

#include "resq/linalg.hpp"

namespace resq {

// real coordinates of a Hermitian matrix: diagonal, then (re, im) per
// upper off-diagonal entry
RealVector herm_vec(const ComplexMatrix& m);
ComplexMatrix herm_unvec(const RealVector& v, Index d);

enum class FreeSetKind { VertexHull, SdpCone };

/// Cone membership rule: PSD, unit trace, optionally PSD partial transpose.
struct SdpConeDescriptor {
  Index dim_a = 0;
  Index dim_b = 0;
  bool ppt = false;
};

class FreeSet {
 public:
  static FreeSet vertex_hull(std::vector<DensityMatrix> vertices,
                             std::string label);
  static FreeSet sdp_cone(Index dim, SdpConeDescriptor desc, std::string label);

  FreeSetKind kind() const { return kind_; }
  Index dim() const { return dim_; }
  const std::string& label() const { return label_; }

  const std::vector<DensityMatrix>& vertices() const;
  const SdpConeDescriptor& cone() const;

  /// Traceless Hermitian directions spanning aff(F) - base point.
  const std::vector<ComplexMatrix>& affine_basis() const { return basis_; }
  const ComplexMatrix& affine_base_point() const { return base_point_; }
  /// aff(F) is the whole trace-one hyperplane.
  bool full_dimensional() const { return full_dim_; }

 private:
  FreeSetKind kind_ = FreeSetKind::VertexHull;
  Index dim_ = 0;
  std::string label_;
  std::vector<DensityMatrix> vertices_;
  SdpConeDescriptor cone_;
  std::vector<ComplexMatrix> basis_;
  ComplexMatrix base_point_;
  bool full_dim_ = false;
};

struct MembershipResult {
  bool member = false;
  double residual = 0.0;
  /// Separating witness when member == false: Tr[W rho] > max_F Tr[W sigma].
  ComplexMatrix witness;
};

FreeSet stabilizer_states(int num_qubits);          // 1..3
FreeSet stabilizer_states_qutrit(int num_qutrits);  // 1..2
FreeSet coherence_set(Index d);
FreeSet ppt_set(Index dim_a, Index dim_b);

MembershipResult membership(const DensityMatrix& rho, const FreeSet& f);

/// face, hoggar, strange, norrell, t_qutrit, bell<m>, max_coherent<m>
DensityMatrix named_state(const std::string& label);
PureState named_pure(const std::string& label);

/// kappa Phi + (1-kappa) sigma_star; requires Tr[Phi sigma_star] <= 1e-8.
DensityMatrix isotropic(const DensityMatrix& phi,
                        const DensityMatrix& sigma_star, double kappa);

// Clifford generators (shared with the twirl module)
ComplexMatrix qubit_hadamard();
ComplexMatrix qubit_phase();
ComplexMatrix qutrit_fourier();
ComplexMatrix qutrit_phase();
ComplexMatrix embed_one(const ComplexMatrix& u, int pos, int n, Index d);
ComplexMatrix embed_cnot(int control, int target, int n);   // qubits
ComplexMatrix embed_sum(int control, int target, int n);    // qutrits

}  // namespace resq
