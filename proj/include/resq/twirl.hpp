#pragma once

#include <string>
#include <vector>

#include "resq/measures.hpp"
#include "resq/resource_sets.hpp"

namespace resq {

/// Measure-and-prepare map
///   L(rho) = Tr[P* rho] Phi + Tr[(1-P*) rho] sigma*.
struct TwirlChannel {
  ComplexMatrix p_star;
  DensityMatrix phi;
  DensityMatrix sigma_star;
};

struct UnitaryEnsemble {
  std::vector<ComplexMatrix> unitaries;
  RealVector weights;
};

UnitaryEnsemble uniform_ensemble(std::vector<ComplexMatrix> unitaries);
UnitaryEnsemble tensor_ensemble(const UnitaryEnsemble& a,
                                const UnitaryEnsemble& b);

struct GroupClosure {
  std::vector<ComplexMatrix> elements;  // deduplicated up to global phase
  std::vector<std::string> generator_labels;
  bool capped = false;
};

struct FreenessReport {
  bool free = false;
  double worst_violation = 0.0;
  bool sampled = false;  // cone sets admit only sampled verification
};

/// Builds the measure-and-prepare channel from the measure collapse
/// (full-dimensional path: d_min = d_s; reduced path: d_min_aff = d_max).
TwirlChannel build_twirl_channel(const DensityMatrix& phi, const FreeSet& f);

DensityMatrix apply_channel(const TwirlChannel& c, const DensityMatrix& rho);

FreenessReport verify_free(const TwirlChannel& c, const FreeSet& f);
FreenessReport verify_free(const UnitaryEnsemble& e, const FreeSet& f);

DensityMatrix twirl_average(const UnitaryEnsemble& e, const DensityMatrix& rho);

GroupClosure group_closure(const std::vector<ComplexMatrix>& generators,
                           size_t cap = 20000);

/// True when phi is the unique joint eigenvector of all elements at the
/// phases extracted from phi itself.
bool eigenvector_uniqueness(const std::vector<ComplexMatrix>& elements,
                            const PureState& phi);
bool eigenvector_uniqueness(const UnitaryEnsemble& e, const PureState& phi);
bool eigenvector_uniqueness(const GroupClosure& g, const PureState& phi);

/// Dephasing ensemble {prod_k W_{j_k k}}, W_{jk} = V^dag U^dag Z_k^j U V,
/// from a catalog third-level gate ("t_qubit", "t_qutrit", "toffoli") and a
/// pure stabilizer input phi = U|0...0>.
UnitaryEnsemble clifford_magic_dephasing(const std::string& gate_label,
                                         const PureState& stab_input);

// App-style fixed constructions
ComplexMatrix hoggar_unitary_u7();
ComplexMatrix hoggar_unitary_u12();
/// Clifford unitaries (mod phase) stabilizing the Strange state; 24 elements.
std::vector<ComplexMatrix> strange_stabilizer_cliffords();

}  // namespace resq
