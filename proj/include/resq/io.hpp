#pragma once

#include <string>
#include <vector>

#include "resq/linalg.hpp"

namespace resq {

/// On-disk state: subsystem dims plus a nested [re, im] matrix.
struct StateFile {
  std::vector<Index> dims;
  ComplexMatrix matrix;

  DensityMatrix state() const { return DensityMatrix(matrix); }
};

std::string state_to_json(const ComplexMatrix& m,
                          const std::vector<Index>& dims);
StateFile state_from_json(const std::string& text);

void save_state(const std::string& path, const ComplexMatrix& m,
                const std::vector<Index>& dims);
StateFile load_state(const std::string& path);

/// Unitary lists share the state matrix encoding.
std::string ensemble_to_json(const std::vector<ComplexMatrix>& unitaries,
                             const RealVector& weights);
void ensemble_from_json(const std::string& text,
                        std::vector<ComplexMatrix>& unitaries,
                        RealVector& weights);

}  // namespace resq
