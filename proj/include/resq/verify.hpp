#pragma once

#include <string>
#include <vector>

namespace resq {

struct CheckResult {
  int criterion = 0;  // acceptance criterion the check belongs to
  std::string name;
  bool pass = false;
  double observed = 0.0;   // deviation or quantity of interest
  double tolerance = 0.0;  // bound it is held against
  std::string note;
};

/// suites: props | bounds | isotropic | twirl | all
std::vector<CheckResult> run_checks(const std::string& suite);

}  // namespace resq
