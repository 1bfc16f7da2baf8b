#pragma once

#include <vector>

#include "drc/distribution.hpp"

namespace drc {

struct WorstCaseResult {
  double value = 0.0;
  std::vector<double> marginal;  // worst-case mass on each grid point
  bool feasible = false;
};

/// Independent oracle for the inner adversarial problem on a fixed finite
/// disturbance grid: minimize sum_j mu_j v_j over transport plans k_ij >= 0
/// with sum_j k_ij = p_i and sum_ij k_ij d(w_j, what_i)^p <= theta^p.
/// Solved by exhaustive enumeration of basic feasible solutions (M equality
/// rows plus one slack-completed budget row), so it shares no code with the
/// dual path. Small instances only: M*K <= 40.
WorstCaseResult primal_worst_case(const std::vector<std::vector<double>>& grid_points,
                                  const std::vector<double>& grid_values,
                                  const NominalDistribution& nominal, double theta,
                                  double p);

}  // namespace drc
