#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "drc/distribution.hpp"
#include "drc/system.hpp"

namespace drc {

/// Total function on states with values in [0,1] (stage value functions).
/// The certificate checker re-uses the same machinery with a wider range via
/// the value_range parameter of dual_value.
using StateValueFn = std::function<double(std::span<const double>)>;

struct SolverConfig {
  double lambda_tolerance = 1e-9;
  int disturbance_grid_initial = 65;  // points per disturbance dimension
  int refinement_rounds = 3;
  double refinement_shrink = 0.25;
  int input_grid = 9;  // points per input dimension for polytope input sets
  int workers = 1;
};

struct DualSolveResult {
  double value = 0.0;
  double lambda_star = 0.0;
  bool lambda_unbounded = false;  // theta = 0: reported multiplier is +infinity
  std::vector<double> u_star;
  // per nominal atom: inner minimizer w*_i and optimal l_i
  std::vector<std::pair<std::vector<double>, double>> inner_minimizers;
  int refinement_levels = 0;
};

/// Inner semi-infinite constraint for one atom at a fixed multiplier:
/// min over w in W of v(f(x,u,w)) + lambda * d(w, atom)^p, by coarse gridding
/// plus shrink-and-refine rounds around the incumbent minimizer.
std::pair<double, std::vector<double>> inner_inf(
    const StateValueFn& v, const SystemModel& model, std::span<const double> x,
    std::span<const double> u, double lambda, std::span<const double> atom, double p,
    const SolverConfig& cfg);

/// Worst-case expected next value over the Wasserstein ball, for a fixed
/// control. theta = 0 short-circuits to the nominal expectation. Otherwise
/// the concave dual g(lambda) = -lambda theta^p + sum_i p_i l_i(lambda) is
/// maximized by ternary search over [0, value_range / theta^p]; the
/// disturbance candidate set starts as a uniform grid plus the atoms
/// themselves and grows by refinement rounds around the per-atom minimizers.
/// Endpoints lambda = 0 and lambda = lambda_max are always candidates.
DualSolveResult dual_value(const StateValueFn& v, const SystemModel& model,
                           std::span<const double> x, std::span<const double> u,
                           const AmbiguitySet& amb, const SolverConfig& cfg,
                           double value_range = 1.0);

/// Same dual restricted to an explicit finite disturbance set (no grid
/// construction, no refinement). Used by the oracle comparisons and the
/// brute-force game, where both sides must see the identical W.
struct DiscreteDualResult {
  double value = 0.0;
  double lambda_star = 0.0;
  std::vector<double> l;       // per-atom inner values at lambda_star
  std::vector<int> argmin;     // per-atom index into the grid
};
DiscreteDualResult dual_value_discrete(const std::vector<std::vector<double>>& grid,
                                       const std::vector<double>& values,
                                       const NominalDistribution& nominal,
                                       double theta, double p, double lambda_tol,
                                       double value_range = 1.0);

/// Deterministic control enumeration: listed order for finite sets, row-major
/// inclusive grid intersected with {Au >= b} for polytopes. Throws when the
/// polytope grid comes up empty.
std::vector<std::vector<double>> enumerate_inputs(const InputSet& inputs,
                                                  int input_grid);

/// sup over enumerated controls of dual_value; ties keep the first (lowest
/// enumeration index) maximizer.
DualSolveResult robust_bellman(const StateValueFn& v, const SystemModel& model,
                               std::span<const double> x, const AmbiguitySet& amb,
                               const SolverConfig& cfg);

/// Per-input dual values in enumeration order (shared by the policy-table
/// recorder and the feasible-set query).
std::vector<DualSolveResult> dual_values_per_input(const StateValueFn& v,
                                                   const SystemModel& model,
                                                   std::span<const double> x,
                                                   const AmbiguitySet& amb,
                                                   const SolverConfig& cfg);

}  // namespace drc
