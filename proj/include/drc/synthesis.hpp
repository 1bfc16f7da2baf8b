#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "drc/distribution.hpp"
#include "drc/dual.hpp"
#include "drc/grid.hpp"
#include "drc/system.hpp"

namespace drc {

/// Per-(stage, node, input) robust values recorded during synthesis; used to
/// derive threshold-based applied policies and feasibility diagnostics
/// without re-solving.
struct QTable {
  StateGrid grid;
  int horizon = 0;
  std::vector<std::vector<double>> inputs;
  std::vector<double> values;  // horizon * total * inputs.size()

  double at(int t, std::size_t node, std::size_t j) const {
    return values[(static_cast<std::size_t>(t) * grid.total() + node) *
                      inputs.size() +
                  j];
  }
  double& at(int t, std::size_t node, std::size_t j) {
    return values[(static_cast<std::size_t>(t) * grid.total() + node) *
                      inputs.size() +
                  j];
  }
};

struct SynthesisResult {
  ValueGrid values;
  PolicyTable policy;
  std::optional<QTable> q;
};

/// Backward DP over the grid. Terminal stage is the exact indicator (target
/// for reach-avoid, safe set for safety); interior stages take the robust
/// Bellman value per node with the next stage queried through interpolation.
/// Nodes inside the target get value 1 and nodes outside the safe set get 0,
/// both with the first-listed input. Deterministic for any worker count.
SynthesisResult value_iteration(const SystemModel& model, const AmbiguitySet& amb,
                                const StateGrid& grid, const SolverConfig& cfg,
                                SpecKind kind, bool record_q = false,
                                InterpMode interp = InterpMode::multilinear);

/// All enumerated inputs whose robust value at (x, t) against stage t+1
/// meets the threshold; enumeration order. Empty means infeasible here.
std::vector<std::vector<double>> feasible_controls(const SystemModel& model,
                                                   const AmbiguitySet& amb,
                                                   const ValueGrid& vg, int t,
                                                   std::span<const double> x,
                                                   double alpha,
                                                   const SolverConfig& cfg);

/// Exact backward evaluation of a fixed policy under a known finite-support
/// disturbance distribution (expectations are exact sums over atoms).
ValueGrid evaluate_fixed_distribution(const SystemModel& model,
                                      const PolicyTable& policy,
                                      const NominalDistribution& dist,
                                      const StateGrid& grid, SpecKind kind,
                                      InterpMode interp = InterpMode::multilinear);

/// Minimum of the stage-0 value over a probe grid of the initial set at the
/// given spacing (inclusive endpoints; superlevel initial sets probe their
/// bounding box and keep members). Returns the min and its probe point.
std::pair<double, std::vector<double>> min_over_initial(const ValueGrid& vg,
                                                        const SystemModel& model,
                                                        double resolution);

/// Threshold-based applied policy: per (stage, node) pick the first input
/// whose recorded value meets alpha; if none qualifies and the values are
/// not all identical, the argmax (first maximizer); on an exact tie defer to
/// the fallback policy's choice (first input when absent). The fallback is
/// typically the non-robust applied policy so that states the robust program
/// scores as indistinguishable inherit a sensible action.
PolicyTable derive_applied_policy(const QTable& q, double alpha,
                                  const PolicyTable* fallback = nullptr);

}  // namespace drc
