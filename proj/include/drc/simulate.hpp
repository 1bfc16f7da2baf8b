#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "drc/certificates.hpp"
#include "drc/distribution.hpp"
#include "drc/grid.hpp"
#include "drc/system.hpp"

namespace drc {

/// How trial initial states are chosen: sampled uniformly from the initial
/// set, fixed to one configured state, or cycled through a deterministic
/// probe grid over the initial set.
enum class InitMode { uniform, fixed, grid };

struct SimulationConfig {
  int trials = 2000;
  std::uint64_t seed = 0;
  TrueDistribution dist;
  SpecKind kind = SpecKind::safety;
  InitMode init_mode = InitMode::uniform;
  std::vector<double> fixed_x0;
  double init_resolution = 0.01;  // probe spacing for InitMode::grid
  int workers = 1;
  bool log_trajectories = false;
  int max_init_attempts = 1000000;  // rejection cap for non-box initial sets
};

struct TrialLog {
  std::vector<std::vector<double>> states;  // x_0 .. x_k (stops when decided)
  bool success = false;
};

struct SimulationReport {
  int successes = 0;
  int trials = 0;
  double rate = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 1.0;
  std::vector<TrialLog> logs;  // filled only when log_trajectories
};

/// Policy source: a synthesized table (nearest-node lookup) or a certificate
/// candidate (its control polynomials evaluated at the state and clamped
/// into the input bounding box).
using PolicySource = std::variant<const PolicyTable*, const CertificateCandidate*>;

/// Seeded rollout estimate of the specification probability. Every trial
/// derives its own generator from (seed, trial index), so reports are
/// identical for any worker count. Rollouts stop as soon as the verdict is
/// decided: reach-avoid succeeds on first target entry (including x0) and
/// fails on leaving the safe set or exhausting the horizon; safety fails on
/// leaving the safe set and succeeds after surviving all of [0, T].
SimulationReport monte_carlo(const SystemModel& model, PolicySource source,
                             const SimulationConfig& sim);

/// Independent success scoring of a logged state path in indicator algebra
/// (sum over time of the target indicator times the running product of the
/// safe-not-target indicators for reach-avoid; plain product of safe
/// indicators for safety). Used to cross-check the rollout's early-exit
/// verdicts.
bool rescore_path(const SystemModel& model, SpecKind kind,
                  const std::vector<std::vector<double>>& states);

/// 95% Wilson score interval.
std::pair<double, double> wilson_interval(int successes, int trials);

}  // namespace drc
