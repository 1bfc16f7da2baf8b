#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drc/distribution.hpp"
#include "drc/dual.hpp"
#include "drc/grid.hpp"
#include "drc/system.hpp"

namespace drc {

/// Random discretized instance of the inner adversarial problem, sized for
/// the enumeration LP: 1-D, 2..5 grid points, 1..3 nominal atoms placed on
/// grid points, values in [0,1]. Every 10th fixture forces theta = 0 and
/// every 10th+1 forces theta past the grid diameter, so both degenerate
/// branches stay covered.
struct DualityFixture {
  std::vector<std::vector<double>> grid;
  std::vector<double> values;
  NominalDistribution nominal;
  double theta = 0.0;
  double p = 1.0;
};

DualityFixture random_duality_fixture(std::uint64_t index);

struct DualityCheck {
  double dual = 0.0;
  double primal = 0.0;
  double gap = 0.0;
};

/// Discrete dual against the transport-LP oracle on one fixture. The two
/// sides share no solver code.
DualityCheck duality_check(const DualityFixture& fx);

struct SuiteReport {
  int checked = 0;
  double worst = 0.0;  // largest |gap| / |difference| observed
  std::string worst_detail;
  bool pass = false;
};

SuiteReport duality_suite(int count, double tol);

/// Fully finite synthetic game: integer states {0..4} on a 5-node grid,
/// inputs {-1,0,1}, disturbance grid {-1,0,1}, dynamics x+u+w (landings
/// resolved exactly like the DP's off-grid queries), horizon 3. The solver
/// is pinned to the same 3-point disturbance grid with no refinement, so
/// the exhaustive game tree and value_iteration play the identical game.
struct GameInstance {
  SystemModel model;
  StateGrid grid;
  AmbiguitySet amb;
  SolverConfig solver;
  SpecKind kind = SpecKind::reach_avoid;
  std::vector<std::vector<double>> wgrid;
};

/// atoms_variant: 0 = single atom at 0, 1 = {-1,+1} at 1/2 each,
/// 2 = {-1,0} at (0.3, 0.7). target_variant (reach-avoid only): 0 = [2,2],
/// 1 = the enclosing [1,3].
GameInstance make_game_instance(SpecKind kind, double theta, double p,
                                int atoms_variant, int target_variant = 0);

/// Exhaustive minimax values, [stage][node], computed by recursive game-tree
/// expansion with primal_worst_case as the adversary at every (stage, node,
/// input). Independent of the dual/DP code path.
std::vector<std::vector<double>> exhaustive_game_values(const GameInstance& inst);

/// Compares value_iteration with the game tree at every (stage, node) across
/// a built-in matrix of theta/p/atom variants for both specification kinds,
/// then checks that enlarging the target never decreases any reach-avoid
/// value (reported as a negative "gap" when violated).
SuiteReport game_suite(double tol);

}  // namespace drc
