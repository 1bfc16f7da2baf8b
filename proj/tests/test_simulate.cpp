#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "drc/certificates.hpp"
#include "drc/rng.hpp"
#include "drc/simulate.hpp"
#include "drc/synthesis.hpp"

using namespace drc;

namespace {

// scalar x' = x + u + w over a lattice: states stay exactly on grid nodes,
// so the exact backward evaluation and the rollout estimator see the same
// Markov chain and can be compared statistically
SystemModel lattice_model(Region safe, std::optional<Region> target, int T) {
  SystemModel s;
  s.name = "lattice";
  s.n = 1;
  s.m = 1;
  s.l = 1;
  s.inputs = InputSet::finite({{-0.5}, {0.0}, {0.5}});
  s.disturbance_box = Box{{-0.5}, {0.5}};
  s.dynamics = {Polynomial(
      3, {Term{{1, 0, 0}, 1.0}, Term{{0, 1, 0}, 1.0}, Term{{0, 0, 1}, 1.0}})};
  s.horizon = T;
  s.init = Region::make_box(Box{{-1.0}, {1.0}});
  s.safe = std::move(safe);
  s.target = std::move(target);
  return s;
}

}  // namespace

TEST_CASE("rollout estimate matches the exact evaluation on lattice chains") {
  SplitRng master(2024);
  for (int fixture = 0; fixture < 10; ++fixture) {
    bool ra = fixture % 2 == 0;
    SystemModel m = lattice_model(
        Region::make_box(Box{{-3.0}, {3.0}}),
        ra ? std::optional<Region>(Region::make_box(Box{{1.5}, {3.0}}))
           : std::nullopt,
        3);
    StateGrid grid(Box{{-3.0}, {3.0}}, std::vector<int>{13});  // step 0.5

    // random policy over the lattice and a random 2-atom lattice disturbance
    PolicyTable pol(grid, 3, m.inputs.points);
    for (int t = 0; t < 3; ++t)
      for (std::size_t i = 0; i < grid.total(); ++i)
        pol.choice_at(t, i) = static_cast<int>(master.next_u64() % 3);
    double q = master.uniform(0.2, 0.8);
    NominalDistribution dist{{{-0.5}, {0.5}}, {q, 1.0 - q}};

    SpecKind kind = ra ? SpecKind::reach_avoid : SpecKind::safety;
    ValueGrid exact = evaluate_fixed_distribution(m, pol, dist, grid, kind);

    SimulationConfig sim;
    sim.trials = 4000;
    sim.seed = 600 + static_cast<std::uint64_t>(fixture);
    sim.kind = kind;
    sim.init_mode = InitMode::fixed;
    sim.fixed_x0 = {0.5};
    sim.dist = TrueDistribution::finite_support(dist);
    SimulationReport rep = monte_carlo(m, &pol, sim);

    double truth = exact.at(0, grid.nearest(sim.fixed_x0));
    double half = (rep.wilson_hi - rep.wilson_lo) / 2.0;
    INFO("fixture " << fixture << ": exact " << truth << " est " << rep.rate);
    CHECK(std::abs(rep.rate - truth) <= 3.0 * half + 1e-9);
  }
}

TEST_CASE("independent path rescoring agrees with the rollout verdicts") {
  SystemModel m = builtin_system("safety_1d");
  CertificateCandidate cand = builtin_certificate("v_bar_1");

  SimulationConfig sim;
  sim.trials = 500;
  sim.seed = 4;
  sim.kind = SpecKind::safety;
  sim.dist = TrueDistribution::truncated_gaussian({0.0}, {2.0}, m.disturbance_box);
  sim.log_trajectories = true;
  SimulationReport rep = monte_carlo(m, &cand, sim);

  REQUIRE(rep.logs.size() == 500);
  int successes = 0;
  for (const TrialLog& log : rep.logs) {
    REQUIRE(!log.states.empty());
    CHECK(rescore_path(m, SpecKind::safety, log.states) == log.success);
    successes += log.success;
  }
  CHECK(successes == rep.successes);
  // both verdicts exist in this regime (rate is around 0.95)
  CHECK(rep.successes > 400);
  CHECK(rep.successes < 500);
}

TEST_CASE("reach-avoid rescoring: early target entry wins, escape loses") {
  SystemModel m = lattice_model(Region::make_box(Box{{-3.0}, {3.0}}),
                                Region::make_box(Box{{1.5}, {3.0}}), 3);
  // reach at step 2, then wander off: still a success
  CHECK(rescore_path(m, SpecKind::reach_avoid,
                     {{0.0}, {1.0}, {2.0}, {-9.0}}));
  // leave the safe set before reaching: failure
  CHECK_FALSE(rescore_path(m, SpecKind::reach_avoid,
                           {{0.0}, {-3.5}, {2.0}, {2.0}}));
  // survive without reaching: reach-avoid fails, safety succeeds
  CHECK_FALSE(rescore_path(m, SpecKind::reach_avoid,
                           {{0.0}, {0.5}, {0.0}, {0.5}}));
  CHECK(rescore_path(m, SpecKind::safety, {{0.0}, {0.5}, {0.0}, {0.5}}));
  // starting inside the target counts immediately
  CHECK(rescore_path(m, SpecKind::reach_avoid, {{2.0}}));
}

TEST_CASE("initial-state modes: fixed point and cycled probe grid") {
  // deterministic drift +0.5 per step (u = 0.5, w = 0), safe box [-3, 2]:
  // a start x0 fails within T = 3 steps exactly when x0 > 0.5
  SystemModel m = lattice_model(Region::make_box(Box{{-3.0}, {2.0}}),
                                std::nullopt, 3);
  StateGrid grid(Box{{-3.0}, {3.0}}, std::vector<int>{13});
  PolicyTable pol(grid, 3, {{0.5}});
  NominalDistribution point{{{0.0}}, {1.0}};

  SimulationConfig sim;
  sim.trials = 10;
  sim.seed = 1;
  sim.kind = SpecKind::safety;
  sim.dist = TrueDistribution::finite_support(point);

  sim.init_mode = InitMode::fixed;
  sim.fixed_x0 = {0.0};
  CHECK(monte_carlo(m, &pol, sim).rate == 1.0);
  sim.fixed_x0 = {1.0};
  CHECK(monte_carlo(m, &pol, sim).rate == 0.0);
  sim.fixed_x0 = {0.0, 0.0};  // wrong dimension
  CHECK_THROWS_AS(monte_carlo(m, &pol, sim), std::invalid_argument);

  // probes -1, -0.5, 0, 0.5, 1 cycled over 10 trials: only x0 = 1 fails
  sim.init_mode = InitMode::grid;
  sim.fixed_x0.clear();
  sim.init_resolution = 0.5;
  SimulationReport rep = monte_carlo(m, &pol, sim);
  CHECK(rep.successes == 8);
  CHECK(rep.rate == doctest::Approx(0.8));
}

TEST_CASE("reports are identical for any worker count") {
  SystemModel m = builtin_system("safety_1d");
  CertificateCandidate cand = builtin_certificate("v_bar_1");
  SimulationConfig sim;
  sim.trials = 600;
  sim.seed = 9;
  sim.kind = SpecKind::safety;
  sim.dist = TrueDistribution::truncated_gaussian({0.0}, {2.0}, m.disturbance_box);

  sim.workers = 1;
  SimulationReport one = monte_carlo(m, &cand, sim);
  sim.workers = 4;
  SimulationReport four = monte_carlo(m, &cand, sim);
  CHECK(one.successes == four.successes);
  CHECK(one.rate == four.rate);
}

TEST_CASE("Wilson interval: hand values, degenerate counts, coverage shape") {
  auto [lo, hi] = wilson_interval(8, 10);
  CHECK(lo == doctest::Approx(0.4902).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.9433).epsilon(1e-3));

  auto [lz, hz] = wilson_interval(0, 10);
  CHECK(lz == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(hz == doctest::Approx(0.27753).epsilon(1e-3));

  auto [lf, hf] = wilson_interval(10, 10);
  CHECK(lf == doctest::Approx(0.72246).epsilon(1e-3));
  CHECK(hf >= 0.999);

  // interval shrinks with the sample size
  auto [l1, h1] = wilson_interval(80, 100);
  auto [l2, h2] = wilson_interval(800, 1000);
  CHECK(h2 - l2 < h1 - l1);
}
