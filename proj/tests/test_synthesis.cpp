#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "drc/rng.hpp"
#include "drc/synthesis.hpp"

using namespace drc;

namespace {

// scalar x' = x + u + w with inputs {-1, 0, +1} and W = [-r, r]
SystemModel walk_model(double r, int horizon, Region safe,
                       std::optional<Region> target) {
  SystemModel s;
  s.name = "walk";
  s.n = 1;
  s.m = 1;
  s.l = 1;
  s.inputs = InputSet::finite({{-1.0}, {0.0}, {1.0}});
  s.disturbance_box = Box{{-r}, {r}};
  s.dynamics = {Polynomial(
      3, {Term{{1, 0, 0}, 1.0}, Term{{0, 1, 0}, 1.0}, Term{{0, 0, 1}, 1.0}})};
  s.horizon = horizon;
  s.init = Region::make_box(Box{{0.0}, {0.0}});
  s.safe = std::move(safe);
  s.target = std::move(target);
  return s;
}

AmbiguitySet point_nominal(double w, double theta, double p) {
  AmbiguitySet a;
  a.nominal = {{{w}}, {1.0}};
  a.theta = theta;
  a.p = p;
  return a;
}

SolverConfig quick_solver() {
  SolverConfig c;
  c.disturbance_grid_initial = 17;
  c.refinement_rounds = 2;
  c.lambda_tolerance = 1e-11;
  return c;
}

}  // namespace

TEST_CASE("terminal stage is the exact indicator") {
  SystemModel m = walk_model(0.1, 2, Region::make_box(Box{{-4.0}, {4.0}}),
                             Region::make_box(Box{{1.0}, {2.0}}));
  StateGrid grid(Box{{-4.0}, {4.0}}, std::vector<int>{17});
  auto res = value_iteration(m, point_nominal(0.0, 0.0, 1.0), grid, quick_solver(),
                             SpecKind::reach_avoid);
  for (std::size_t i = 0; i < grid.total(); ++i) {
    auto x = res.values.grid.node(i);
    double expect = m.target->contains(x) ? 1.0 : 0.0;
    CHECK(res.values.at(2, i) == expect);
  }

  auto saf = value_iteration(m, point_nominal(0.0, 0.0, 1.0), grid, quick_solver(),
                             SpecKind::safety);
  for (std::size_t i = 0; i < grid.total(); ++i) CHECK(saf.values.at(2, i) == 1.0);
}

TEST_CASE("inescapable safe set keeps safety value 1") {
  // |x'| <= |x| + 1 + 0.1 stays inside [-20, 20] for |x| <= 5 and T = 3,
  // so every stage value must be exactly 1 regardless of the ambiguity
  SystemModel m = walk_model(0.1, 3, Region::make_box(Box{{-20.0}, {20.0}}),
                             std::nullopt);
  StateGrid grid(Box{{-5.0}, {5.0}}, std::vector<int>{21});
  auto res = value_iteration(m, point_nominal(0.05, 0.5, 1.0), grid, quick_solver(),
                             SpecKind::safety);
  for (int t = 0; t <= 3; ++t)
    for (std::size_t i = 0; i < grid.total(); ++i)
      CHECK(res.values.at(t, i) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("one-step sure reach sets value 1 and picks the reaching input") {
  // target [0.9, 2.1] wide enough to absorb W = [-0.1, 0.1] after u = +1
  SystemModel m = walk_model(0.1, 1, Region::make_box(Box{{-4.0}, {4.0}}),
                             Region::make_box(Box{{0.9}, {2.1}}));
  StateGrid grid(Box{{-0.5}, {0.5}}, std::vector<int>{11});
  // adversary has real power (theta past the disturbance diameter) yet
  // cannot push the landing out of the fat target
  auto res = value_iteration(m, point_nominal(0.0, 1.0, 1.0), grid, quick_solver(),
                             SpecKind::reach_avoid);
  for (std::size_t i = 0; i < grid.total(); ++i) {
    double x = res.values.grid.node(i)[0];
    if (x >= -0.1 + 1e-9 && x <= 0.1 - 1e-9) {
      CHECK(res.values.at(0, i) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(res.policy.input_at(0, i)[0] == 1.0);
    }
  }
}

TEST_CASE("policy choices are sound against the recorded q-values") {
  SystemModel m = walk_model(0.25, 3, Region::make_box(Box{{-3.0}, {3.0}}),
                             Region::make_box(Box{{1.5}, {3.0}}));
  StateGrid grid(Box{{-3.0}, {3.0}}, std::vector<int>{25});
  AmbiguitySet amb = point_nominal(0.0, 0.1, 1.0);
  SolverConfig cfg = quick_solver();
  auto res = value_iteration(m, amb, grid, cfg, SpecKind::reach_avoid, true);
  REQUIRE(res.q.has_value());
  const QTable& q = *res.q;
  REQUIRE(q.inputs.size() == 3);

  for (int t = 0; t < 3; ++t)
    for (std::size_t i = 0; i < grid.total(); ++i) {
      auto x = grid.node(i);
      if (m.target->contains(x) || !m.safe.contains(x)) continue;
      int c = res.policy.choice_at(t, i);
      double best = q.at(t, i, 0);
      int first_argmax = 0;
      for (std::size_t j = 1; j < q.inputs.size(); ++j)
        if (q.at(t, i, j) > best) {
          best = q.at(t, i, j);
          first_argmax = static_cast<int>(j);
        }
      CHECK(c == first_argmax);
      // stored value is the clamped best (clamping may shave <= 1e-9)
      CHECK(res.values.at(t, i) == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("feasible set matches the q-table threshold and orders inputs") {
  SystemModel m = walk_model(0.25, 2, Region::make_box(Box{{-3.0}, {3.0}}),
                             Region::make_box(Box{{1.5}, {3.0}}));
  StateGrid grid(Box{{-3.0}, {3.0}}, std::vector<int>{13});
  AmbiguitySet amb = point_nominal(0.0, 0.05, 1.0);
  SolverConfig cfg = quick_solver();
  auto res = value_iteration(m, amb, grid, cfg, SpecKind::reach_avoid, true);

  SplitRng rng(77);
  int nonempty = 0;
  for (int trial = 0; trial < 30; ++trial) {
    double x[1] = {rng.uniform(-2.9, 2.9)};
    int t = static_cast<int>(rng.next_u64() % 2);
    double alpha = rng.uniform(0.05, 0.95);
    auto feas = feasible_controls(m, amb, res.values, t, x, alpha, cfg);
    nonempty += !feas.empty();
    // members are a subsequence of the enumeration and meet the threshold
    std::size_t cursor = 0;
    for (const auto& u : feas) {
      while (cursor < m.inputs.points.size() && m.inputs.points[cursor] != u)
        ++cursor;
      REQUIRE(cursor < m.inputs.points.size());
      ++cursor;
      double uu[1] = {u[0]};
      StateValueFn next = [&](std::span<const double> y) {
        return query_value(res.values, t + 1, y);
      };
      double v = dual_value(next, m, x, uu, amb, cfg).value;
      CHECK(v >= alpha - 1e-9);
    }
  }
  CHECK(nonempty > 0);
}

TEST_CASE("applied-policy derivation: threshold, argmax, tie fallback") {
  StateGrid grid(Box{{0.0}, {1.0}}, std::vector<int>{2});
  QTable q;
  q.grid = grid;
  q.horizon = 1;
  q.inputs = {{0.0}, {1.0}, {2.0}};
  q.values.assign(1 * 2 * 3, 0.0);
  // node 0: values {0.4, 0.8, 0.9} -> first above alpha=0.75 is input 1
  q.at(0, 0, 0) = 0.4;
  q.at(0, 0, 1) = 0.8;
  q.at(0, 0, 2) = 0.9;
  // node 1: exact tie {0.3, 0.3, 0.3} -> fallback decides
  q.at(0, 1, 0) = 0.3;
  q.at(0, 1, 1) = 0.3;
  q.at(0, 1, 2) = 0.3;

  PolicyTable fallback(grid, 1, q.inputs);
  fallback.choice_at(0, 0) = 2;
  fallback.choice_at(0, 1) = 2;

  PolicyTable ap = derive_applied_policy(q, 0.75, &fallback);
  CHECK(ap.choice_at(0, 0) == 1);  // first threshold-feasible, not argmax
  CHECK(ap.choice_at(0, 1) == 2);  // tie defers to fallback

  PolicyTable bare = derive_applied_policy(q, 0.75, nullptr);
  CHECK(bare.choice_at(0, 1) == 0);  // tie without fallback: first input

  // nothing feasible and values not identical: first argmax
  PolicyTable am = derive_applied_policy(q, 0.95, nullptr);
  CHECK(am.choice_at(0, 0) == 2);
}

TEST_CASE("values stay in the unit interval across a contested synthesis") {
  SystemModel m = walk_model(0.5, 4, Region::make_box(Box{{-2.0}, {2.0}}),
                             Region::make_box(Box{{1.0}, {2.0}}));
  StateGrid grid(Box{{-2.0}, {2.0}}, std::vector<int>{33});
  auto res = value_iteration(m, point_nominal(-0.1, 0.2, 2.0), grid, quick_solver(),
                             SpecKind::reach_avoid);
  for (double v : res.values.stages) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("fixed-distribution evaluation: hand-checkable one-step case") {
  // policy forced to u = 0, dist = {-0.1 w.p. 0.5, +0.1 w.p. 0.5},
  // target [0.055, 4]: only the +0.1 branch can reach, iff x >= -0.045.
  // The boundary 0.055 sits half a step away from every node+atom sum, so
  // each branch is decisive despite the interpolated terminal stage.
  SystemModel m = walk_model(0.1, 1, Region::make_box(Box{{-4.0}, {4.0}}),
                             Region::make_box(Box{{0.055}, {4.0}}));
  m.inputs = InputSet::finite({{0.0}});
  StateGrid grid(Box{{-0.5}, {0.5}}, std::vector<int>{101});
  PolicyTable pol(grid, 1, {{0.0}});
  NominalDistribution dist{{{-0.1}, {0.1}}, {0.5, 0.5}};

  ValueGrid ev = evaluate_fixed_distribution(m, pol, dist, grid,
                                             SpecKind::reach_avoid);
  for (std::size_t i = 0; i < grid.total(); ++i) {
    double x = grid.node(i)[0];
    double expect;
    if (x >= 0.055)
      expect = 1.0;  // already in the target
    else if (x >= -0.045)
      expect = 0.5;
    else
      expect = 0.0;
    CHECK(ev.at(0, i) == doctest::Approx(expect).epsilon(1e-10));
  }

  auto [mn, at] = min_over_initial(ev, m, 0.25);
  CHECK(mn == doctest::Approx(ev.at(0, grid.nearest(std::vector<double>{0.0}))));
}

TEST_CASE("argument validation: stages, horizons and dimensions") {
  SystemModel m = walk_model(0.1, 2, Region::make_box(Box{{-4.0}, {4.0}}),
                             Region::make_box(Box{{1.0}, {2.0}}));
  StateGrid grid(Box{{-1.0}, {1.0}}, std::vector<int>{5});
  AmbiguitySet amb = point_nominal(0.0, 0.0, 1.0);
  auto res = value_iteration(m, amb, grid, quick_solver(), SpecKind::reach_avoid);

  double x[1] = {0.0};
  CHECK_THROWS_AS(
      feasible_controls(m, amb, res.values, 2, x, 0.5, quick_solver()),
      std::out_of_range);  // t == horizon has no next stage
  CHECK_THROWS_AS(
      feasible_controls(m, amb, res.values, -1, x, 0.5, quick_solver()),
      std::out_of_range);

  // a policy over a different horizon cannot be evaluated against this model
  PolicyTable wrong(grid, 7, {{0.0}});
  CHECK_THROWS_AS(evaluate_fixed_distribution(m, wrong, amb.nominal, grid,
                                              SpecKind::reach_avoid),
                  std::invalid_argument);

  // reach-avoid synthesis without a target region is rejected
  SystemModel no_target = m;
  no_target.target.reset();
  CHECK_THROWS_AS(value_iteration(no_target, amb, grid, quick_solver(),
                                  SpecKind::reach_avoid),
                  std::invalid_argument);

  // 2-D disturbance atoms against a scalar-disturbance model
  NominalDistribution bad_dim{{{0.0, 0.0}}, {1.0}};
  CHECK_THROWS_AS(evaluate_fixed_distribution(m, res.policy, bad_dim, grid,
                                              SpecKind::reach_avoid),
                  std::invalid_argument);
}
