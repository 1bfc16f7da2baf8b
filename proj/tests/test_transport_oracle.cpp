#include <cmath>
#include <vector>

#include "doctest.h"
#include "drc/oracle_suite.hpp"
#include "drc/transport_lp.hpp"

using namespace drc;

TEST_CASE("enumeration LP: hand-checkable worst cases") {
  // two points distance 1 apart, nominal on the good one
  std::vector<std::vector<double>> grid{{0.0}, {1.0}};
  std::vector<double> values{1.0, 0.0};
  NominalDistribution nom{{{0.0}}, {1.0}};

  // budget theta: exactly theta mass can move to the bad point (p = 1)
  auto r = primal_worst_case(grid, values, nom, 0.3, 1.0);
  REQUIRE(r.feasible);
  CHECK(r.value == doctest::Approx(0.7).epsilon(1e-12));
  REQUIRE(r.marginal.size() == 2);
  CHECK(r.marginal[0] == doctest::Approx(0.7));
  CHECK(r.marginal[1] == doctest::Approx(0.3));

  // p = 2: the same move costs theta^2 = d^2 * mass, so mass = theta^2
  auto r2 = primal_worst_case(grid, values, nom, 0.3, 2.0);
  CHECK(r2.value == doctest::Approx(1.0 - 0.09).epsilon(1e-12));

  // zero radius pins the nominal
  auto r0 = primal_worst_case(grid, values, nom, 0.0, 1.0);
  CHECK(r0.value == doctest::Approx(1.0).epsilon(1e-12));

  // radius past the diameter: everything lands on the minimum
  auto rf = primal_worst_case(grid, values, nom, 2.0, 1.0);
  CHECK(rf.value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("enumeration LP: two-atom budget split") {
  // atoms at 0 and 3 (probs 1/2), values dip at 1: the adversary should
  // spend the whole budget moving the cheap atom's mass to the dip
  std::vector<std::vector<double>> grid{{0.0}, {1.0}, {3.0}};
  std::vector<double> values{0.8, 0.0, 0.9};
  NominalDistribution nom{{{0.0}, {3.0}}, {0.5, 0.5}};

  // moving z of atom-0's mass to w=1 costs z; budget 0.25 -> z = 0.25:
  // value = (0.5-0.25)*0.8 + 0.25*0 + 0.5*0.9
  auto r = primal_worst_case(grid, values, nom, 0.25, 1.0);
  REQUIRE(r.feasible);
  CHECK(r.value == doctest::Approx(0.25 * 0.8 + 0.45).epsilon(1e-9));

  CHECK_THROWS(primal_worst_case(
      std::vector<std::vector<double>>(11, {0.0}), std::vector<double>(11, 0.0),
      NominalDistribution{{{0.0}, {1.0}, {2.0}, {3.0}}, {0.25, 0.25, 0.25, 0.25}},
      0.1, 1.0));  // 4 * 11 > 40: enumeration refuses oversized instances
}

TEST_CASE("dual equals the primal oracle across random fixtures") {
  SuiteReport rep = duality_suite(150, 1e-6);
  CHECK(rep.pass);
  CHECK(rep.checked == 150);
  CHECK(rep.worst < 1e-9);  // observed gaps are solver-precision, not 1e-6
}

TEST_CASE("fixture generator keeps atoms on the grid and instances small") {
  for (std::uint64_t i = 0; i < 40; ++i) {
    DualityFixture fx = random_duality_fixture(i);
    CHECK(fx.grid.size() >= 2);
    CHECK(fx.grid.size() <= 5);
    CHECK(fx.nominal.count() * static_cast<int>(fx.grid.size()) <= 40);
    CHECK_NOTHROW(fx.nominal.validate());
    for (const auto& a : fx.nominal.atoms) {
      bool on_grid = false;
      for (const auto& g : fx.grid) on_grid = on_grid || g == a;
      CHECK(on_grid);
    }
    for (double v : fx.values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    if (i % 10 == 0) CHECK(fx.theta == 0.0);
  }
}
