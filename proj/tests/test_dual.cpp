#include <cmath>
#include <vector>

#include "doctest.h"
#include "drc/dual.hpp"
#include "drc/oracle_suite.hpp"

using namespace drc;

namespace {

// One-step scalar shift system x' = x + w (control is a spectator) so the
// continuous dual can be pointed at hand-picked value functions.
SystemModel shift_model(Box w_box) {
  SystemModel s;
  s.name = "shift";
  s.n = 1;
  s.m = 1;
  s.l = 1;
  s.inputs = InputSet::finite({{0.0}});
  s.disturbance_box = std::move(w_box);
  s.dynamics = {Polynomial(3, {Term{{1, 0, 0}, 1.0}, Term{{0, 0, 1}, 1.0}})};
  s.horizon = 1;
  s.init = Region::make_box(Box{{0.0}, {0.0}});
  s.safe = Region::make_box(Box{{-100.0}, {100.0}});
  return s;
}

const SolverConfig kTight = [] {
  SolverConfig c;
  c.lambda_tolerance = 1e-12;
  c.disturbance_grid_initial = 129;
  c.refinement_rounds = 4;
  return c;
}();

}  // namespace

TEST_CASE("discrete dual: hand-checkable two-point fixture") {
  // W = {0, 1}, v(0) = 1, v(1) = 0, nominal = point mass at 0, p = 1.
  // l(lambda) = min(1, lambda), g(lambda) = -lambda theta + min(1, lambda):
  // for theta < 1 the optimum sits at lambda = 1 with value 1 - theta.
  std::vector<std::vector<double>> grid{{0.0}, {1.0}};
  std::vector<double> values{1.0, 0.0};
  NominalDistribution nom{{{0.0}}, {1.0}};

  auto r = dual_value_discrete(grid, values, nom, 0.5, 1.0, 1e-12);
  CHECK(r.value == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.lambda_star == doctest::Approx(1.0).epsilon(1e-6));
  REQUIRE(r.l.size() == 1);
  // parts reassemble to the reported value
  CHECK(r.value ==
        doctest::Approx(-r.lambda_star * 0.5 + r.l[0]).epsilon(1e-12));
  // at the kink lambda = 1 both disturbances tie in the inner problem
  // (1 + 0 = 0 + lambda), so the recorded minimizer is either endpoint
  CHECK((r.argmin[0] == 0.0 || r.argmin[0] == 1.0));

  // radius beyond the support diameter: adversary reaches the grid minimum
  auto far = dual_value_discrete(grid, values, nom, 1.5, 1.0, 1e-12);
  CHECK(far.value == doctest::Approx(0.0).epsilon(1e-9));

  // theta = 0 collapses to the nominal expectation
  auto nomr = dual_value_discrete(grid, values, nom, 0.0, 1.0, 1e-12);
  CHECK(nomr.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("discrete dual: radius monotonicity on random fixtures") {
  const double thetas[] = {0.0, 0.01, 0.05, 0.1, 1.0};
  for (int f = 0; f < 20; ++f) {
    DualityFixture fx = random_duality_fixture(500 + f);
    double prev = 2.0;
    for (double th : thetas) {
      double v = dual_value_discrete(fx.grid, fx.values, fx.nominal, th, fx.p,
                                     1e-12)
                     .value;
      CHECK(v <= prev + 1e-8);
      prev = v;
    }
    // every radius value is bounded by [grid min, nominal expectation]
    double lo = 2.0, nominal = 0.0;
    for (double v : fx.values) lo = std::min(lo, v);
    for (int i = 0; i < fx.nominal.count(); ++i) {
      // atoms are grid points by construction
      for (std::size_t k = 0; k < fx.grid.size(); ++k)
        if (fx.grid[k] == fx.nominal.atoms[i])
          nominal += fx.nominal.probs[i] * fx.values[k];
    }
    double at_large =
        dual_value_discrete(fx.grid, fx.values, fx.nominal, 50.0, fx.p, 1e-12).value;
    CHECK(at_large == doctest::Approx(lo).epsilon(1e-9));
    double at_zero =
        dual_value_discrete(fx.grid, fx.values, fx.nominal, 0.0, fx.p, 1e-12).value;
    CHECK(at_zero == doctest::Approx(nominal).epsilon(1e-9));
  }
}

TEST_CASE("continuous dual on the shift system matches closed forms") {
  SystemModel m = shift_model(Box{{-1.0}, {1.0}});
  AmbiguitySet amb;
  amb.nominal = {{{0.0}}, {1.0}};
  amb.theta = 0.25;
  amb.p = 1.0;

  // v(x) = clamp(x+1)/2 on [-1,1]: linear slope 1/2 in w. Moving mass left
  // by t costs lambda t and gains t/2; optimum pushes to the radius:
  // value = v(-theta) = (1 - theta)/2.
  StateValueFn v = [](std::span<const double> x) {
    double t = (x[0] + 1.0) / 2.0;
    return std::min(1.0, std::max(0.0, t));
  };
  double x0[1] = {0.0}, u0[1] = {0.0};
  auto r = dual_value(v, m, x0, u0, amb, kTight);
  CHECK(r.value == doctest::Approx((1.0 - 0.25) / 2.0).epsilon(1e-6));
  CHECK_FALSE(r.lambda_unbounded);
  REQUIRE(r.inner_minimizers.size() == 1);
  // at the optimal multiplier the inner objective is flat on [-1, 0], so
  // only the sign of the minimizer is determined
  CHECK(r.inner_minimizers[0].first[0] <= 1e-6);
  CHECK(r.inner_minimizers[0].first[0] >= -1.0 - 1e-12);

  // theta = 0: nominal expectation v(0) = 1/2 and the unbounded flag
  amb.theta = 0.0;
  auto rz = dual_value(v, m, x0, u0, amb, kTight);
  CHECK(rz.value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rz.lambda_unbounded);
}

TEST_CASE("inner minimization honours the transport penalty") {
  SystemModel m = shift_model(Box{{-1.0}, {1.0}});
  // v(x) = x^2 scaled into [0,1]: minimum of v(x0 + w) + lambda |w - 0|
  // trades the quadratic well against the linear penalty
  StateValueFn v = [](std::span<const double> x) {
    return std::min(1.0, x[0] * x[0]);
  };
  double x0[1] = {0.5}, u0[1] = {0.0}, atom[1] = {0.0};

  // lambda = 0: free minimization, w* = -0.5 zeroes the square
  auto [v0, w0] = inner_inf(v, m, x0, u0, 0.0, atom, 1.0, kTight);
  CHECK(v0 == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(w0[0] == doctest::Approx(-0.5).epsilon(1e-4));

  // large lambda pins w to the atom: value v(0.5) = 0.25
  auto [vbig, wbig] = inner_inf(v, m, x0, u0, 50.0, atom, 1.0, kTight);
  CHECK(vbig == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(wbig[0] == doctest::Approx(0.0).epsilon(1e-6));

  // intermediate lambda: d/dw [ (0.5+w)^2 + lambda w ] = 0 at
  // w* = lambda/2 - 0.5 for w <= 0 branch, value = lambda/2 - lambda^2/4
  auto [vmid, wmid] = inner_inf(v, m, x0, u0, 0.5, atom, 1.0, kTight);
  CHECK(wmid[0] == doctest::Approx(-0.25).epsilon(1e-3));
  CHECK(vmid == doctest::Approx(0.25 * 0.25 + 0.5 * 0.25).epsilon(1e-6));
}

TEST_CASE("input enumeration: order, polytope gridding, empty intersection") {
  InputSet fin = InputSet::finite({{3.0}, {-1.0}, {0.0}});
  auto e = enumerate_inputs(fin, 9);
  REQUIRE(e.size() == 3);
  CHECK(e[0][0] == 3.0);  // listed order, not sorted
  CHECK(e[1][0] == -1.0);

  auto iv = enumerate_inputs(InputSet::interval(0.0, 2.0), 5);
  REQUIRE(iv.size() == 5);
  CHECK(iv[0][0] == doctest::Approx(0.0));
  CHECK(iv[2][0] == doctest::Approx(1.0));
  CHECK(iv[4][0] == doctest::Approx(2.0));

  // {u : -u >= 1} inside bound [0,2] is empty
  InputSet empty = InputSet::box_polytope({{-1.0}}, {1.0}, Box{{0.0}, {2.0}});
  CHECK_THROWS(enumerate_inputs(empty, 5));
}
