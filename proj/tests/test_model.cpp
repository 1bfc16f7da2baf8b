#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "drc/system.hpp"

using namespace drc;

TEST_CASE("room model: pinned dynamics values and set geometry") {
  SystemModel m = builtin_system("room_temperature");
  CHECK(m.n == 1);
  CHECK(m.m == 1);
  CHECK(m.l == 1);
  CHECK(m.horizon == 12);
  CHECK(m.inputs.kind == InputSet::Kind::finite);
  REQUIRE(m.inputs.points.size() == 2);
  CHECK(m.inputs.points[0][0] == 0.0);
  CHECK(m.inputs.points[1][0] == 1.0);

  // hand-computed: 0.96*23.7 + 0.6 (+ 0.9 - 0.018*23.7 when heating)
  double x[1] = {23.7}, u0[1] = {0.0}, u1[1] = {1.0}, w0[1] = {0.0};
  CHECK(m.step(x, u0, w0)[0] == doctest::Approx(23.352).epsilon(1e-12));
  CHECK(m.step(x, u1, w0)[0] == doctest::Approx(23.8254).epsilon(1e-12));
  double wn[1] = {-0.05};
  CHECK(m.step(x, u0, wn)[0] == doctest::Approx(23.302).epsilon(1e-12));

  double in_target[1] = {24.5}, below[1] = {24.39};
  REQUIRE(m.target.has_value());
  CHECK(m.target->contains(in_target));
  CHECK_FALSE(m.target->contains(below));
  double cold[1] = {22.9};
  CHECK_FALSE(m.safe.contains(cold));
  double x0[1] = {23.65};
  CHECK(m.init.contains(x0));
}

TEST_CASE("scalar safety model: growth term and one-sided safe set") {
  SystemModel m = builtin_system("safety_1d");
  CHECK(m.horizon == 40);
  CHECK(m.inputs.kind == InputSet::Kind::box_polytope);
  double umid[1] = {1.0}, uout[1] = {2.5};
  CHECK(m.inputs.contains(umid));
  CHECK_FALSE(m.inputs.contains(uout));

  double x[1] = {2.0}, u[1] = {0.5}, w[1] = {-1.0};
  // x + 0.1 x^2 + u + w
  CHECK(m.step(x, u, w)[0] == doctest::Approx(2.0 + 0.4 + 0.5 - 1.0).epsilon(1e-12));

  // safe set is {x >= -2}: unbounded above, so divergence upward is safe
  double big[1] = {1e9}, bad[1] = {-2.1}, edge[1] = {-2.0};
  CHECK(m.safe.contains(big));
  CHECK(m.safe.contains(edge));
  CHECK_FALSE(m.safe.contains(bad));
  CHECK_FALSE(m.safe.bounding_box().has_value());
  CHECK_FALSE(m.target.has_value());
}

TEST_CASE("4-D model: dimensions and unit-ball safe set") {
  SystemModel m = builtin_system("safety_4d");
  CHECK(m.n == 4);
  CHECK(m.m == 1);
  CHECK(m.l == 1);
  CHECK(m.horizon == 100);

  double origin[4] = {0.0, 0.0, 0.0, 0.0};
  double out[4] = {0.8, 0.8, 0.0, 0.0};  // norm^2 = 1.28 > 1
  CHECK(m.safe.contains(origin));
  CHECK_FALSE(m.safe.contains(out));
  double x0[4] = {0.1, 0.1, 0.1, 0.1};  // norm^2 = 0.04 <= 0.09
  CHECK(m.init.contains(x0));
  double x1[4] = {0.3, 0.1, 0.0, 0.0};
  CHECK_FALSE(m.init.contains(x1));

  // Euler step leaves the origin fixed
  double u[1] = {0.0}, w[1] = {0.0};
  auto next = m.step(origin, u, w);
  for (double v : next) CHECK(v == 0.0);
}

TEST_CASE("unknown model name throws") {
  CHECK_THROWS_AS(builtin_system("no_such_model"), std::invalid_argument);
}
