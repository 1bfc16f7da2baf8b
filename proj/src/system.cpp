#include "drc/system.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace drc {

InputSet InputSet::finite(std::vector<std::vector<double>> pts) {
  if (pts.empty()) throw std::invalid_argument("finite input set must be non-empty");
  InputSet s;
  s.kind = Kind::finite;
  s.dim = static_cast<int>(pts[0].size());
  for (const auto& p : pts)
    if (static_cast<int>(p.size()) != s.dim)
      throw std::invalid_argument("finite input set: inconsistent dimensions");
  s.points = std::move(pts);
  return s;
}

InputSet InputSet::box_polytope(std::vector<std::vector<double>> A,
                                std::vector<double> b, Box bounding) {
  if (A.size() != b.size()) throw std::invalid_argument("polytope A/b row mismatch");
  if (A.empty()) throw std::invalid_argument("polytope needs at least one row");
  InputSet s;
  s.kind = Kind::box_polytope;
  s.dim = static_cast<int>(A[0].size());
  s.A = std::move(A);
  s.b = std::move(b);
  s.bound = std::move(bounding);
  return s;
}

InputSet InputSet::interval(double lo, double hi) {
  return box_polytope({{1.0}, {-1.0}}, {lo, -hi}, Box{{lo}, {hi}});
}

double InputSet::margin(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim)
    throw std::invalid_argument("input membership dimension mismatch");
  if (kind == Kind::finite) {
    // distance-like margin: 0 when u matches a listed point exactly
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
      double worst = 0.0;
      for (int k = 0; k < dim; ++k) worst = std::max(worst, std::fabs(p[k] - u[k]));
      best = std::max(best, -worst);
    }
    return best;
  }
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < A.size(); ++r) {
    double s = -b[r];
    for (int k = 0; k < dim; ++k) s += A[r][k] * u[k];
    worst = std::min(worst, s);
  }
  return worst;
}

bool InputSet::contains(std::span<const double> u, double tol) const {
  return margin(u) >= -tol;
}

std::vector<double> SystemModel::step(std::span<const double> x,
                                      std::span<const double> u,
                                      std::span<const double> w) const {
  if (static_cast<int>(x.size()) != n || static_cast<int>(u.size()) != m ||
      static_cast<int>(w.size()) != l)
    throw std::invalid_argument("dynamics dimension mismatch");
  std::vector<double> pt;
  pt.reserve(n + m + l);
  pt.insert(pt.end(), x.begin(), x.end());
  pt.insert(pt.end(), u.begin(), u.end());
  pt.insert(pt.end(), w.begin(), w.end());
  std::vector<double> next(n);
  for (int k = 0; k < n; ++k) next[k] = dynamics[k].eval(pt);
  return next;
}

namespace {

// x+ = x + tau*(a_e (T_e - x) + a_h (T_h - x) u) + w,
// tau = 5, a_e = 8e-3, a_h = 3.6e-3, T_e = 15, T_h = 50
SystemModel room_temperature() {
  SystemModel s;
  s.name = "room_temperature";
  s.n = 1; s.m = 1; s.l = 1;
  s.inputs = InputSet::finite({{0.0}, {1.0}});  // "no heat" listed first
  s.disturbance_box = Box{{-0.12}, {0.12}};
  s.dynamics = {Polynomial(3, {{{1, 0, 0}, 0.96},
                               {{0, 0, 0}, 0.6},
                               {{0, 1, 0}, 0.9},
                               {{1, 1, 0}, -0.018},
                               {{0, 0, 1}, 1.0}})};
  s.horizon = 12;
  s.init = Region::make_box(Box{{23.6}, {23.8}});
  s.safe = Region::make_box(Box{{23.0}, {26.0}});
  s.target = Region::make_box(Box{{24.4}, {24.6}});
  return s;
}

SystemModel safety_1d() {
  SystemModel s;
  s.name = "safety_1d";
  s.n = 1; s.m = 1; s.l = 1;
  s.inputs = InputSet::interval(0.0, 2.0);
  s.disturbance_box = Box{{-4.0}, {1.0}};
  // x+ = x + 0.1 x^2 + u + w
  s.dynamics = {Polynomial(3, {{{1, 0, 0}, 1.0},
                               {{2, 0, 0}, 0.1},
                               {{0, 1, 0}, 1.0},
                               {{0, 0, 1}, 1.0}})};
  s.horizon = 40;
  s.init = Region::make_box(Box{{-0.5}, {0.0}});
  // S = {x >= -2}, unbounded above
  s.safe = Region::make_superlevel(poly_1d({{1, 1.0}, {0, 2.0}}));
  return s;
}

SystemModel safety_4d() {
  SystemModel s;
  s.name = "safety_4d";
  s.n = 4; s.m = 1; s.l = 1;
  s.inputs = InputSet::interval(-1.0, 1.0);
  s.disturbance_box = Box{{-0.8}, {0.8}};
  const double ts = 0.01;
  // variables (x1..x4, u, w)
  s.dynamics = {
      Polynomial(6, {{{1, 0, 0, 0, 0, 0}, 1.0 - ts},
                     {{0, 3, 0, 0, 0, 0}, ts},
                     {{0, 0, 1, 1, 0, 0}, -3.0 * ts},
                     {{0, 0, 0, 0, 1, 0}, ts},
                     {{0, 0, 0, 0, 0, 1}, ts}}),
      Polynomial(6, {{{0, 1, 0, 0, 0, 0}, 1.0},
                     {{1, 0, 0, 0, 0, 0}, -ts},
                     {{0, 3, 0, 0, 0, 0}, -ts}}),
      Polynomial(6, {{{0, 0, 1, 0, 0, 0}, 1.0 - ts},
                     {{1, 0, 0, 1, 0, 0}, ts}}),
      Polynomial(6, {{{0, 0, 0, 1, 0, 0}, 1.0},
                     {{1, 0, 1, 0, 0, 0}, ts},
                     {{0, 0, 0, 3, 0, 0}, -ts}})};
  s.horizon = 100;

  auto ball = [](double r2) {
    // r2 - |x|^2 >= 0
    std::vector<Term> ts4{{{0, 0, 0, 0}, r2}};
    for (int k = 0; k < 4; ++k) {
      std::vector<int> e(4, 0);
      e[k] = 2;
      ts4.push_back({e, -1.0});
    }
    return Polynomial(4, ts4);
  };
  s.init = Region::make_superlevel(ball(0.09), Box{{-0.3, -0.3, -0.3, -0.3},
                                                   {0.3, 0.3, 0.3, 0.3}});
  s.safe = Region::make_superlevel(ball(1.0), Box{{-1, -1, -1, -1}, {1, 1, 1, 1}});
  return s;
}

}  // namespace

SystemModel builtin_system(std::string_view name) {
  if (name == "room_temperature") return room_temperature();
  if (name == "safety_1d") return safety_1d();
  if (name == "safety_4d") return safety_4d();
  throw std::invalid_argument("unknown builtin system: " + std::string(name));
}

}  // namespace drc
