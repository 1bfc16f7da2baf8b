#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drc/poly.hpp"
#include "drc/region.hpp"

namespace drc {

enum class SpecKind { reach_avoid, safety };

/// Control input set: an explicit finite list (enumeration order is
/// meaningful and preserved everywhere), or a bounded polytope {u : A u >= b}
/// carried with an explicit bounding box for gridding.
struct InputSet {
  enum class Kind { finite, box_polytope };

  Kind kind = Kind::finite;
  int dim = 0;
  std::vector<std::vector<double>> points;  // finite variant, listed order
  std::vector<std::vector<double>> A;       // polytope variant
  std::vector<double> b;
  Box bound;

  static InputSet finite(std::vector<std::vector<double>> pts);
  static InputSet box_polytope(std::vector<std::vector<double>> A,
                               std::vector<double> b, Box bounding);
  /// 1-D interval [lo, hi] as a polytope.
  static InputSet interval(double lo, double hi);

  bool contains(std::span<const double> u, double tol = 1e-9) const;
  /// Signed membership margin (>= 0 inside): min over constraint rows for a
  /// polytope, min coordinate slack for the finite variant's exact match.
  double margin(std::span<const double> u) const;
};

struct SystemModel {
  std::string name;
  int n = 0;  // state dim
  int m = 0;  // input dim
  int l = 0;  // disturbance dim
  InputSet inputs;
  Box disturbance_box;
  std::vector<Polynomial> dynamics;  // n polynomials over (x, u, w)
  int horizon = 1;
  Region init;
  Region safe;
  std::optional<Region> target;  // absent for pure safety problems

  std::vector<double> step(std::span<const double> x, std::span<const double> u,
                           std::span<const double> w) const;
};

SystemModel builtin_system(std::string_view name);

}  // namespace drc
