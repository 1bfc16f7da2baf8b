#pragma once

#include <optional>
#include <span>
#include <vector>

#include "drc/poly.hpp"

namespace drc {

struct Box {
  std::vector<double> lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(std::span<const double> x) const;
  double side(int k) const { return hi[k] - lo[k]; }
  /// Euclidean diameter.
  double diameter() const;
};

/// Closed region: axis-aligned box, or super-level set {x : s(x) >= 0} of a
/// polynomial. Super-level regions may be unbounded; operations that need a
/// bounded range use `bound` when present or take an explicit box.
struct Region {
  enum class Kind { box, superlevel };

  Kind kind = Kind::box;
  int arity = 0;
  Box box;                    // kind == box
  Polynomial level;           // kind == superlevel
  std::optional<Box> bound;   // optional bounding box (sampling / probing)

  static Region make_box(Box b);
  static Region make_superlevel(Polynomial s, std::optional<Box> bounding = {});

  bool contains(std::span<const double> x) const;
  /// Bounding box if one is known (exact for boxes).
  std::optional<Box> bounding_box() const;
};

/// Inclusive per-dimension linspace, cartesian product in row-major order
/// (last dimension fastest). pts_per_dim == 1 yields the box center.
std::vector<std::vector<double>> box_grid(const Box& b, int pts_per_dim);

}  // namespace drc
