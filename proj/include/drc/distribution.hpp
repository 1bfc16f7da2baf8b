#pragma once

#include <span>
#include <vector>

#include "drc/region.hpp"
#include "drc/rng.hpp"

namespace drc {

/// Finite-support distribution: atoms with strictly positive weights summing
/// to one, pairwise distinct support points.
struct NominalDistribution {
  std::vector<std::vector<double>> atoms;
  std::vector<double> probs;

  int count() const { return static_cast<int>(atoms.size()); }
  int dim() const { return atoms.empty() ? 0 : static_cast<int>(atoms[0].size()); }
  /// Validates the invariants (weights sum to 1 within 1e-12, atoms distinct,
  /// optionally inside a box). Throws on violation.
  void validate(const Box* inside = nullptr) const;
  std::vector<double> mean() const;
};

/// Wasserstein ball parameters around a finite-support nominal. Ground metric
/// is Euclidean.
struct AmbiguitySet {
  NominalDistribution nominal;
  double theta = 0.0;
  double p = 1.0;

  void validate() const;
};

struct TrueDistribution {
  enum class Kind { uniform_box, truncated_gaussian, finite_support };

  Kind kind = Kind::uniform_box;
  Box box;                       // uniform_box / truncation window
  std::vector<double> mean, std; // truncated_gaussian
  NominalDistribution finite;    // finite_support

  static TrueDistribution uniform(Box b);
  static TrueDistribution truncated_gaussian(std::vector<double> mean,
                                             std::vector<double> std, Box b);
  static TrueDistribution finite_support(NominalDistribution d);

  int dim() const;
  std::vector<double> sample(SplitRng& rng) const;
};

/// Distinct sample values become atoms with frequency weights; atom order is
/// first occurrence.
NominalDistribution empirical_nominal(const std::vector<std::vector<double>>& samples,
                                      const Box& disturbance_box);

/// Exact order-p Wasserstein distance between 1-D finite-support
/// distributions via quantile coupling. Test oracle.
double wasserstein_1d(const NominalDistribution& mu, const NominalDistribution& nu,
                      double p);

/// Uniform inclusive grid over a 1-D box as an equal-weight finite support;
/// the study's stand-in for the continuous true distribution.
NominalDistribution discretize_uniform_1d(const Box& b, int atoms);

}  // namespace drc
