#include "drc/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace drc {

void NominalDistribution::validate(const Box* inside) const {
  if (atoms.empty()) throw std::invalid_argument("nominal distribution has no atoms");
  if (atoms.size() != probs.size())
    throw std::invalid_argument("nominal atoms/probs size mismatch");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0 && p <= 1.0))
      throw std::invalid_argument("nominal atom weight outside (0,1]");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("nominal weights do not sum to 1");
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (atoms[i].size() != atoms[0].size())
      throw std::invalid_argument("nominal atom dimension mismatch");
    if (inside && !inside->contains(atoms[i]))
      throw std::invalid_argument("nominal atom outside disturbance box");
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      if (atoms[i] == atoms[j])
        throw std::invalid_argument("nominal atoms not pairwise distinct");
  }
}

std::vector<double> NominalDistribution::mean() const {
  std::vector<double> m(dim(), 0.0);
  for (int i = 0; i < count(); ++i)
    for (int k = 0; k < dim(); ++k) m[k] += probs[i] * atoms[i][k];
  return m;
}

void AmbiguitySet::validate() const {
  nominal.validate();
  if (theta < 0.0) throw std::invalid_argument("ambiguity radius must be >= 0");
  if (p < 1.0) throw std::invalid_argument("Wasserstein order must be >= 1");
}

TrueDistribution TrueDistribution::uniform(Box b) {
  TrueDistribution d;
  d.kind = Kind::uniform_box;
  d.box = std::move(b);
  return d;
}

TrueDistribution TrueDistribution::truncated_gaussian(std::vector<double> mean,
                                                      std::vector<double> std,
                                                      Box b) {
  if (mean.size() != std.size() || static_cast<int>(mean.size()) != b.dim())
    throw std::invalid_argument("truncated gaussian parameter size mismatch");
  for (std::size_t k = 0; k < std.size(); ++k) {
    if (!(std[k] > 0.0)) throw std::invalid_argument("gaussian std must be positive");
    if (!(b.hi[k] > b.lo[k]))
      throw std::invalid_argument("truncation box must have positive volume");
  }
  TrueDistribution d;
  d.kind = Kind::truncated_gaussian;
  d.mean = std::move(mean);
  d.std = std::move(std);
  d.box = std::move(b);
  return d;
}

TrueDistribution TrueDistribution::finite_support(NominalDistribution n) {
  n.validate();
  TrueDistribution d;
  d.kind = Kind::finite_support;
  d.finite = std::move(n);
  return d;
}

int TrueDistribution::dim() const {
  switch (kind) {
    case Kind::uniform_box: return box.dim();
    case Kind::truncated_gaussian: return box.dim();
    case Kind::finite_support: return finite.dim();
  }
  return 0;
}

std::vector<double> TrueDistribution::sample(SplitRng& rng) const {
  switch (kind) {
    case Kind::uniform_box: {
      std::vector<double> w(box.dim());
      for (int k = 0; k < box.dim(); ++k) w[k] = rng.uniform(box.lo[k], box.hi[k]);
      return w;
    }
    case Kind::truncated_gaussian: {
      std::vector<double> w(box.dim());
      for (int k = 0; k < box.dim(); ++k)
        w[k] = rng.truncated_normal(mean[k], std[k], box.lo[k], box.hi[k]);
      return w;
    }
    case Kind::finite_support: {
      double u = rng.next_double(), acc = 0.0;
      for (int i = 0; i < finite.count(); ++i) {
        acc += finite.probs[i];
        if (u < acc) return finite.atoms[i];
      }
      return finite.atoms.back();
    }
  }
  throw std::logic_error("unreachable");
}

NominalDistribution empirical_nominal(const std::vector<std::vector<double>>& samples,
                                      const Box& disturbance_box) {
  if (samples.empty()) throw std::invalid_argument("empirical_nominal: no samples");
  NominalDistribution d;
  std::vector<long> counts;
  for (const auto& s : samples) {
    if (!disturbance_box.contains(s))
      throw std::invalid_argument("empirical_nominal: sample outside disturbance box");
    auto it = std::find(d.atoms.begin(), d.atoms.end(), s);
    if (it == d.atoms.end()) {
      d.atoms.push_back(s);
      counts.push_back(1);
    } else {
      ++counts[static_cast<std::size_t>(it - d.atoms.begin())];
    }
  }
  const double n = static_cast<double>(samples.size());
  d.probs.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    d.probs[i] = static_cast<double>(counts[i]) / n;
  d.validate(&disturbance_box);
  return d;
}

double wasserstein_1d(const NominalDistribution& mu, const NominalDistribution& nu,
                      double p) {
  if (mu.dim() != 1 || nu.dim() != 1)
    throw std::invalid_argument("wasserstein_1d requires 1-D distributions");
  auto sorted = [](const NominalDistribution& d) {
    std::vector<std::pair<double, double>> a(d.atoms.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = {d.atoms[i][0], d.probs[i]};
    std::sort(a.begin(), a.end());
    return a;
  };
  auto a = sorted(mu), b = sorted(nu);
  // walk the two quantile functions, matching cumulative mass segments
  std::size_t i = 0, j = 0;
  double ra = a[0].second, rb = b[0].second, cost = 0.0;
  while (i < a.size() && j < b.size()) {
    double m = std::min(ra, rb);
    cost += m * std::pow(std::fabs(a[i].first - b[j].first), p);
    ra -= m;
    rb -= m;
    if (ra <= 1e-15 && ++i < a.size()) ra = a[i].second;
    if (rb <= 1e-15 && ++j < b.size()) rb = b[j].second;
  }
  return std::pow(cost, 1.0 / p);
}

NominalDistribution discretize_uniform_1d(const Box& b, int atoms) {
  if (b.dim() != 1) throw std::invalid_argument("discretize_uniform_1d: box not 1-D");
  if (atoms < 2) throw std::invalid_argument("discretize_uniform_1d: need >= 2 atoms");
  NominalDistribution d;
  d.atoms.reserve(atoms);
  const double h = (b.hi[0] - b.lo[0]) / (atoms - 1);
  for (int i = 0; i < atoms; ++i) d.atoms.push_back({b.lo[0] + h * i});
  d.probs.assign(atoms, 1.0 / atoms);
  d.validate(&b);
  return d;
}

}  // namespace drc
