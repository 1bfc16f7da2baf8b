#include "drc/region.hpp"

#include <cmath>
#include <stdexcept>

namespace drc {

bool Box::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim())
    throw std::invalid_argument("box membership dimension mismatch");
  for (int k = 0; k < dim(); ++k)
    if (x[k] < lo[k] || x[k] > hi[k]) return false;
  return true;
}

double Box::diameter() const {
  double s = 0.0;
  for (int k = 0; k < dim(); ++k) s += side(k) * side(k);
  return std::sqrt(s);
}

Region Region::make_box(Box b) {
  if (b.lo.size() != b.hi.size()) throw std::invalid_argument("box lo/hi size mismatch");
  for (std::size_t k = 0; k < b.lo.size(); ++k)
    if (b.lo[k] > b.hi[k]) throw std::invalid_argument("box lower bound above upper");
  Region r;
  r.kind = Kind::box;
  r.arity = b.dim();
  r.box = std::move(b);
  return r;
}

Region Region::make_superlevel(Polynomial s, std::optional<Box> bounding) {
  Region r;
  r.kind = Kind::superlevel;
  r.arity = s.arity;
  r.level = std::move(s);
  r.bound = std::move(bounding);
  return r;
}

bool Region::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != arity)
    throw std::invalid_argument("region membership dimension mismatch");
  if (kind == Kind::box) return box.contains(x);
  return level.eval(x) >= 0.0;
}

std::optional<Box> Region::bounding_box() const {
  if (kind == Kind::box) return box;
  return bound;
}

std::vector<std::vector<double>> box_grid(const Box& b, int pts_per_dim) {
  if (pts_per_dim < 1) throw std::invalid_argument("box_grid: need >= 1 point");
  const int d = b.dim();
  std::vector<std::vector<double>> out;
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) total *= static_cast<std::size_t>(pts_per_dim);
  out.reserve(total);
  std::vector<int> idx(d, 0);
  std::vector<double> pt(d);
  while (true) {
    for (int k = 0; k < d; ++k)
      pt[k] = pts_per_dim == 1
                  ? 0.5 * (b.lo[k] + b.hi[k])
                  : b.lo[k] + b.side(k) * idx[k] / (pts_per_dim - 1);
    out.push_back(pt);
    int k = d - 1;
    while (k >= 0 && ++idx[k] == pts_per_dim) idx[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

}  // namespace drc
