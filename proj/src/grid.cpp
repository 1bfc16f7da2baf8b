#include "drc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace drc {

StateGrid::StateGrid(Box b, std::vector<int> points_per_dim)
    : box(std::move(b)), npts(std::move(points_per_dim)) {
  if (static_cast<int>(npts.size()) != box.dim())
    throw std::invalid_argument("StateGrid: dimension mismatch");
  for (int k : npts)
    if (k < 2) throw std::invalid_argument("StateGrid: need >= 2 points per dim");
}

StateGrid::StateGrid(Box b, double resolution) : box(std::move(b)) {
  if (resolution <= 0.0) throw std::invalid_argument("StateGrid: resolution <= 0");
  npts.resize(box.dim());
  for (int k = 0; k < box.dim(); ++k) {
    int cells = static_cast<int>(std::floor(box.side(k) / resolution + 1e-9));
    npts[k] = std::max(2, cells + 1);
  }
}

std::size_t StateGrid::total() const {
  std::size_t t = 1;
  for (int k : npts) t *= static_cast<std::size_t>(k);
  return t;
}

void StateGrid::node(std::size_t idx, std::span<double> out) const {
  for (int k = dim() - 1; k >= 0; --k) {
    std::size_t i = idx % npts[k];
    idx /= npts[k];
    out[k] = box.lo[k] + step(k) * static_cast<double>(i);
  }
}

std::vector<double> StateGrid::node(std::size_t idx) const {
  std::vector<double> out(dim());
  node(idx, out);
  return out;
}

std::size_t StateGrid::nearest(std::span<const double> x) const {
  std::size_t idx = 0;
  for (int k = 0; k < dim(); ++k) {
    double t = (x[k] - box.lo[k]) / step(k);
    long i = std::lround(t);
    i = std::clamp(i, 0L, static_cast<long>(npts[k] - 1));
    idx = idx * npts[k] + static_cast<std::size_t>(i);
  }
  return idx;
}

ValueGrid::ValueGrid(StateGrid g, int T, SpecKind k, Region safe_region,
                     std::optional<Region> target_region)
    : grid(std::move(g)),
      horizon(T),
      kind(k),
      safe(std::move(safe_region)),
      target(std::move(target_region)) {
  if (T < 0) throw std::invalid_argument("ValueGrid: negative horizon");
  if (kind == SpecKind::reach_avoid && !target)
    throw std::invalid_argument("ValueGrid: reach_avoid needs a target region");
  stages.assign(static_cast<std::size_t>(T + 1) * grid.total(), 0.0);
}

ValueGrid::ValueGrid(const ValueGrid& o)
    : grid(o.grid),
      horizon(o.horizon),
      kind(o.kind),
      safe(o.safe),
      target(o.target),
      interp(o.interp),
      stages(o.stages),
      clamp_count(o.clamp_count.load()) {}

ValueGrid::ValueGrid(ValueGrid&& o) noexcept
    : grid(std::move(o.grid)),
      horizon(o.horizon),
      kind(o.kind),
      safe(std::move(o.safe)),
      target(std::move(o.target)),
      interp(o.interp),
      stages(std::move(o.stages)),
      clamp_count(o.clamp_count.load()) {}

ValueGrid& ValueGrid::operator=(const ValueGrid& o) {
  if (this == &o) return *this;
  grid = o.grid;
  horizon = o.horizon;
  kind = o.kind;
  safe = o.safe;
  target = o.target;
  interp = o.interp;
  stages = o.stages;
  clamp_count.store(o.clamp_count.load());
  return *this;
}

ValueGrid& ValueGrid::operator=(ValueGrid&& o) noexcept {
  grid = std::move(o.grid);
  horizon = o.horizon;
  kind = o.kind;
  safe = std::move(o.safe);
  target = std::move(o.target);
  interp = o.interp;
  stages = std::move(o.stages);
  clamp_count.store(o.clamp_count.load());
  return *this;
}

double query_value(const ValueGrid& vg, int stage, std::span<const double> x) {
  if (stage < 0 || stage > vg.horizon)
    throw std::out_of_range("query_value: stage out of range");
  if (vg.kind == SpecKind::reach_avoid && vg.target->contains(x)) return 1.0;
  if (!vg.safe.contains(x)) return 0.0;

  const StateGrid& g = vg.grid;
  const int d = g.dim();
  bool clamped = false;
  // per-dimension cell index and fractional offset after clamping
  std::vector<int> i0(d);
  std::vector<double> frac(d);
  for (int k = 0; k < d; ++k) {
    double c = std::clamp(x[k], g.box.lo[k], g.box.hi[k]);
    if (c != x[k]) clamped = true;
    double t = (c - g.box.lo[k]) / g.step(k);
    int i = std::min(static_cast<int>(std::floor(t)), g.npts[k] - 2);
    i = std::max(i, 0);
    i0[k] = i;
    frac[k] = std::clamp(t - i, 0.0, 1.0);
  }
  if (clamped) vg.clamp_count.fetch_add(1, std::memory_order_relaxed);

  const std::size_t base = static_cast<std::size_t>(stage) * g.total();
  double acc = 0.0;
  double worst = 2.0;
  const unsigned corners = 1u << d;
  for (unsigned mask = 0; mask < corners; ++mask) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int k = 0; k < d; ++k) {
      const bool hi = (mask >> k) & 1u;
      w *= hi ? frac[k] : 1.0 - frac[k];
      idx = idx * g.npts[k] + static_cast<std::size_t>(i0[k] + (hi ? 1 : 0));
    }
    if (w == 0.0) continue;
    double v = vg.stages[base + idx];
    acc += w * v;
    worst = std::min(worst, v);
  }
  double out = vg.interp == InterpMode::corner_min ? worst : acc;
  return std::clamp(out, 0.0, 1.0);
}

PolicyTable::PolicyTable(StateGrid g, int T, std::vector<std::vector<double>> input_list)
    : grid(std::move(g)), horizon(T), inputs(std::move(input_list)) {
  if (T < 0) throw std::invalid_argument("PolicyTable: negative horizon");
  if (inputs.empty()) throw std::invalid_argument("PolicyTable: no inputs");
  choice.assign(static_cast<std::size_t>(T) * grid.total(), 0);
}

// --- serialization ---------------------------------------------------------

namespace {

std::ostream& full(std::ostream& os) { return os << std::setprecision(17); }

void write_grid_header(std::ostream& os, const StateGrid& g) {
  os << "# dim=" << g.dim() << " npts=";
  for (int k = 0; k < g.dim(); ++k) os << (k ? "," : "") << g.npts[k];
  os << "\n";
  for (int k = 0; k < g.dim(); ++k)
    full(os) << "# box" << k << "=" << g.box.lo[k] << "," << g.box.hi[k] << "\n";
}

void write_node_coords(std::ostream& os, const StateGrid& g, std::size_t idx) {
  std::vector<double> xs = g.node(idx);
  for (int k = 0; k < g.dim(); ++k) {
    if (k) os << ",";
    full(os) << xs[k];
  }
}

}  // namespace

void write_value_grid_csv(std::ostream& os, const ValueGrid& vg) {
  os << "# value-grid-csv v1\n";
  os << "# kind=" << (vg.kind == SpecKind::reach_avoid ? "reach_avoid" : "safety")
     << " horizon=" << vg.horizon
     << " interp=" << (vg.interp == InterpMode::corner_min ? "corner_min"
                                                           : "multilinear")
     << "\n";
  write_grid_header(os, vg.grid);
  for (int k = 0; k < vg.grid.dim(); ++k) os << "x" << k << ",";
  for (int t = 0; t <= vg.horizon; ++t) os << (t ? "," : "") << "v_t" << t;
  os << "\n";
  for (std::size_t i = 0; i < vg.grid.total(); ++i) {
    write_node_coords(os, vg.grid, i);
    for (int t = 0; t <= vg.horizon; ++t) full(os << ",") << vg.at(t, i);
    os << "\n";
  }
}

void write_policy_csv(std::ostream& os, const PolicyTable& pt) {
  const int m = pt.inputs.empty() ? 0 : static_cast<int>(pt.inputs[0].size());
  os << "# policy-csv v1\n";
  os << "# horizon=" << pt.horizon << " inputs=" << pt.inputs.size()
     << " input_dim=" << m << "\n";
  for (std::size_t j = 0; j < pt.inputs.size(); ++j) {
    os << "# input" << j << "=";
    for (int k = 0; k < m; ++k) full(os << (k ? "," : "")) << pt.inputs[j][k];
    os << "\n";
  }
  write_grid_header(os, pt.grid);
  for (int k = 0; k < pt.grid.dim(); ++k) os << "x" << k << ",";
  bool first = true;
  for (int t = 0; t < pt.horizon; ++t)
    for (int k = 0; k < m; ++k) {
      os << (first ? "" : ",") << "u_t" << t << "_" << k;
      first = false;
    }
  os << "\n";
  for (std::size_t i = 0; i < pt.grid.total(); ++i) {
    write_node_coords(os, pt.grid, i);
    for (int t = 0; t < pt.horizon; ++t) {
      const auto& u = pt.input_at(t, i);
      for (int k = 0; k < m; ++k) full(os << ",") << u[k];
    }
    os << "\n";
  }
}

namespace {

constexpr char kCacheMagic[8] = {'D', 'R', 'C', 'C', 'A', 'C', 'H', '1'};

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return static_cast<bool>(is);
}

}  // namespace

void write_cache(std::ostream& os, const ValueGrid& vg, const PolicyTable& pt,
                 std::uint64_t config_hash) {
  os.write(kCacheMagic, sizeof(kCacheMagic));
  put(os, config_hash);
  put<std::uint32_t>(os, vg.kind == SpecKind::reach_avoid ? 0 : 1);
  put<std::uint32_t>(os, vg.interp == InterpMode::multilinear ? 0 : 1);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(vg.grid.dim()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(vg.horizon));
  for (int k = 0; k < vg.grid.dim(); ++k) {
    put(os, vg.grid.box.lo[k]);
    put(os, vg.grid.box.hi[k]);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(vg.grid.npts[k]));
  }
  put<std::uint64_t>(os, vg.stages.size());
  os.write(reinterpret_cast<const char*>(vg.stages.data()),
           static_cast<std::streamsize>(vg.stages.size() * sizeof(double)));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(pt.inputs.size()));
  put<std::uint32_t>(os,
                     static_cast<std::uint32_t>(pt.inputs.empty() ? 0
                                                                  : pt.inputs[0].size()));
  for (const auto& u : pt.inputs)
    os.write(reinterpret_cast<const char*>(u.data()),
             static_cast<std::streamsize>(u.size() * sizeof(double)));
  put<std::uint64_t>(os, pt.choice.size());
  os.write(reinterpret_cast<const char*>(pt.choice.data()),
           static_cast<std::streamsize>(pt.choice.size() * sizeof(int)));
}

std::optional<CacheBlob> read_cache(std::istream& is, std::uint64_t expected_hash) {
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || !std::equal(magic, magic + 8, kCacheMagic)) return std::nullopt;
  CacheBlob b;
  std::uint32_t kind = 0, interp = 0, dim = 0, horizon = 0;
  if (!get(is, b.config_hash)) return std::nullopt;
  if (b.config_hash != expected_hash) return std::nullopt;
  if (!get(is, kind) || !get(is, interp) || !get(is, dim) || !get(is, horizon))
    return std::nullopt;
  b.kind = kind == 0 ? SpecKind::reach_avoid : SpecKind::safety;
  b.interp = interp == 0 ? InterpMode::multilinear : InterpMode::corner_min;
  b.horizon = static_cast<int>(horizon);
  Box box;
  std::vector<int> npts;
  for (std::uint32_t k = 0; k < dim; ++k) {
    double lo = 0, hi = 0;
    std::uint32_t n = 0;
    if (!get(is, lo) || !get(is, hi) || !get(is, n)) return std::nullopt;
    box.lo.push_back(lo);
    box.hi.push_back(hi);
    npts.push_back(static_cast<int>(n));
  }
  b.grid = StateGrid(box, npts);
  std::uint64_t nvals = 0;
  if (!get(is, nvals)) return std::nullopt;
  b.stages.resize(nvals);
  is.read(reinterpret_cast<char*>(b.stages.data()),
          static_cast<std::streamsize>(nvals * sizeof(double)));
  if (!is) return std::nullopt;
  std::uint32_t n_inputs = 0, input_dim = 0;
  if (!get(is, n_inputs) || !get(is, input_dim)) return std::nullopt;
  b.inputs.assign(n_inputs, std::vector<double>(input_dim));
  for (auto& u : b.inputs) {
    is.read(reinterpret_cast<char*>(u.data()),
            static_cast<std::streamsize>(input_dim * sizeof(double)));
    if (!is) return std::nullopt;
  }
  std::uint64_t nchoice = 0;
  if (!get(is, nchoice)) return std::nullopt;
  b.choice.resize(nchoice);
  is.read(reinterpret_cast<char*>(b.choice.data()),
          static_cast<std::streamsize>(nchoice * sizeof(int)));
  if (!is) return std::nullopt;
  return b;
}

ValueGrid value_grid_from_blob(const CacheBlob& blob, Region safe,
                               std::optional<Region> target) {
  ValueGrid vg(blob.grid, blob.horizon, blob.kind, std::move(safe),
               std::move(target));
  vg.interp = blob.interp;
  if (vg.stages.size() != blob.stages.size())
    throw std::runtime_error("cache blob: stage table size mismatch");
  vg.stages = blob.stages;
  return vg;
}

PolicyTable policy_from_blob(const CacheBlob& blob) {
  PolicyTable pt(blob.grid, blob.horizon, blob.inputs);
  if (pt.choice.size() != blob.choice.size())
    throw std::runtime_error("cache blob: choice table size mismatch");
  pt.choice = blob.choice;
  return pt;
}

}  // namespace drc
