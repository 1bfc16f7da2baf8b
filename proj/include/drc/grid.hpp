#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drc/region.hpp"
#include "drc/system.hpp"

namespace drc {

/// Uniform rectangular grid over a working box. Nodes are indexed row-major
/// with the last dimension fastest; iteration order is part of the
/// determinism contract (ties everywhere resolve to the lowest index).
struct StateGrid {
  Box box;
  std::vector<int> npts;  // per dimension, each >= 2

  StateGrid() = default;
  StateGrid(Box b, std::vector<int> points_per_dim);
  /// Chooses per-dimension counts so the node spacing is <= resolution.
  StateGrid(Box b, double resolution);

  int dim() const { return box.dim(); }
  std::size_t total() const;
  /// Node spacing along dimension k.
  double step(int k) const { return box.side(k) / (npts[k] - 1); }
  std::vector<double> node(std::size_t idx) const;
  void node(std::size_t idx, std::span<double> out) const;
  /// Index of the nearest node; coordinates outside the box clamp to it.
  std::size_t nearest(std::span<const double> x) const;
};

enum class InterpMode { multilinear, corner_min };

/// Stage-indexed value table over a StateGrid. stages holds (horizon+1)
/// slices of grid.total() values each, stage-major.
struct ValueGrid {
  StateGrid grid;
  int horizon = 0;
  SpecKind kind = SpecKind::safety;
  Region safe;
  std::optional<Region> target;  // present iff kind == reach_avoid
  InterpMode interp = InterpMode::multilinear;
  std::vector<double> stages;

  /// Number of queries that fell outside the working box while still inside
  /// the safe set (resolved by nearest-face clamping). Diagnostic only.
  mutable std::atomic<std::uint64_t> clamp_count{0};

  ValueGrid() = default;
  ValueGrid(StateGrid g, int T, SpecKind k, Region safe_region,
            std::optional<Region> target_region);
  ValueGrid(const ValueGrid& o);
  ValueGrid(ValueGrid&& o) noexcept;
  ValueGrid& operator=(const ValueGrid& o);
  ValueGrid& operator=(ValueGrid&& o) noexcept;

  double& at(int t, std::size_t idx) {
    return stages[static_cast<std::size_t>(t) * grid.total() + idx];
  }
  double at(int t, std::size_t idx) const {
    return stages[static_cast<std::size_t>(t) * grid.total() + idx];
  }
};

/// Off-grid evaluation with the indicator structure applied first:
/// reach-avoid returns 1 inside the target and 0 outside the safe set;
/// safety returns 0 outside the safe set; otherwise the grid value is
/// interpolated and clamped to [0,1]. corner_min takes the minimum over the
/// enclosing cell corners that carry positive multilinear weight, so nodal
/// queries return the stored value in both modes.
double query_value(const ValueGrid& vg, int stage, std::span<const double> x);

/// Stage-indexed control table. Inputs are stored once (enumeration order)
/// and referenced by index; lookups at simulation time snap to the nearest
/// node because finite input sets cannot be interpolated.
struct PolicyTable {
  StateGrid grid;
  int horizon = 0;
  std::vector<std::vector<double>> inputs;
  std::vector<int> choice;  // horizon * grid.total(), stage-major

  PolicyTable() = default;
  PolicyTable(StateGrid g, int T, std::vector<std::vector<double>> input_list);

  int choice_at(int t, std::size_t idx) const {
    return choice[static_cast<std::size_t>(t) * grid.total() + idx];
  }
  int& choice_at(int t, std::size_t idx) {
    return choice[static_cast<std::size_t>(t) * grid.total() + idx];
  }
  const std::vector<double>& input_at(int t, std::size_t idx) const {
    return inputs[choice_at(t, idx)];
  }
  const std::vector<double>& input_for_state(int t, std::span<const double> x) const {
    return inputs[choice_at(t, grid.nearest(x))];
  }
};

// --- serialization ---------------------------------------------------------
// CSV: one row per node, node coordinates first, then the per-stage value
// (value grid) or chosen input components (policy). Headers carry a format
// version; no timestamps anywhere so identical runs produce identical bytes.

void write_value_grid_csv(std::ostream& os, const ValueGrid& vg);
void write_policy_csv(std::ostream& os, const PolicyTable& pt);

/// Binary cache payload: everything except the regions, which are re-derived
/// from the model config at load time (the config hash guards mismatches).
struct CacheBlob {
  std::uint64_t config_hash = 0;
  StateGrid grid;
  int horizon = 0;
  SpecKind kind = SpecKind::safety;
  InterpMode interp = InterpMode::multilinear;
  std::vector<double> stages;
  std::vector<std::vector<double>> inputs;
  std::vector<int> choice;
};

void write_cache(std::ostream& os, const ValueGrid& vg, const PolicyTable& pt,
                 std::uint64_t config_hash);
/// Empty optional on bad magic, truncation, or hash mismatch.
std::optional<CacheBlob> read_cache(std::istream& is, std::uint64_t expected_hash);

ValueGrid value_grid_from_blob(const CacheBlob& blob, Region safe,
                               std::optional<Region> target);
PolicyTable policy_from_blob(const CacheBlob& blob);

}  // namespace drc
