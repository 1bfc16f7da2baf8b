#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drc/distribution.hpp"
#include "drc/dual.hpp"
#include "drc/grid.hpp"
#include "drc/simulate.hpp"
#include "drc/study.hpp"
#include "drc/system.hpp"

namespace drc {

std::string library_version();

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Sectioned key=value config. Lines starting with '#' or ';' (or after
/// whitespace) are comments; sections are "[name]"; later duplicates win.
/// Section and key names are case-insensitive (stored lowercase), values are
/// kept verbatim.
struct ConfigFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static ConfigFile parse(const std::string& text);
  static ConfigFile load_file(const std::string& path);

  bool has(const std::string& sec, const std::string& key) const;
  std::optional<std::string> get(const std::string& sec, const std::string& key) const;
  std::string get_or(const std::string& sec, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& sec, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& sec, const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& sec, const std::string& key,
                        std::uint64_t fallback) const;
  bool get_bool(const std::string& sec, const std::string& key, bool fallback) const;
  /// Whitespace/comma separated number list; empty when the key is missing.
  std::vector<double> get_doubles(const std::string& sec, const std::string& key) const;
  void set(const std::string& sec, const std::string& key, const std::string& value);

  /// FNV-1a over the sorted canonical "[section]key=value" lines of the
  /// chosen sections (all when empty). Values hash verbatim, so formatting
  /// differences count as different configs.
  std::uint64_t hash(const std::vector<std::string>& only_sections = {}) const;
};

// --- section loaders ---------------------------------------------------------

/// [model]: builtin = room_temperature | safety_1d | safety_4d, with an
/// optional horizon override.
SystemModel model_from_config(const ConfigFile& cfg);

/// [model] spec = reach_avoid | safety; defaults to reach_avoid when the
/// model has a target region.
SpecKind kind_from_config(const ConfigFile& cfg, const SystemModel& model);

/// [grid]: resolution = h, or points = n[,n...] per dimension; the working
/// box defaults to the safe set's bounding box.
StateGrid grid_from_config(const ConfigFile& cfg, const SystemModel& model);

InterpMode interp_from_config(const ConfigFile& cfg);

SolverConfig solver_from_config(const ConfigFile& cfg);

/// Distribution spec inside `section`: distribution = uniform |
/// truncated_gaussian | atoms, with box defaulting to the model's
/// disturbance box, mean/std for the Gaussian, and "atoms" in the
/// "c1 c2 .. : weight, ..." format.
TrueDistribution true_dist_from_config(const ConfigFile& cfg,
                                       const SystemModel& model,
                                       const std::string& section);

struct AmbiguityLoad {
  AmbiguitySet amb;
  /// Raw draws when the nominal was sampled (empty for explicit atom lists);
  /// callers persist them for audit.
  std::vector<std::vector<double>> drawn_samples;
};

/// [ambiguity]: theta, p, and either an explicit atom list (atoms = ...) or
/// samples = N drawn from [ambiguity]'s own distribution spec (default: the
/// true distribution of [simulation], else uniform over the disturbance
/// box) using child streams of the sampling seed.
AmbiguityLoad ambiguity_from_config(const ConfigFile& cfg, const SystemModel& model,
                                    std::uint64_t default_seed);

SimulationConfig simulation_from_config(const ConfigFile& cfg,
                                        const SystemModel& model,
                                        std::uint64_t default_seed);

StudyConfig study_from_config(const ConfigFile& cfg, std::uint64_t default_seed);

/// "v1 v2 .. : weight, ..." atom list; equal weights when every ':' part is
/// omitted.
NominalDistribution parse_atom_list(const std::string& text, int dim);

}  // namespace drc
