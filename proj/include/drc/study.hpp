#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "drc/distribution.hpp"
#include "drc/dual.hpp"
#include "drc/synthesis.hpp"
#include "drc/system.hpp"

namespace drc {

struct StudyGroup {
  int samples = 5;
  double theta = 0.05;
};

struct StudyConfig {
  std::vector<StudyGroup> groups;  // empty -> the five standard groups
  int repetitions = 20;
  double alpha = 0.9;
  std::uint64_t seed = 0;
  double grid_resolution = 0.01;
  double eval_resolution = 0.01;  // initial-set probe spacing
  int eval_atoms = 201;           // discretization of the true distribution
  double p = 1.0;
  SolverConfig solver;
  std::string model = "room_temperature";
  SpecKind kind = SpecKind::reach_avoid;
  /// True disturbance distribution; unset means uniform over the model's
  /// disturbance box.
  std::optional<TrueDistribution> true_dist;
};

struct StudyRepRow {
  int group_index = 0;
  int samples = 0;
  double theta = 0.0;
  int rep = 0;
  bool ok = false;     // synthesis + evaluation completed
  std::string error;   // populated when !ok
  double sample_mean = 0.0;
  double dr_min = 0.0;
  double base_min = 0.0;
  bool dr_success = false;
  bool base_success = false;
};

struct StudyGroupRow {
  int group_index = 0;
  int samples = 0;
  double theta = 0.0;
  int repetitions = 0;
  // success rates count failed repetitions as unsuccessful; the averages are
  // reported both over all completed repetitions and over successful ones,
  // because published summaries are ambiguous about which they use
  double dr_success_rate = 0.0;
  double base_success_rate = 0.0;
  double dr_avg_all = 0.0;
  double dr_avg_succ = 0.0;
  double base_avg_all = 0.0;
  double base_avg_succ = 0.0;
};

struct StudyResult {
  std::vector<StudyRepRow> rows;
  std::vector<StudyGroupRow> groups;
};

/// Full sampled-nominal study. Per repetition: draw N disturbance samples
/// from the true distribution (child generator per (group, rep)), form the
/// empirical nominal, synthesize the robust policy at the group's radius and
/// the baseline at radius zero from the same nominal, derive threshold
/// applied policies (the robust one falls back to the baseline's action on
/// exact ties), evaluate both exactly under a fine finite discretization of
/// the true distribution, and record the minimum over the initial set with
/// its success flag (>= alpha). Per-repetition errors become failed rows.
StudyResult run_group_study(const StudyConfig& cfg);

std::vector<StudyGroup> standard_groups();

void write_study_rows_csv(std::ostream& os, const StudyResult& result);
void write_study_groups_csv(std::ostream& os, const StudyResult& result);

}  // namespace drc
