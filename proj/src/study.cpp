#include "drc/study.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace drc {

std::vector<StudyGroup> standard_groups() {
  return {{1, 0.1}, {5, 0.05}, {10, 0.025}, {20, 0.01}, {40, 0.005}};
}

StudyResult run_group_study(const StudyConfig& cfg) {
  if (cfg.repetitions < 1)
    throw std::invalid_argument("run_group_study: repetitions >= 1");
  const SystemModel model = builtin_system(cfg.model);
  const std::vector<StudyGroup> groups =
      cfg.groups.empty() ? standard_groups() : cfg.groups;
  const TrueDistribution truth =
      cfg.true_dist ? *cfg.true_dist : TrueDistribution::uniform(model.disturbance_box);
  // working grid covers the safe set; required bounded for the room study
  std::optional<Box> sbb = model.safe.bounding_box();
  if (!sbb) throw std::invalid_argument("run_group_study: safe set unbounded");
  const StateGrid grid(*sbb, cfg.grid_resolution);
  const NominalDistribution eval_dist =
      discretize_uniform_1d(model.disturbance_box, cfg.eval_atoms);

  StudyResult out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      StudyRepRow row;
      row.group_index = static_cast<int>(g);
      row.samples = groups[g].samples;
      row.theta = groups[g].theta;
      row.rep = rep;
      // one generator per (group, rep) so rows are independent of execution
      // order and of the other groups' sample counts
      SplitRng rng = SplitRng::child(
          cfg.seed, (static_cast<std::uint64_t>(g) << 32) |
                        static_cast<std::uint64_t>(rep));
      try {
        std::vector<std::vector<double>> samples;
        samples.reserve(groups[g].samples);
        double mean = 0.0;
        for (int s = 0; s < groups[g].samples; ++s) {
          samples.push_back(truth.sample(rng));
          mean += samples.back()[0];
        }
        row.sample_mean = mean / groups[g].samples;
        const NominalDistribution nominal =
            empirical_nominal(samples, model.disturbance_box);

        const AmbiguitySet base_amb{nominal, 0.0, cfg.p};
        SynthesisResult base = value_iteration(model, base_amb, grid, cfg.solver,
                                               cfg.kind, /*record_q=*/true);
        PolicyTable base_applied =
            derive_applied_policy(*base.q, cfg.alpha, nullptr);

        const AmbiguitySet dr_amb{nominal, groups[g].theta, cfg.p};
        SynthesisResult dr = value_iteration(model, dr_amb, grid, cfg.solver,
                                             cfg.kind, /*record_q=*/true);
        PolicyTable dr_applied =
            derive_applied_policy(*dr.q, cfg.alpha, &base_applied);

        ValueGrid dr_eval = evaluate_fixed_distribution(model, dr_applied,
                                                        eval_dist, grid, cfg.kind);
        ValueGrid base_eval = evaluate_fixed_distribution(
            model, base_applied, eval_dist, grid, cfg.kind);
        row.dr_min = min_over_initial(dr_eval, model, cfg.eval_resolution).first;
        row.base_min =
            min_over_initial(base_eval, model, cfg.eval_resolution).first;
        row.dr_success = row.dr_min >= cfg.alpha;
        row.base_success = row.base_min >= cfg.alpha;
        row.ok = true;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      out.rows.push_back(std::move(row));
    }
  }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    StudyGroupRow agg;
    agg.group_index = static_cast<int>(g);
    agg.samples = groups[g].samples;
    agg.theta = groups[g].theta;
    agg.repetitions = cfg.repetitions;
    int ok = 0, dr_succ = 0, base_succ = 0;
    double dr_all = 0, base_all = 0, dr_s = 0, base_s = 0;
    for (const auto& row : out.rows) {
      if (row.group_index != static_cast<int>(g)) continue;
      if (!row.ok) continue;
      ++ok;
      dr_all += row.dr_min;
      base_all += row.base_min;
      if (row.dr_success) {
        ++dr_succ;
        dr_s += row.dr_min;
      }
      if (row.base_success) {
        ++base_succ;
        base_s += row.base_min;
      }
    }
    agg.dr_success_rate = static_cast<double>(dr_succ) / cfg.repetitions;
    agg.base_success_rate = static_cast<double>(base_succ) / cfg.repetitions;
    agg.dr_avg_all = ok ? dr_all / ok : 0.0;
    agg.base_avg_all = ok ? base_all / ok : 0.0;
    agg.dr_avg_succ = dr_succ ? dr_s / dr_succ : 0.0;
    agg.base_avg_succ = base_succ ? base_s / base_succ : 0.0;
    out.groups.push_back(agg);
  }
  return out;
}

void write_study_rows_csv(std::ostream& os, const StudyResult& result) {
  os << "# study-rows-csv v1\n";
  os << "group,samples,theta,rep,ok,error,sample_mean,dr_min,dr_success,"
        "base_min,base_success\n";
  os << std::setprecision(17);
  for (const auto& r : result.rows) {
    os << r.group_index << "," << r.samples << "," << r.theta << "," << r.rep
       << "," << (r.ok ? 1 : 0) << ",\"" << r.error << "\"," << r.sample_mean
       << "," << r.dr_min << "," << (r.dr_success ? 1 : 0) << "," << r.base_min
       << "," << (r.base_success ? 1 : 0) << "\n";
  }
}

void write_study_groups_csv(std::ostream& os, const StudyResult& result) {
  os << "# study-groups-csv v1\n";
  os << "group,samples,theta,repetitions,dr_success_rate,dr_avg_all,"
        "dr_avg_succ,base_success_rate,base_avg_all,base_avg_succ\n";
  os << std::setprecision(17);
  for (const auto& a : result.groups) {
    os << a.group_index << "," << a.samples << "," << a.theta << ","
       << a.repetitions << "," << a.dr_success_rate << "," << a.dr_avg_all << ","
       << a.dr_avg_succ << "," << a.base_success_rate << "," << a.base_avg_all
       << "," << a.base_avg_succ << "\n";
  }
}

}  // namespace drc
