#include "drc/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "drc/parallel.hpp"

namespace drc {

namespace {

void check_range(double v) {
  if (!(v >= -1e-9 && v <= 1.0 + 1e-9))
    throw std::runtime_error("value iteration: value left [0,1]");
}

bool in_target(const SystemModel& model, SpecKind kind, std::span<const double> x) {
  return kind == SpecKind::reach_avoid && model.target && model.target->contains(x);
}

}  // namespace

SynthesisResult value_iteration(const SystemModel& model, const AmbiguitySet& amb,
                                const StateGrid& grid, const SolverConfig& cfg,
                                SpecKind kind, bool record_q, InterpMode interp) {
  amb.validate();
  if (kind == SpecKind::reach_avoid && !model.target)
    throw std::invalid_argument("value_iteration: model has no target region");

  const int T = model.horizon;
  const std::size_t n = grid.total();
  auto inputs = enumerate_inputs(model.inputs, cfg.input_grid);
  const std::size_t ni = inputs.size();

  SynthesisResult out{
      ValueGrid(grid, T, kind, model.safe, model.target),
      PolicyTable(grid, T, inputs),
      std::nullopt,
  };
  out.values.interp = interp;
  if (record_q) {
    out.q.emplace();
    out.q->grid = grid;
    out.q->horizon = T;
    out.q->inputs = inputs;
    out.q->values.assign(static_cast<std::size_t>(T) * n * ni, 0.0);
  }

  ValueGrid& vg = out.values;
  PolicyTable& pol = out.policy;

  // terminal indicator
  {
    std::vector<double> x(grid.dim());
    for (std::size_t i = 0; i < n; ++i) {
      grid.node(i, x);
      bool one = kind == SpecKind::reach_avoid ? model.target->contains(x)
                                               : model.safe.contains(x);
      vg.at(T, i) = one ? 1.0 : 0.0;
    }
  }

  for (int t = T - 1; t >= 0; --t) {
    StateValueFn next = [&vg, t](std::span<const double> xp) {
      return query_value(vg, t + 1, xp);
    };
    parallel_for(n, cfg.workers, [&](std::size_t i) {
      std::vector<double> x(grid.dim());
      grid.node(i, x);
      if (in_target(model, kind, x)) {
        vg.at(t, i) = 1.0;
        pol.choice_at(t, i) = 0;
        if (out.q)
          for (std::size_t j = 0; j < ni; ++j) out.q->at(t, i, j) = 1.0;
        return;
      }
      if (!model.safe.contains(x)) {
        vg.at(t, i) = 0.0;
        pol.choice_at(t, i) = 0;
        return;  // q stays 0
      }
      double best = -1.0;
      int best_j = 0;
      for (std::size_t j = 0; j < ni; ++j) {
        DualSolveResult r = dual_value(next, model, x, inputs[j], amb, cfg);
        check_range(r.value);
        if (out.q) out.q->at(t, i, j) = r.value;
        if (r.value > best) {  // strict: ties keep the first input
          best = r.value;
          best_j = static_cast<int>(j);
        }
      }
      vg.at(t, i) = std::clamp(best, 0.0, 1.0);
      pol.choice_at(t, i) = best_j;
    });
  }
  return out;
}

std::vector<std::vector<double>> feasible_controls(const SystemModel& model,
                                                   const AmbiguitySet& amb,
                                                   const ValueGrid& vg, int t,
                                                   std::span<const double> x,
                                                   double alpha,
                                                   const SolverConfig& cfg) {
  if (t < 0 || t >= vg.horizon)
    throw std::out_of_range("feasible_controls: stage out of range");
  StateValueFn next = [&vg, t](std::span<const double> xp) {
    return query_value(vg, t + 1, xp);
  };
  std::vector<std::vector<double>> keep;
  for (const auto& r : dual_values_per_input(next, model, x, amb, cfg))
    if (r.value >= alpha) keep.push_back(r.u_star);
  return keep;
}

ValueGrid evaluate_fixed_distribution(const SystemModel& model,
                                      const PolicyTable& policy,
                                      const NominalDistribution& dist,
                                      const StateGrid& grid, SpecKind kind,
                                      InterpMode interp) {
  dist.validate();
  if (dist.dim() != model.l)
    throw std::invalid_argument("evaluate_fixed_distribution: disturbance dim");
  const int T = model.horizon;
  if (policy.horizon != T)
    throw std::invalid_argument("evaluate_fixed_distribution: horizon mismatch");

  ValueGrid vg(grid, T, kind, model.safe, model.target);
  vg.interp = interp;
  const std::size_t n = grid.total();
  std::vector<double> x(grid.dim());
  for (std::size_t i = 0; i < n; ++i) {
    grid.node(i, x);
    bool one = kind == SpecKind::reach_avoid
                   ? (model.target && model.target->contains(x))
                   : model.safe.contains(x);
    vg.at(T, i) = one ? 1.0 : 0.0;
  }
  for (int t = T - 1; t >= 0; --t) {
    for (std::size_t i = 0; i < n; ++i) {
      grid.node(i, x);
      if (in_target(model, kind, x)) {
        vg.at(t, i) = 1.0;
        continue;
      }
      if (!model.safe.contains(x)) {
        vg.at(t, i) = 0.0;
        continue;
      }
      const auto& u = policy.input_for_state(t, x);
      double acc = 0.0;
      for (int a = 0; a < dist.count(); ++a)
        acc += dist.probs[a] *
               query_value(vg, t + 1, model.step(x, u, dist.atoms[a]));
      vg.at(t, i) = std::clamp(acc, 0.0, 1.0);
    }
  }
  return vg;
}

std::pair<double, std::vector<double>> min_over_initial(const ValueGrid& vg,
                                                        const SystemModel& model,
                                                        double resolution) {
  std::optional<Box> bb = model.init.bounding_box();
  if (!bb) throw std::invalid_argument("min_over_initial: unbounded initial set");
  const int d = bb->dim();
  std::vector<int> counts(d);
  for (int k = 0; k < d; ++k) {
    int cells = static_cast<int>(std::floor(bb->side(k) / resolution + 1e-9));
    counts[k] = std::max(1, cells + 1);
  }
  std::vector<int> idx(d, 0);
  std::vector<double> probe(d);
  double best = 2.0;
  std::vector<double> arg;
  while (true) {
    for (int k = 0; k < d; ++k)
      probe[k] = counts[k] == 1
                     ? 0.5 * (bb->lo[k] + bb->hi[k])
                     : bb->lo[k] + bb->side(k) * idx[k] / (counts[k] - 1);
    if (model.init.contains(probe)) {
      double v = query_value(vg, 0, probe);
      if (v < best) {
        best = v;
        arg = probe;
      }
    }
    int k = d - 1;
    while (k >= 0 && ++idx[k] == counts[k]) idx[k--] = 0;
    if (k < 0) break;
  }
  if (arg.empty())
    throw std::runtime_error("min_over_initial: no probe point hit the initial set");
  return {best, arg};
}

PolicyTable derive_applied_policy(const QTable& q, double alpha,
                                  const PolicyTable* fallback) {
  if (fallback && fallback->inputs.size() != q.inputs.size())
    throw std::invalid_argument("derive_applied_policy: fallback input mismatch");
  PolicyTable pol(q.grid, q.horizon, q.inputs);
  const std::size_t n = q.grid.total();
  const std::size_t ni = q.inputs.size();
  for (int t = 0; t < q.horizon; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      int pick = -1;
      for (std::size_t j = 0; j < ni; ++j)
        if (q.at(t, i, j) >= alpha) {
          pick = static_cast<int>(j);
          break;
        }
      if (pick < 0) {
        bool all_equal = true;
        std::size_t arg = 0;
        for (std::size_t j = 1; j < ni; ++j) {
          if (q.at(t, i, j) != q.at(t, i, 0)) all_equal = false;
          if (q.at(t, i, j) > q.at(t, i, arg)) arg = j;
        }
        if (!all_equal)
          pick = static_cast<int>(arg);
        else
          pick = fallback ? fallback->choice_at(t, i) : 0;
      }
      pol.choice_at(t, i) = pick;
    }
  }
  return pol;
}

}  // namespace drc
