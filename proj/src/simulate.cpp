#include "drc/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "drc/parallel.hpp"

namespace drc {

namespace {

std::vector<double> draw_initial(const SystemModel& model, const SimulationConfig& sim,
                                 const std::vector<std::vector<double>>& probes,
                                 int trial, SplitRng& rng) {
  switch (sim.init_mode) {
    case InitMode::fixed:
      return sim.fixed_x0;
    case InitMode::grid:
      return probes[static_cast<std::size_t>(trial) % probes.size()];
    case InitMode::uniform:
      break;
  }
  std::optional<Box> bb = model.init.bounding_box();
  if (!bb) throw std::runtime_error("monte_carlo: initial set lacks a bounding box");
  std::vector<double> x(bb->dim());
  for (int attempt = 0; attempt < sim.max_init_attempts; ++attempt) {
    for (int k = 0; k < bb->dim(); ++k) x[k] = rng.uniform(bb->lo[k], bb->hi[k]);
    if (model.init.contains(x)) return x;
  }
  throw std::runtime_error("monte_carlo: initial-state rejection sampling stalled");
}

std::vector<double> apply_policy(const SystemModel& model, const PolicySource& source,
                                 int t, std::span<const double> x) {
  if (std::holds_alternative<const PolicyTable*>(source))
    return std::get<const PolicyTable*>(source)->input_for_state(t, x);
  const CertificateCandidate* cand = std::get<const CertificateCandidate*>(source);
  std::vector<double> u = cand->control_at(x);
  const Box& b = model.inputs.bound;
  if (b.dim() == static_cast<int>(u.size()))
    for (int k = 0; k < b.dim(); ++k) u[k] = std::clamp(u[k], b.lo[k], b.hi[k]);
  return u;
}

struct Verdict {
  bool decided = false;
  bool success = false;
};

Verdict classify(const SystemModel& model, SpecKind kind, std::span<const double> x,
                 bool last_stage) {
  if (kind == SpecKind::reach_avoid) {
    if (model.target->contains(x)) return {true, true};
    if (!model.safe.contains(x)) return {true, false};
    if (last_stage) return {true, false};  // horizon exhausted outside target
    return {false, false};
  }
  if (!model.safe.contains(x)) return {true, false};
  if (last_stage) return {true, true};
  return {false, false};
}

}  // namespace

std::pair<double, double> wilson_interval(int successes, int trials) {
  if (trials <= 0) return {0.0, 1.0};
  const double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = trials;
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

SimulationReport monte_carlo(const SystemModel& model, PolicySource source,
                             const SimulationConfig& sim) {
  if (sim.trials < 1) throw std::invalid_argument("monte_carlo: trials >= 1");
  if (sim.kind == SpecKind::reach_avoid && !model.target)
    throw std::invalid_argument("monte_carlo: model has no target region");
  if (sim.dist.dim() != model.l)
    throw std::invalid_argument("monte_carlo: disturbance dimension mismatch");
  if (sim.init_mode == InitMode::fixed &&
      static_cast<int>(sim.fixed_x0.size()) != model.n)
    throw std::invalid_argument("monte_carlo: fixed_x0 dimension mismatch");

  std::vector<std::vector<double>> probes;
  if (sim.init_mode == InitMode::grid) {
    std::optional<Box> bb = model.init.bounding_box();
    if (!bb) throw std::invalid_argument("monte_carlo: initial set lacks a bounding box");
    int per_dim = 1;
    for (int k = 0; k < bb->dim(); ++k) {
      int cells =
          static_cast<int>(std::floor(bb->side(k) / sim.init_resolution + 1e-9));
      per_dim = std::max(per_dim, cells + 1);
    }
    for (auto& pt : box_grid(*bb, per_dim))
      if (model.init.contains(pt)) probes.push_back(std::move(pt));
    if (probes.empty())
      throw std::runtime_error("monte_carlo: no grid probe hit the initial set");
  }

  std::vector<char> outcome(sim.trials, 0);
  std::vector<TrialLog> logs;
  if (sim.log_trajectories) logs.resize(sim.trials);

  parallel_for(static_cast<std::size_t>(sim.trials), sim.workers, [&](std::size_t i) {
    SplitRng rng = SplitRng::child(sim.seed, static_cast<std::uint64_t>(i));
    std::vector<double> x =
        draw_initial(model, sim, probes, static_cast<int>(i), rng);
    TrialLog* log = sim.log_trajectories ? &logs[i] : nullptr;
    if (log) log->states.push_back(x);
    Verdict v = classify(model, sim.kind, x, model.horizon == 0);
    for (int t = 0; t < model.horizon && !v.decided; ++t) {
      const std::vector<double> u = apply_policy(model, source, t, x);
      const std::vector<double> w = sim.dist.sample(rng);
      x = model.step(x, u, w);
      if (log) log->states.push_back(x);
      v = classify(model, sim.kind, x, t + 1 == model.horizon);
    }
    outcome[i] = v.success ? 1 : 0;
    if (log) log->success = v.success;
  });

  SimulationReport rep;
  rep.trials = sim.trials;
  for (char c : outcome) rep.successes += c;
  rep.rate = static_cast<double>(rep.successes) / rep.trials;
  std::tie(rep.wilson_lo, rep.wilson_hi) = wilson_interval(rep.successes, rep.trials);
  rep.logs = std::move(logs);
  return rep;
}

bool rescore_path(const SystemModel& model, SpecKind kind,
                  const std::vector<std::vector<double>>& states) {
  if (states.empty()) throw std::invalid_argument("rescore_path: empty path");
  if (kind == SpecKind::safety) {
    double prod = 1.0;
    for (const auto& x : states) prod *= model.safe.contains(x) ? 1.0 : 0.0;
    // a decided-early log is shorter than T+1 exactly when some factor is 0,
    // so the truncated product equals the full-horizon product
    return prod == 1.0 && static_cast<int>(states.size()) == model.horizon + 1;
  }
  double total = 0.0;
  double running = 1.0;  // product of 1_{S minus G} over strictly earlier states
  for (const auto& x : states) {
    const double in_g = model.target->contains(x) ? 1.0 : 0.0;
    total += in_g * running;
    const double in_s_not_g =
        (model.safe.contains(x) && !model.target->contains(x)) ? 1.0 : 0.0;
    running *= in_s_not_g;
  }
  return total >= 1.0;
}

}  // namespace drc
