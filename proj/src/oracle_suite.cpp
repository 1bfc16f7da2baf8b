#include "drc/oracle_suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "drc/poly.hpp"
#include "drc/rng.hpp"
#include "drc/synthesis.hpp"
#include "drc/transport_lp.hpp"

namespace drc {

namespace {

constexpr std::uint64_t kDualityMaster = 1142;

double grid_diameter(const std::vector<std::vector<double>>& grid, double p) {
  double d = 0.0;
  for (const auto& a : grid)
    for (const auto& b : grid) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
      s = std::sqrt(s);
      d = std::max(d, std::pow(s, p));
    }
  return d;
}

}  // namespace

DualityFixture random_duality_fixture(std::uint64_t index) {
  SplitRng rng = SplitRng::child(kDualityMaster, index);
  DualityFixture fx;
  int K = 2 + static_cast<int>(rng.next_u64() % 4);
  fx.grid.reserve(K);
  for (int j = 0; j < K; ++j) fx.grid.push_back({rng.uniform(-1.0, 1.0)});
  fx.values.reserve(K);
  for (int j = 0; j < K; ++j) fx.values.push_back(rng.next_double());
  int M = std::min(1 + static_cast<int>(rng.next_u64() % 3), K);
  std::vector<std::size_t> picked;
  while (static_cast<int>(picked.size()) < M) {
    std::size_t pick = static_cast<std::size_t>(rng.next_u64() % static_cast<std::uint64_t>(K));
    if (std::find(picked.begin(), picked.end(), pick) != picked.end()) continue;
    picked.push_back(pick);
    fx.nominal.atoms.push_back(fx.grid[pick]);
    fx.nominal.probs.push_back(rng.uniform(0.1, 1.0));
  }
  double total = 0.0;
  for (double w : fx.nominal.probs) total += w;
  for (double& w : fx.nominal.probs) w /= total;
  fx.p = (index % 3 == 0) ? 2.0 : 1.0;
  switch (index % 10) {
    case 0: fx.theta = 0.0; break;
    case 1: fx.theta = grid_diameter(fx.grid, fx.p) + 0.5; break;
    default: fx.theta = rng.uniform(0.0, 1.0); break;
  }
  fx.nominal.validate();
  return fx;
}

DualityCheck duality_check(const DualityFixture& fx) {
  double lo = fx.values[0], hi = fx.values[0];
  for (double v : fx.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  DualityCheck ck;
  ck.dual = dual_value_discrete(fx.grid, fx.values, fx.nominal, fx.theta, fx.p,
                                1e-12, std::max(hi - lo, 1e-9))
                .value;
  WorstCaseResult primal =
      primal_worst_case(fx.grid, fx.values, fx.nominal, fx.theta, fx.p);
  if (!primal.feasible)
    throw std::logic_error("transport oracle reported an infeasible ball");
  ck.primal = primal.value;
  ck.gap = std::abs(ck.dual - ck.primal);
  return ck;
}

SuiteReport duality_suite(int count, double tol) {
  SuiteReport rep;
  for (int i = 0; i < count; ++i) {
    DualityFixture fx = random_duality_fixture(static_cast<std::uint64_t>(i));
    DualityCheck ck = duality_check(fx);
    ++rep.checked;
    if (ck.gap > rep.worst) {
      rep.worst = ck.gap;
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "fixture %d (K=%zu, M=%d, theta=%.6g, p=%g): dual %.12g vs primal %.12g",
                    i, fx.grid.size(), fx.nominal.count(), fx.theta, fx.p, ck.dual,
                    ck.primal);
      rep.worst_detail = buf;
    }
  }
  rep.pass = rep.worst <= tol;
  return rep;
}

GameInstance make_game_instance(SpecKind kind, double theta, double p,
                                int atoms_variant, int target_variant) {
  GameInstance inst;
  inst.kind = kind;

  SystemModel& s = inst.model;
  s.name = "finite_game";
  s.n = 1;
  s.m = 1;
  s.l = 1;
  s.inputs = InputSet::finite({{-1.0}, {0.0}, {1.0}});
  s.disturbance_box = Box{{-1.0}, {1.0}};
  s.dynamics = {Polynomial(3, {{{1, 0, 0}, 1.0}, {{0, 1, 0}, 1.0}, {{0, 0, 1}, 1.0}})};
  s.horizon = 3;
  s.init = Region::make_box(Box{{0.0}, {4.0}});
  if (kind == SpecKind::reach_avoid) {
    s.safe = Region::make_box(Box{{-10.0}, {10.0}});
    s.target = Region::make_box(target_variant == 0 ? Box{{2.0}, {2.0}}
                                                    : Box{{1.0}, {3.0}});
  } else {
    // upper cutoff between nodes 3 and 4 so one grid node is genuinely unsafe
    s.safe = Region::make_box(Box{{-10.0}, {3.5}});
  }

  inst.grid = StateGrid(Box{{0.0}, {4.0}}, std::vector<int>{5});
  inst.wgrid = {{-1.0}, {0.0}, {1.0}};

  switch (atoms_variant) {
    case 0:
      inst.amb.nominal.atoms = {{0.0}};
      inst.amb.nominal.probs = {1.0};
      break;
    case 1:
      inst.amb.nominal.atoms = {{-1.0}, {1.0}};
      inst.amb.nominal.probs = {0.5, 0.5};
      break;
    case 2:
      inst.amb.nominal.atoms = {{-1.0}, {0.0}};
      inst.amb.nominal.probs = {0.3, 0.7};
      break;
    default:
      throw std::invalid_argument("unknown atoms variant");
  }
  inst.amb.theta = theta;
  inst.amb.p = p;
  inst.amb.validate();

  // pin the solver's disturbance candidates to exactly {-1, 0, 1}
  inst.solver.disturbance_grid_initial = 3;
  inst.solver.refinement_rounds = 0;
  inst.solver.lambda_tolerance = 1e-12;
  inst.solver.workers = 1;
  return inst;
}

namespace {

/// Memoized game tree. Landed states resolve exactly like query_value:
/// indicator checks on the landed point first, then the nearest node.
struct TreeEval {
  const GameInstance& inst;
  std::vector<double> memo;
  std::vector<char> ready;

  explicit TreeEval(const GameInstance& gi)
      : inst(gi),
        memo(static_cast<std::size_t>(gi.model.horizon + 1) * gi.grid.total(), 0.0),
        ready(memo.size(), 0) {}

  double landed(int t, double x) {
    const double xv[1] = {x};
    if (inst.kind == SpecKind::reach_avoid && inst.model.target->contains(xv))
      return 1.0;
    if (!inst.model.safe.contains(xv)) return 0.0;
    return node(t, inst.grid.nearest(xv));
  }

  double node(int t, std::size_t idx) {
    std::size_t slot = static_cast<std::size_t>(t) * inst.grid.total() + idx;
    if (ready[slot]) return memo[slot];
    double x = inst.grid.node(idx)[0];
    const double xv[1] = {x};
    double v;
    bool in_target =
        inst.kind == SpecKind::reach_avoid && inst.model.target->contains(xv);
    bool in_safe = inst.model.safe.contains(xv);
    if (t == inst.model.horizon) {
      v = inst.kind == SpecKind::reach_avoid ? (in_target ? 1.0 : 0.0)
                                             : (in_safe ? 1.0 : 0.0);
    } else if (in_target) {
      v = 1.0;
    } else if (!in_safe) {
      v = 0.0;
    } else {
      v = 0.0;
      std::vector<double> child(inst.wgrid.size());
      for (const auto& u : inst.model.inputs.points) {
        for (std::size_t j = 0; j < inst.wgrid.size(); ++j)
          child[j] = landed(t + 1, x + u[0] + inst.wgrid[j][0]);
        WorstCaseResult r = primal_worst_case(inst.wgrid, child, inst.amb.nominal,
                                              inst.amb.theta, inst.amb.p);
        if (!r.feasible)
          throw std::logic_error("game adversary: infeasible transport ball");
        v = std::max(v, r.value);
      }
    }
    memo[slot] = v;
    ready[slot] = 1;
    return v;
  }
};

}  // namespace

std::vector<std::vector<double>> exhaustive_game_values(const GameInstance& inst) {
  TreeEval tree(inst);
  std::vector<std::vector<double>> out(
      static_cast<std::size_t>(inst.model.horizon) + 1,
      std::vector<double>(inst.grid.total(), 0.0));
  for (int t = inst.model.horizon; t >= 0; --t)
    for (std::size_t i = 0; i < inst.grid.total(); ++i)
      out[static_cast<std::size_t>(t)][i] = tree.node(t, i);
  return out;
}

SuiteReport game_suite(double tol) {
  struct Case {
    double theta;
    double p;
    int atoms;
  };
  const Case cases[] = {
      {0.0, 1.0, 0}, {0.3, 1.0, 1}, {0.3, 1.0, 2}, {2.5, 1.0, 1}, {0.3, 2.0, 2}};

  SuiteReport rep;
  for (SpecKind kind : {SpecKind::reach_avoid, SpecKind::safety}) {
    for (const Case& c : cases) {
      GameInstance inst = make_game_instance(kind, c.theta, c.p, c.atoms);
      SynthesisResult dp =
          value_iteration(inst.model, inst.amb, inst.grid, inst.solver, kind);
      auto tree = exhaustive_game_values(inst);
      for (int t = 0; t <= inst.model.horizon; ++t)
        for (std::size_t i = 0; i < inst.grid.total(); ++i) {
          double diff =
              std::abs(dp.values.at(t, i) - tree[static_cast<std::size_t>(t)][i]);
          ++rep.checked;
          if (diff > rep.worst) {
            rep.worst = diff;
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "%s theta=%g p=%g atoms=%d stage=%d node=%zu: dp %.12g vs tree %.12g",
                          kind == SpecKind::reach_avoid ? "reach_avoid" : "safety",
                          c.theta, c.p, c.atoms, t, i, dp.values.at(t, i),
                          tree[static_cast<std::size_t>(t)][i]);
            rep.worst_detail = buf;
          }
        }
    }
  }
  bool mono_ok = true;
  std::string mono_detail;
  for (const Case& c : {Case{0.0, 1.0, 0}, Case{0.3, 1.0, 1}}) {
    GameInstance small = make_game_instance(SpecKind::reach_avoid, c.theta, c.p, c.atoms, 0);
    GameInstance large = make_game_instance(SpecKind::reach_avoid, c.theta, c.p, c.atoms, 1);
    SynthesisResult vs =
        value_iteration(small.model, small.amb, small.grid, small.solver, small.kind);
    SynthesisResult vl =
        value_iteration(large.model, large.amb, large.grid, large.solver, large.kind);
    for (int t = 0; t <= small.model.horizon; ++t)
      for (std::size_t i = 0; i < small.grid.total(); ++i) {
        ++rep.checked;
        if (vl.values.at(t, i) < vs.values.at(t, i) - 1e-12) {
          mono_ok = false;
          char buf[160];
          std::snprintf(buf, sizeof buf,
                        "target-monotonicity violated at theta=%g stage=%d node=%zu: %.12g > %.12g",
                        c.theta, t, i, vs.values.at(t, i), vl.values.at(t, i));
          mono_detail = buf;
        }
      }
  }
  rep.pass = rep.worst <= tol && mono_ok;
  if (!mono_ok) rep.worst_detail = mono_detail;
  return rep;
}

}  // namespace drc
