#include "drc/dual.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace drc {

namespace {

double dist_pow(std::span<const double> a, std::span<const double> b, double p) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  if (p == 2.0) return s;
  if (p == 1.0) return std::sqrt(s);
  return std::pow(std::sqrt(s), p);
}

// inclusive per-dimension linspace, cartesian product in row-major order
void product_grid(const Box& box, int pts_per_dim,
                  std::vector<std::vector<double>>& out) {
  const int d = box.dim();
  std::vector<std::vector<double>> axes(d);
  for (int k = 0; k < d; ++k) {
    axes[k].resize(pts_per_dim);
    if (pts_per_dim == 1) {
      axes[k][0] = 0.5 * (box.lo[k] + box.hi[k]);
    } else {
      double h = (box.hi[k] - box.lo[k]) / (pts_per_dim - 1);
      for (int i = 0; i < pts_per_dim; ++i) axes[k][i] = box.lo[k] + h * i;
    }
  }
  std::vector<int> idx(d, 0);
  std::vector<double> pt(d);
  while (true) {
    for (int k = 0; k < d; ++k) pt[k] = axes[k][idx[k]];
    out.push_back(pt);
    int k = d - 1;
    while (k >= 0 && ++idx[k] == pts_per_dim) idx[k--] = 0;
    if (k < 0) break;
  }
}

// Shared solve over a fixed candidate set. costs[i*K+j] = d(w_j, atom_i)^p.
struct FixedSetDual {
  const std::vector<double>& vals;
  const std::vector<double>& costs;
  const std::vector<double>& probs;
  int M, K;

  double l_i(int i, double lambda, int* arg = nullptr) const {
    const double* c = costs.data() + static_cast<std::size_t>(i) * K;
    double best = vals[0] + lambda * c[0];
    int bj = 0;
    for (int j = 1; j < K; ++j) {
      double t = vals[j] + lambda * c[j];
      if (t < best) { best = t; bj = j; }
    }
    if (arg) *arg = bj;
    return best;
  }

  double g(double lambda, double theta_pow) const {
    double s = 0.0;
    for (int i = 0; i < M; ++i) s += probs[i] * l_i(i, lambda);
    return s - lambda * theta_pow;
  }

  // concave 1-D maximization; endpoints are evaluated explicitly so the
  // degenerate optima (lambda = 0: plain grid minimum) are exact
  std::pair<double, double> maximize(double lambda_max, double tol,
                                     double theta_pow) const {
    double lo = 0.0, hi = lambda_max;
    while (hi - lo > tol) {
      double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (g(m1, theta_pow) < g(m2, theta_pow))
        lo = m1;
      else
        hi = m2;
    }
    double lam = 0.5 * (lo + hi);
    double best = g(lam, theta_pow);
    double g0 = g(0.0, theta_pow);
    if (g0 > best) { best = g0; lam = 0.0; }
    double gmax = g(lambda_max, theta_pow);
    if (gmax > best) { best = gmax; lam = lambda_max; }
    return {best, lam};
  }
};

}  // namespace

std::pair<double, std::vector<double>> inner_inf(
    const StateValueFn& v, const SystemModel& model, std::span<const double> x,
    std::span<const double> u, double lambda, std::span<const double> atom, double p,
    const SolverConfig& cfg) {
  if (lambda < 0.0) throw std::invalid_argument("inner_inf: lambda must be >= 0");
  auto score = [&](std::span<const double> w) {
    return v(model.step(x, u, w)) + lambda * dist_pow(w, atom, p);
  };
  std::vector<std::vector<double>> cands;
  product_grid(model.disturbance_box, cfg.disturbance_grid_initial, cands);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> wstar;
  auto scan = [&](const std::vector<std::vector<double>>& set) {
    for (const auto& w : set) {
      double s = score(w);
      if (s < best) { best = s; wstar = w; }
    }
  };
  scan(cands);
  const Box& W = model.disturbance_box;
  for (int r = 1; r <= cfg.refinement_rounds; ++r) {
    Box sub;
    sub.lo.resize(W.dim());
    sub.hi.resize(W.dim());
    for (int k = 0; k < W.dim(); ++k) {
      double half = 0.5 * W.side(k) * std::pow(cfg.refinement_shrink, r);
      sub.lo[k] = std::max(W.lo[k], wstar[k] - half);
      sub.hi[k] = std::min(W.hi[k], wstar[k] + half);
    }
    std::vector<std::vector<double>> refined;
    product_grid(sub, cfg.disturbance_grid_initial, refined);
    scan(refined);
  }
  return {best, wstar};
}

DiscreteDualResult dual_value_discrete(const std::vector<std::vector<double>>& grid,
                                       const std::vector<double>& values,
                                       const NominalDistribution& nominal,
                                       double theta, double p, double lambda_tol,
                                       double value_range) {
  if (grid.empty() || grid.size() != values.size())
    throw std::invalid_argument("dual_value_discrete: bad grid");
  const int M = nominal.count();
  const int K = static_cast<int>(grid.size());
  std::vector<double> costs(static_cast<std::size_t>(M) * K);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < K; ++j)
      costs[static_cast<std::size_t>(i) * K + j] =
          dist_pow(grid[j], nominal.atoms[i], p);
  FixedSetDual fs{values, costs, nominal.probs, M, K};

  DiscreteDualResult out;
  const double theta_pow = std::pow(theta, p);
  if (theta == 0.0) {
    // nominal expectation over the grid-restricted atoms: every atom must be
    // a grid point for the restriction to make sense
    out.lambda_star = 0.0;
    out.l.resize(M);
    out.argmin.resize(M);
    double val = 0.0;
    for (int i = 0; i < M; ++i) {
      int j = -1;
      for (int q = 0; q < K; ++q)
        if (grid[q] == nominal.atoms[i]) { j = q; break; }
      if (j < 0)
        throw std::invalid_argument("dual_value_discrete: theta=0 needs atoms on grid");
      out.l[i] = values[j];
      out.argmin[i] = j;
      val += nominal.probs[i] * values[j];
    }
    out.value = val;
    return out;
  }
  const double lambda_max = value_range / theta_pow;
  auto [val, lam] = fs.maximize(lambda_max, lambda_tol, theta_pow);
  out.lambda_star = lam;
  out.l.resize(M);
  out.argmin.resize(M);
  double rebuilt = -lam * theta_pow;
  for (int i = 0; i < M; ++i) {
    out.l[i] = fs.l_i(i, lam, &out.argmin[i]);
    rebuilt += nominal.probs[i] * out.l[i];
  }
  out.value = rebuilt;  // value always equals its reported parts
  (void)val;
  return out;
}

DualSolveResult dual_value(const StateValueFn& v, const SystemModel& model,
                           std::span<const double> x, std::span<const double> u,
                           const AmbiguitySet& amb, const SolverConfig& cfg,
                           double value_range) {
  const int M = amb.nominal.count();
  auto vf = [&](std::span<const double> w) { return v(model.step(x, u, w)); };

  DualSolveResult out;
  out.u_star.assign(u.begin(), u.end());

  if (amb.theta == 0.0) {
    double val = 0.0;
    out.inner_minimizers.reserve(M);
    for (int i = 0; i < M; ++i) {
      double li = vf(amb.nominal.atoms[i]);
      out.inner_minimizers.emplace_back(amb.nominal.atoms[i], li);
      val += amb.nominal.probs[i] * li;
    }
    out.value = val;
    out.lambda_unbounded = true;  // multiplier is +infinity in the limit
    out.lambda_star = 0.0;
    return out;
  }

  // candidate pool: coarse grid over W, the atoms themselves (so the nominal
  // expectation stays an upper bound), then per-atom refinements
  std::vector<std::vector<double>> cands;
  product_grid(model.disturbance_box, cfg.disturbance_grid_initial, cands);
  for (const auto& a : amb.nominal.atoms) cands.push_back(a);

  std::vector<double> vals;
  vals.reserve(cands.size());
  for (const auto& w : cands) vals.push_back(vf(w));

  const double p = amb.p;
  const double theta_pow = std::pow(amb.theta, p);
  const double lambda_max = value_range / theta_pow;

  auto build_costs = [&](std::vector<double>& costs) {
    const int K = static_cast<int>(cands.size());
    costs.resize(static_cast<std::size_t>(M) * K);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < K; ++j)
        costs[static_cast<std::size_t>(i) * K + j] =
            dist_pow(cands[j], amb.nominal.atoms[i], p);
  };

  std::vector<double> costs;
  build_costs(costs);
  double lam = 0.0;
  const Box& W = model.disturbance_box;
  for (int r = 0; r <= cfg.refinement_rounds; ++r) {
    FixedSetDual fs{vals, costs, amb.nominal.probs, M, static_cast<int>(cands.size())};
    lam = fs.maximize(lambda_max, cfg.lambda_tolerance, theta_pow).second;
    if (r == cfg.refinement_rounds) break;
    // refine each atom's incumbent minimizer at the current multiplier
    std::size_t old_count = cands.size();
    for (int i = 0; i < M; ++i) {
      int jstar = 0;
      fs.l_i(i, lam, &jstar);
      Box sub;
      sub.lo.resize(W.dim());
      sub.hi.resize(W.dim());
      for (int k = 0; k < W.dim(); ++k) {
        double half = 0.5 * W.side(k) * std::pow(cfg.refinement_shrink, r + 1);
        sub.lo[k] = std::max(W.lo[k], cands[jstar][k] - half);
        sub.hi[k] = std::min(W.hi[k], cands[jstar][k] + half);
      }
      product_grid(sub, cfg.disturbance_grid_initial, cands);
    }
    for (std::size_t j = old_count; j < cands.size(); ++j) vals.push_back(vf(cands[j]));
    build_costs(costs);
  }

  FixedSetDual fs{vals, costs, amb.nominal.probs, M, static_cast<int>(cands.size())};
  // assemble the reported value from its parts at the winning multiplier so
  // the value/lambda/l_i triple is self-consistent by construction
  auto assemble = [&](double lambda) {
    double val = -lambda * theta_pow;
    std::vector<std::pair<std::vector<double>, double>> mins;
    mins.reserve(M);
    for (int i = 0; i < M; ++i) {
      int jstar = 0;
      double li = fs.l_i(i, lambda, &jstar);
      mins.emplace_back(cands[jstar], li);
      val += amb.nominal.probs[i] * li;
    }
    return std::make_pair(val, std::move(mins));
  };
  auto [val, mins] = assemble(lam);
  for (double cand_lam : {0.0, lambda_max}) {
    auto [v2, m2] = assemble(cand_lam);
    if (v2 > val) {
      val = v2;
      mins = std::move(m2);
      lam = cand_lam;
    }
  }
  out.value = val;
  out.lambda_star = lam;
  out.inner_minimizers = std::move(mins);
  out.refinement_levels = cfg.refinement_rounds;
  return out;
}

std::vector<std::vector<double>> enumerate_inputs(const InputSet& inputs,
                                                  int input_grid) {
  if (inputs.kind == InputSet::Kind::finite) return inputs.points;
  std::vector<std::vector<double>> grid;
  product_grid(inputs.bound, input_grid, grid);
  std::erase_if(grid, [&](const std::vector<double>& u) {
    return !inputs.contains(u, 1e-9);
  });
  if (grid.empty())
    throw std::runtime_error("input enumeration: empty feasible grid");
  return grid;
}

std::vector<DualSolveResult> dual_values_per_input(const StateValueFn& v,
                                                   const SystemModel& model,
                                                   std::span<const double> x,
                                                   const AmbiguitySet& amb,
                                                   const SolverConfig& cfg) {
  auto inputs = enumerate_inputs(model.inputs, cfg.input_grid);
  std::vector<DualSolveResult> results;
  results.reserve(inputs.size());
  for (const auto& u : inputs)
    results.push_back(dual_value(v, model, x, u, amb, cfg));
  return results;
}

DualSolveResult robust_bellman(const StateValueFn& v, const SystemModel& model,
                               std::span<const double> x, const AmbiguitySet& amb,
                               const SolverConfig& cfg) {
  auto results = dual_values_per_input(v, model, x, amb, cfg);
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].value > results[best].value) best = i;  // ties keep first
  return results[best];
}

}  // namespace drc
