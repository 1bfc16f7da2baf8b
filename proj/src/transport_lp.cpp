#include "drc/transport_lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace drc {

namespace {

double dist_pow(const std::vector<double>& a, const std::vector<double>& b, double p) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::pow(std::sqrt(s), p);
}

// Solve A x = rhs in place, partial pivoting. Returns false when singular.
bool solve_dense(std::vector<std::vector<double>> A, std::vector<double> rhs,
                 std::vector<double>& x) {
  const int n = static_cast<int>(rhs.size());
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) piv = r;
    if (std::fabs(A[piv][c]) < 1e-12) return false;
    std::swap(A[piv], A[c]);
    std::swap(rhs[piv], rhs[c]);
    for (int r = c + 1; r < n; ++r) {
      double f = A[r][c] / A[c][c];
      if (f == 0.0) continue;
      for (int k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      rhs[r] -= f * rhs[c];
    }
  }
  x.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = rhs[r];
    for (int k = r + 1; k < n; ++k) s -= A[r][k] * x[k];
    x[r] = s / A[r][r];
  }
  return true;
}

}  // namespace

WorstCaseResult primal_worst_case(const std::vector<std::vector<double>>& grid_points,
                                  const std::vector<double>& grid_values,
                                  const NominalDistribution& nominal, double theta,
                                  double p) {
  if (grid_points.empty() || grid_points.size() != grid_values.size())
    throw std::invalid_argument("primal_worst_case: bad grid");
  const int M = nominal.count();
  const int K = static_cast<int>(grid_points.size());
  if (M * K > 40)
    throw std::invalid_argument("primal_worst_case: instance too large (oracle path)");

  const int nvars = M * K + 1;  // transport entries + budget slack
  const int nrows = M + 1;
  const double budget = std::pow(theta, p);

  std::vector<double> cost(static_cast<std::size_t>(M) * K);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < K; ++j)
      cost[static_cast<std::size_t>(i) * K + j] =
          dist_pow(grid_points[j], nominal.atoms[i], p);

  // column c of the constraint matrix
  auto column = [&](int c, std::vector<double>& col) {
    col.assign(nrows, 0.0);
    if (c == nvars - 1) {
      col[M] = 1.0;  // slack
      return;
    }
    int i = c / K;
    col[i] = 1.0;
    col[M] = cost[c];
  };

  std::vector<double> rhs(nrows);
  for (int i = 0; i < M; ++i) rhs[i] = nominal.probs[i];
  rhs[M] = budget;

  WorstCaseResult best;
  best.value = std::numeric_limits<double>::infinity();

  std::vector<int> basis(nrows);
  for (int i = 0; i < nrows; ++i) basis[i] = i;
  std::vector<double> col, xb;
  std::vector<std::vector<double>> B(nrows, std::vector<double>(nrows));

  while (true) {
    for (int r = 0; r < nrows; ++r) {
      column(basis[r], col);
      for (int q = 0; q < nrows; ++q) B[q][r] = col[q];
    }
    if (solve_dense(B, rhs, xb)) {
      bool ok = true;
      for (double v : xb)
        if (v < -1e-9) { ok = false; break; }
      if (ok) {
        double obj = 0.0;
        for (int r = 0; r < nrows; ++r)
          if (basis[r] != nvars - 1) obj += grid_values[basis[r] % K] * xb[r];
        if (obj < best.value - 1e-15) {
          best.value = obj;
          best.feasible = true;
          best.marginal.assign(K, 0.0);
          for (int r = 0; r < nrows; ++r)
            if (basis[r] != nvars - 1)
              best.marginal[basis[r] % K] += std::max(xb[r], 0.0);
        }
      }
    }
    // next combination, lexicographic
    int pos = nrows - 1;
    while (pos >= 0 && basis[pos] == nvars - nrows + pos) --pos;
    if (pos < 0) break;
    ++basis[pos];
    for (int q = pos + 1; q < nrows; ++q) basis[q] = basis[q - 1] + 1;
  }
  return best;
}

}  // namespace drc
