#pragma once

// Slow, independent reference solver for the C-SVM dual, used only to verify
// the SMO implementation. Projected gradient descent with an exact projection
// onto the feasible set {0 <= alpha <= C, y'alpha = 0} (bisection on the
// equality multiplier). Nothing here is shared with the library's solver.

#include <algorithm>
#include <cmath>
#include <vector>

namespace spktest {

inline double dual_objective(const std::vector<double>& K, const std::vector<int>& y,
                             const std::vector<double>& alpha) {
  std::size_t n = y.size();
  double quad = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      quad += alpha[i] * alpha[j] * y[i] * y[j] * K[i * n + j];
    }
    lin += alpha[i];
  }
  return 0.5 * quad - lin;
}

// Projects v onto the box-and-hyperplane set by bisection on nu in
// clip(v - nu*y, 0, C); the constraint value is monotone in nu.
inline std::vector<double> project_feasible(const std::vector<double>& v,
                                            const std::vector<int>& y, double C) {
  std::size_t n = y.size();
  auto constraint = [&](double nu) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += y[i] * std::clamp(v[i] - nu * y[i], 0.0, C);
    }
    return s;
  };
  double lo = -1.0, hi = 1.0;
  while (constraint(lo) < 0.0) lo *= 2.0;  // constraint decreasing in nu
  while (constraint(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (constraint(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  double nu = 0.5 * (lo + hi);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::clamp(v[i] - nu * y[i], 0.0, C);
  return out;
}

// Minimizes 0.5 a'Qa - e'a over the feasible set. Step size from the
// Gershgorin bound on Q's spectral radius; exits early once the objective
// plateaus (checked every 200 iterations).
inline std::vector<double> reference_svm_solve(const std::vector<double>& K,
                                               const std::vector<int>& y, double C,
                                               int iterations = 20000) {
  std::size_t n = y.size();
  double lmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::fabs(K[i * n + j]);
    lmax = std::max(lmax, row);
  }
  double eta = 1.0 / std::max(lmax, 1e-12);
  std::vector<double> alpha = project_feasible(std::vector<double>(n, 0.0), y, C);
  std::vector<double> grad(n), step(n);
  double last_obj = dual_objective(K, y, alpha);
  for (int it = 0; it < iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double g = -1.0;
      for (std::size_t j = 0; j < n; ++j) {
        g += y[i] * y[j] * K[i * n + j] * alpha[j];
      }
      grad[i] = g;
    }
    for (std::size_t i = 0; i < n; ++i) step[i] = alpha[i] - eta * grad[i];
    alpha = project_feasible(step, y, C);
    if (it % 200 == 199) {
      double obj = dual_objective(K, y, alpha);
      if (last_obj - obj <= 1e-15 * std::max(1.0, std::fabs(obj))) return alpha;
      last_obj = obj;
    }
  }
  return alpha;
}

}  // namespace spktest
