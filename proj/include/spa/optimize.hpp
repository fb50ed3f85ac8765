#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "spa/types.hpp"

namespace spa {

struct NelderMeadOptions {
  int max_evaluations = 2000;
  /// Stop when (f_worst - f_best) <= tol * (|f_best| + tol).
  double tolerance = 1e-8;
  /// Initial simplex edge per coordinate.
  double initial_step = 0.5;
  /// Fresh simplexes built around the incumbent after convergence.
  int max_restarts = 3;
};

struct NelderMeadResult {
  VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int evaluations = 0;
  int restarts = 0;
  bool converged = false;
};

/// Minimizes f by the Nelder-Mead simplex method (reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2). Non-finite values are treated as +inf.
/// After convergence the search restarts from the best point and stops when
/// a restart no longer improves the objective beyond the tolerance.
template <typename F>
NelderMeadResult nelder_mead(F&& f, const VectorXd& x0, const NelderMeadOptions& opt = {}) {
  const Eigen::Index d = x0.size();
  NelderMeadResult res;
  auto eval = [&](const VectorXd& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  auto flat = [&](double lo, double hi) { return hi - lo <= opt.tolerance * (std::abs(lo) + opt.tolerance); };

  VectorXd best = x0;
  double best_value = eval(best);
  for (int round = 0; round <= opt.max_restarts; ++round) {
    res.restarts = round;
    std::vector<VectorXd> pts(static_cast<std::size_t>(d) + 1, best);
    std::vector<double> vals(pts.size(), best_value);
    for (Eigen::Index i = 0; i < d; ++i) {
      pts[i + 1][i] += opt.initial_step;
      vals[i + 1] = eval(pts[i + 1]);
    }
    std::vector<std::size_t> order(pts.size());
    bool done = false;
    while (res.evaluations < opt.max_evaluations) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
      const std::size_t lo = order.front();
      const std::size_t hi = order.back();
      const std::size_t next = order[order.size() - 2];
      if (std::isfinite(vals[hi]) && flat(vals[lo], vals[hi])) {
        done = true;
        break;
      }
      VectorXd centroid = VectorXd::Zero(d);
      for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k != hi) centroid += pts[k];
      }
      centroid /= double(d);

      const VectorXd xr = centroid + (centroid - pts[hi]);
      const double fr = eval(xr);
      if (fr < vals[lo]) {
        const VectorXd xe = centroid + 2.0 * (centroid - pts[hi]);
        const double fe = eval(xe);
        if (fe < fr) {
          pts[hi] = xe, vals[hi] = fe;
        } else {
          pts[hi] = xr, vals[hi] = fr;
        }
        continue;
      }
      if (fr < vals[next]) {
        pts[hi] = xr, vals[hi] = fr;
        continue;
      }
      const bool outside = fr < vals[hi];
      const VectorXd xc = outside ? VectorXd(centroid + 0.5 * (xr - centroid))
                                  : VectorXd(centroid + 0.5 * (pts[hi] - centroid));
      const double fc = eval(xc);
      if (fc < (outside ? fr : vals[hi])) {
        pts[hi] = xc, vals[hi] = fc;
        continue;
      }
      for (std::size_t k = 0; k < pts.size(); ++k) {
        if (k == lo) continue;
        pts[k] = pts[lo] + 0.5 * (pts[k] - pts[lo]);
        vals[k] = eval(pts[k]);
      }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    const VectorXd round_best = pts[static_cast<std::size_t>(it - vals.begin())];
    const double round_value = *it;
    const bool improved = round_value < best_value && !flat(round_value, best_value);
    if (round_value <= best_value) best = round_best, best_value = round_value;
    if (!done) break;
    if (round > 0 && !improved) {
      res.converged = true;
      break;
    }
    if (round == opt.max_restarts) res.converged = true;
  }
  res.x = best;
  res.value = best_value;
  return res;
}

}  // namespace spa
