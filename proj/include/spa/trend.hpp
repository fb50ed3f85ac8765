#pragma once

#include "spa/types.hpp"

namespace spa {

/// Coefficients of a mean function mu(s, t) = F(s, t) beta. The design used
/// throughout is the linear time trend F(s, t) = (1, t), so beta = (a0, a1).
struct TrendCoefficients {
  VectorXd beta = VectorXd::Zero(2);

  TrendCoefficients() = default;
  TrendCoefficients(double intercept, double slope) : beta(2) { beta << intercept, slope; }
  explicit TrendCoefficients(VectorXd coefficients) : beta(std::move(coefficients)) {}

  double intercept() const { return beta[0]; }
  double slope() const { return beta.size() > 1 ? beta[1] : 0.0; }

  /// mu(t) for the linear time design.
  double mean_at(double t) const { return intercept() + slope() * t; }
};

/// Design row F(s, t) of the linear time trend.
inline Eigen::RowVector2d linear_time_design(double t) { return {1.0, t}; }

}  // namespace spa
