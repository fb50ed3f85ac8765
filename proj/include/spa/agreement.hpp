#pragma once

#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "spa/covariance.hpp"
#include "spa/trend.hpp"
#include "spa/types.hpp"

namespace spa {

/// Inputs of the probability of agreement P(|D| <= c), D ~ N(mu_d, sigma_d^2).
struct AgreementSpec {
  double c = 1.0;
  double mu_d = 0.0;
  double sigma_d = 1.0;
};

/// Phi((c - mu_d)/sigma_d) - Phi(-(c + mu_d)/sigma_d). For sigma_d = 0 the
/// limit 1{|mu_d| <= c} is returned.
double psi(const AgreementSpec& spec);

/// Partial derivatives of psi in mu_d and sigma_d.
struct PsiPartials {
  double d_mu = 0.0;
  double d_sigma = 0.0;
};
PsiPartials psi_partials(const AgreementSpec& spec);

/// Mean difference mu_D(u) = offset + slope * u. A bivariate spatial model
/// uses offset = mu_X - mu_Y; a space-time model with linear trend uses
/// slope = a1. Offset and slope estimates are taken as independent.
struct MeanDifference {
  double offset = 0.0;
  double slope = 0.0;
  double offset_variance = 0.0;
  double slope_variance = 0.0;

  double value(double u) const { return offset + slope * u; }
  double variance(double u) const { return offset_variance + u * u * slope_variance; }

  static MeanDifference constant(double mu_d, double variance = 0.0) { return {mu_d, 0.0, variance, 0.0}; }
  static MeanDifference from_trend(const TrendCoefficients& trend, double slope_variance = 0.0) {
    return {0.0, trend.slope(), 0.0, slope_variance};
  }
};

double psi_spatial(const SpatialModel& model, double mu_d, double c, double h);

/// PA between Y(s, t) and Y(s + h, t + u) with mu_D = a1 u.
double psi_spatiotemporal(const SpatioTemporalModel& model, const TrendCoefficients& trend, double c, double h,
                          double u);

/// PA for any family; u is ignored by bivariate spatial families.
double psi_at(const CovarianceModel& model, const MeanDifference& mean, double c, Lag lag);

/// First-order variance of sigma_D-hat:
///   grad(sigma_D^2)' V grad(sigma_D^2) / (4 sigma_D^2),
/// with V in the canonical parameter ordering of the model.
double var_sigma_d_hat(const CovarianceModel& model, Lag lag, const Eigen::Ref<const MatrixXd>& v_theta);

/// Plug-in PA with two delta-method variances:
///  - variance: exact first-order expansion with the analytic partials of psi,
///      (dpsi/dmu)^2 V_mu + (dpsi/dsigma)^2 V_sigma;
///  - variance_printed: the closed form
///      (2/pi) exp{-(c-mu)^2/sigma^2} [V_mu + (c-mu)^2/sigma^2 V_sigma],
///    kept for comparison.
/// Both assume mu_D-hat independent of theta-hat.
struct PaEstimate {
  double psi = 0.0;
  double variance = 0.0;
  double variance_printed = 0.0;
  Lag lag;
  double c = 0.0;
  double mu_d = 0.0;
  double sigma_d = 0.0;
  double var_mu_d = 0.0;
  double var_sigma_d = 0.0;
  bool assumes_independence = true;

  double sd() const { return std::sqrt(variance); }
};

PaEstimate pa_estimate(const CovarianceModel& model, const MeanDifference& mean, double c, Lag lag,
                       const Eigen::Ref<const MatrixXd>& v_theta);

/// Space-time convenience form: mu_D = a1 u and V_muD supplied directly.
PaEstimate pa_estimate(const SpatioTemporalModel& model, const TrendCoefficients& trend, double c, Lag lag,
                       const Eigen::Ref<const MatrixXd>& v_theta, double v_mu_d);

enum class Alternative { TwoSided, Less, Greater };

std::string_view to_string(Alternative alternative);
Alternative parse_alternative(std::string_view text);

struct PaTestResult {
  double psi0 = 0.95;
  double psi_hat = 0.0;
  double z = 0.0;
  double p_value = 1.0;
  Alternative alternative = Alternative::TwoSided;
  /// Set for a one-sided "less" test at h = 0 when the caller states the
  /// model has sigma_D non-decreasing in h: rejecting at h = 0 then
  /// rejects at every lag.
  bool rejects_all_lags_if_rejected = false;

  bool rejected(double level) const { return p_value < level; }
};

/// z = (psi_hat - psi0)/sd with normal p-values.
PaTestResult pa_test(const PaEstimate& estimate, double psi0, Alternative alternative,
                     bool monotone_in_lag = false);

struct CurveGrid {
  std::vector<double> c_values;
  std::vector<double> h_values;
  std::vector<double> u_values{0.0};
};

struct PaCurveRow {
  double u = 0.0;
  double c = 0.0;
  double h = 0.0;
  double psi = 0.0;
  double sd = 0.0;
};

/// Sweep ordered u (outer), c, h (inner). sd is NaN when no V_theta is given.
std::vector<PaCurveRow> pa_curve(const CovarianceModel& model, const MeanDifference& mean, const CurveGrid& grid,
                                 const std::optional<MatrixXd>& v_theta = std::nullopt);

}  // namespace spa
