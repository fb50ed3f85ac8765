#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spa/errors.hpp"
#include "spa/types.hpp"

namespace spa {

// ---------------------------------------------------------------------------
// Parameter sets
// ---------------------------------------------------------------------------

struct MaternParams {
  double variance = 1.0;
  double smoothness = 0.5;
  double decay = 1.0;
};

/// Bivariate Matérn: C_X = sigma2_x M(nu_x, a_x), C_Y = sigma2_y M(nu_y, a_y),
/// C_XY = rho_xy sigma_x sigma_y M(nu_xy, a_xy).
struct BivariateMaternModel {
  double sigma2_x = 1.0;
  double sigma2_y = 1.0;
  double nu_x = 0.5;
  double nu_y = 0.5;
  double nu_xy = 0.5;
  double a_x = 1.0;
  double a_y = 1.0;
  double a_xy = 1.0;
  double rho_xy = 0.0;
};

struct GeneralizedWendlandParams {
  int kappa = 0;
  double mu = 1.0;
  double support = 1.0;
};

/// Bivariate Wendland-Gneiting model. Each entry is
///   sigma_i sigma_j [rho] c_ij b_ij^(nu+2kappa+1) B(nu+2kappa-1, gamma_ij+1)
///     GW(h / b_ij; kappa, nu + gamma_ij + 1).
/// The marginal variances C_X(0), C_Y(0) equal sigma2_x, sigma2_y only when
/// c_11, c_22 cancel the scale factor; see normalized().
struct BivariateWendlandModel {
  double sigma2_x = 1.0;
  double sigma2_y = 1.0;
  double rho_xy = 0.0;
  double c_11 = 1.0;
  double c_22 = 1.0;
  double c_12 = 1.0;
  double b_11 = 1.0;
  double b_22 = 1.0;
  double b_12 = 1.0;
  double gamma_11 = 0.0;
  double gamma_22 = 0.0;
  double gamma_12 = 0.0;
  double nu = 2.0;
  int kappa = 0;

  /// Copy with c_ij chosen so that every scale factor equals one, i.e.
  /// C_X(0) = sigma2_x, C_Y(0) = sigma2_y and C_XY(0) = rho sigma_x sigma_y.
  BivariateWendlandModel normalized() const;
};

/// Hole-effect model C_X = C_Y = sigma2 (phi/h) sin(h/phi), C_XY = rho_xy C_X.
/// sigma_D^2 is not monotone in h for this family.
struct WaveModel {
  double sigma2 = 1.0;
  double phi = 1.0;
  double rho_xy = 0.0;
};

/// C(h, u) = sigma2 exp(-h/phi_s) exp(-|u|/phi_t).
struct ExponentialSeparable {
  double sigma2 = 1.0;
  double phi_s = 1.0;
  double phi_t = 1.0;
};

/// C(h, u) = sigma2 (1 + (h/phi_s)^alpha_s + (|u|/phi_t)^alpha_t)^(-beta).
struct Iacocesare {
  double sigma2 = 1.0;
  double phi_s = 1.0;
  double phi_t = 1.0;
  double alpha_s = 1.0;
  double alpha_t = 1.0;
  double beta = 2.0;
};

using SpatialModel = std::variant<BivariateMaternModel, BivariateWendlandModel, WaveModel>;
using SpatioTemporalModel = std::variant<ExponentialSeparable, Iacocesare>;
using CovarianceModel =
    std::variant<BivariateMaternModel, BivariateWendlandModel, WaveModel, ExponentialSeparable, Iacocesare>;

CovarianceModel to_covariance_model(const SpatialModel& model);
CovarianceModel to_covariance_model(const SpatioTemporalModel& model);
bool is_spatiotemporal(const CovarianceModel& model);
SpatialModel as_spatial(const CovarianceModel& model);
SpatioTemporalModel as_spatiotemporal(const CovarianceModel& model);

/// "matern", "wendland", "wave", "exponential", "iacocesare".
std::string_view family_name(const CovarianceModel& model);

// ---------------------------------------------------------------------------
// Correlation kernels
// ---------------------------------------------------------------------------

/// Matérn correlation 2^(1-nu)/Gamma(nu) (a h)^nu K_nu(a h); 1 at h = 0.
double matern_correlation(double h, double nu, double a);

/// Closed form of the Matérn correlation at nu = m + 1/2:
///   exp(-a h) sum_{k=0}^{m} (m+k)!/(2m)! C(m,k) (2 a h)^(m-k).
template <typename Scalar>
Scalar matern_half_integer(Scalar h, int m, Scalar a) {
  using std::exp;
  if (m < 0) throw DomainError("matern_half_integer: m must be non-negative");
  if (!(a > Scalar(0))) throw DomainError("matern_half_integer: decay must be positive");
  if (h < Scalar(0)) throw DomainError("matern_half_integer: lag must be non-negative");
  // Coefficient of (2ah)^n is C(m,n) (2m-n)!/(2m)!; evaluate by Horner.
  std::vector<Scalar> coeff(static_cast<std::size_t>(m) + 1);
  coeff[0] = Scalar(1);
  for (int n = 1; n <= m; ++n) {
    coeff[n] = coeff[n - 1] * Scalar(m - n + 1) / (Scalar(n) * Scalar(2 * m - n + 1));
  }
  const Scalar y = Scalar(2) * a * h;
  Scalar poly(0);
  for (int n = m; n >= 0; --n) poly = poly * y + coeff[n];
  return exp(-a * h) * poly;
}

/// Generalized Wendland correlation on normalized distance h (support 1).
/// kappa = 0 is (1-h^2)^mu; kappa >= 1 integrates the beta-normalized kernel.
double gw_correlation(double h, int kappa, double mu);

template <typename Scalar>
Scalar exponential_separable_correlation(Scalar h, Scalar u, Scalar phi_s, Scalar phi_t) {
  using std::abs;
  using std::exp;
  return exp(-h / phi_s - abs(u) / phi_t);
}

template <typename Scalar>
Scalar iacocesare_correlation(Scalar h, Scalar u, Scalar phi_s, Scalar phi_t, Scalar alpha_s, Scalar alpha_t,
                              Scalar beta) {
  using std::abs;
  using std::pow;
  return pow(Scalar(1) + pow(h / phi_s, alpha_s) + pow(abs(u) / phi_t, alpha_t), -beta);
}

// ---------------------------------------------------------------------------
// Covariances and difference variances
// ---------------------------------------------------------------------------

/// [[C_X(h), C_XY(h)], [C_XY(h), C_Y(h)]].
Eigen::Matrix2d covariance_block(const SpatialModel& model, double h);

double cross_covariance(const SpatialModel& model, double h);

/// sigma_D^2(h) = C_X(0) + C_Y(0) - 2 C_XY(h).
double sigma_d2_spatial(const SpatialModel& model, double h);

double st_correlation(const SpatioTemporalModel& model, double h, double u);
double st_covariance(const SpatioTemporalModel& model, double h, double u);
double st_variance(const SpatioTemporalModel& model);

/// 2 C(0,0) - 2 C(h,u), i.e. twice the semivariogram.
double st_sigma_d2(const SpatioTemporalModel& model, double h, double u);

/// Dispatches to sigma_d2_spatial or st_sigma_d2.
double sigma_d2(const CovarianceModel& model, Lag lag);

/// Distance at which the Iacocesare correlation falls to 0.05 for time lag u.
double practical_range(const Iacocesare& model, double u);

/// Joint covariance of a bivariate field at the given sites (n x 2 coordinates).
/// Block layout: all X components first, then all Y components.
MatrixXd covariance_matrix(const SpatialModel& model, const Eigen::Ref<const Eigen::MatrixX2d>& coords);

/// Covariance of a space-time field at observations (coords[i], times[i]).
MatrixXd covariance_matrix(const SpatioTemporalModel& model, const Eigen::Ref<const Eigen::MatrixX2d>& coords,
                           const Eigen::Ref<const VectorXd>& times);

// ---------------------------------------------------------------------------
// Parameter vectors
// ---------------------------------------------------------------------------
//
// Canonical orderings (fixed; the parameter covariance V_theta must follow them):
//   matern      sigma2_x sigma2_y nu_x nu_y nu_xy a_x a_y a_xy rho_xy
//   wendland    sigma2_x sigma2_y rho_xy c_11 c_22 c_12 b_11 b_22 b_12
//               gamma_11 gamma_22 gamma_12 nu            (kappa is fixed)
//   wave        sigma2 phi rho_xy
//   exponential phi_s phi_t sigma2
//   iacocesare  phi_s phi_t sigma2 alpha_s alpha_t beta

std::vector<std::string> parameter_names(const CovarianceModel& model);
VectorXd parameters(const CovarianceModel& model);
CovarianceModel with_parameters(const CovarianceModel& model, const Eigen::Ref<const VectorXd>& theta);

/// Gradient of sigma_D^2 in the canonical parameters by central differences
/// (step 1e-6 |theta_i|, floor 1e-8).
VectorXd grad_sigma_d2(const CovarianceModel& model, Lag lag);

// ---------------------------------------------------------------------------
// Validity
// ---------------------------------------------------------------------------

/// Factor R with C = R R' from a pivoted LDL' decomposition, accepted when C
/// is positive semidefinite up to round-off: every pivot >= -1e-10 * scale
/// and the reconstruction matches C to 1e-9 * scale entrywise.
std::optional<MatrixXd> semidefinite_ldlt(const MatrixXd& c, double scale);

struct ValidityReport {
  bool valid = true;
  std::vector<std::string> violations;
};

/// Range checks plus a positive-definiteness probe: the joint covariance on
/// a 6x6 grid (times 3 time points for space-time families) must admit a
/// Cholesky factorization without jitter.
ValidityReport validate_model(const CovarianceModel& model);

/// Throws ModelValidityError listing the violations when the model is invalid.
void require_valid(const CovarianceModel& model);

}  // namespace spa
