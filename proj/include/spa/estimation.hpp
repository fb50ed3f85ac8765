#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spa/covariance.hpp"
#include "spa/randomfield.hpp"
#include "spa/trend.hpp"
#include "spa/types.hpp"

namespace spa {

enum class StFamily { Exponential, Iacocesare };

std::string_view to_string(StFamily family);
StFamily parse_family(std::string_view text);

struct ParameterBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// Settings of the pairwise composite likelihood and its optimizer.
struct PairwiseConfig {
  /// Largest spatial distance of a pair; 0 selects 0.25 x the data extent.
  double spatial_cutoff = 0.0;
  /// Largest time separation of a pair.
  double temporal_cutoff = 2.0;
  int max_evaluations = 4000;
  /// Starting point; when absent a coarse grid over the ranges is searched.
  std::optional<SpatioTemporalModel> initial;
  /// Box constraints keyed by canonical parameter name. Missing entries get
  /// defaults scaled to the data extent.
  std::map<std::string, ParameterBounds> bounds;
  /// Compute V_theta from the numerical Hessian.
  bool compute_vcov = true;

  void validate() const;
  double resolved_spatial_cutoff(const FieldSample& data) const;
};

/// Sufficient statistics of all pairs sharing one (h, u). Values enter
/// centred by the trend beta0 of the owning PairStatistics, and F = (1, t).
struct LagClass {
  double h = 0.0;
  double u = 0.0;
  std::size_t count = 0;
  double syy = 0.0;                                  // sum y_i^2 + y_j^2
  double pyy = 0.0;                                  // sum y_i y_j
  double sdd = 0.0;                                  // sum (y_i - y_j)^2
  Eigen::Vector2d syf = Eigen::Vector2d::Zero();     // sum y_i F_i + y_j F_j
  Eigen::Vector2d cyf = Eigen::Vector2d::Zero();     // sum y_i F_j + y_j F_i
  Eigen::Matrix2d sff = Eigen::Matrix2d::Zero();     // sum F_i F_i' + F_j F_j'
  Eigen::Matrix2d cff = Eigen::Matrix2d::Zero();     // sum (F_i F_j' + F_j F_i') / 2
};

struct PairStatistics {
  std::vector<LagClass> classes;
  std::size_t pairs = 0;
  double spatial_cutoff = 0.0;
  double temporal_cutoff = 0.0;
  /// Trend removed before accumulation.
  Eigen::Vector2d beta0 = Eigen::Vector2d::Zero();
};

/// Enumerates every pair with 0 < (h, u), h <= spatial cutoff and
/// u <= temporal cutoff, and groups them by lag. With center = true the
/// values are first centred by their OLS time trend (numerical hygiene only;
/// the composite likelihood does not depend on it).
PairStatistics pair_statistics(const FieldSample& data, const PairwiseConfig& config, bool center = true);

/// Sum of bivariate normal log-densities over all pairs within the cutoffs.
double composite_loglik(const PairStatistics& stats, const SpatioTemporalModel& model,
                        const TrendCoefficients& trend);
double composite_loglik(const FieldSample& data, const SpatioTemporalModel& model, const TrendCoefficients& trend,
                        const PairwiseConfig& config);

/// Full joint Gaussian log-likelihood; oracle for at most 500 observations.
double exact_loglik(const FieldSample& data, const SpatioTemporalModel& model, const TrendCoefficients& trend);

inline double pseudo_aic(double composite_loglik, int parameters) {
  return 2.0 * parameters - 2.0 * composite_loglik;
}

struct FitResult {
  StFamily family = StFamily::Exponential;
  SpatioTemporalModel model;
  TrendCoefficients trend;
  double composite_loglik = 0.0;
  /// Naive inverse Hessian of the composite log-likelihood (not a sandwich
  /// estimator) over [a0, a1, canonical covariance parameters].
  std::optional<MatrixXd> v_full;
  double pseudo_aic = 0.0;
  int n_params = 0;
  bool valid = false;
  bool converged = false;
  int evaluations = 0;
  std::size_t pairs = 0;
  double extent = 0.0;
  std::vector<std::string> warnings;

  /// [a0, a1, canonical covariance parameters].
  VectorXd estimates() const;
  std::vector<std::string> names() const;
  /// Covariance block of the canonical covariance parameters.
  std::optional<MatrixXd> v_theta() const;
  std::optional<double> slope_variance() const;
};

/// Maximizes the pairwise composite likelihood. Trend and sigma^2 are
/// profiled out in closed form; the remaining range and shape parameters
/// are searched by Nelder-Mead on log (and, for alpha, logit) scales.
FitResult fit(const FieldSample& data, StFamily family, const PairwiseConfig& config = {});

struct DetrendResult {
  TrendCoefficients trend;
  VectorXd residuals;
};

/// Least-squares line through (t, value).
DetrendResult ols_detrend(const Eigen::Ref<const VectorXd>& times, const Eigen::Ref<const VectorXd>& values);
DetrendResult ols_detrend(const FieldSample& data);

/// Copy of data with values replaced by OLS residuals.
FieldSample detrended(const FieldSample& data);

/// Upper edges of the distance bins (lower edge of the first bin is 0).
/// Empty selects one bin per distinct distance.
struct VariogramBins {
  std::vector<double> h_edges;
};

struct VariogramRow {
  double h = 0.0;
  double u = 0.0;
  double gamma = 0.0;
  std::size_t count = 0;
};

struct VariogramEstimate {
  std::vector<VariogramRow> spatial;   // u = 0
  std::vector<VariogramRow> temporal;  // h = 0
  std::vector<VariogramRow> joint;
};

/// Method-of-moments semivariogram sum (Y_i - Y_j)^2 / (2 N) per bin, over
/// pairs within the cutoffs of config. Rows report the count-weighted mean h.
VariogramEstimate empirical_variogram(const FieldSample& data, const VariogramBins& bins,
                                      const PairwiseConfig& config);

/// 100 * (#valid / #fits).
double percent_valid(const std::vector<FitResult>& fits);

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

struct MonteCarloSetup {
  GridSpec grid{20, 1.0, 10};
  SpatioTemporalModel truth = ExponentialSeparable{0.1, 6.676, 1.0};
  TrendCoefficients trend{0.5, -0.1};
  StFamily family = StFamily::Exponential;
  int replicates = 500;
  std::uint64_t seed = 1;
  int jobs = 1;
  PairwiseConfig config;
};

/// Replicate r is simulated with stream r of the base seed and fitted.
/// Output order follows r regardless of jobs.
std::vector<FitResult> run_monte_carlo(const MonteCarloSetup& setup);

struct SummaryRow {
  std::string name;
  double truth = 0.0;
  double mean = 0.0;
  double sd = 0.0;
};

/// Mean and sd of each estimate over the valid fits.
struct MonteCarloSummary {
  std::vector<SummaryRow> rows;
  std::size_t replicates = 0;
  std::size_t valid = 0;
  double percent_valid = 0.0;
};

MonteCarloSummary summarize(const std::vector<FitResult>& fits, const SpatioTemporalModel& truth,
                            const TrendCoefficients& trend);

/// Sample covariance of FitResult::estimates() over the (valid) fits.
MatrixXd estimate_covariance(const std::vector<FitResult>& fits, bool valid_only = true);

/// Covariance of the estimates by parametric bootstrap: refits of
/// `replicates` fields simulated from the fitted model on the grid.
MatrixXd parametric_bootstrap_vcov(const FitResult& fitted, const GridSpec& grid, int replicates,
                                   std::uint64_t seed, int jobs = 1, const PairwiseConfig& config = {});

}  // namespace spa
