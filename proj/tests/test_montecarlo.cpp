// Simulation oracles for the estimator and the delta-method variances.
#include <doctest.h>

#include <cmath>
#include <vector>

#include "spa/agreement.hpp"
#include "spa/estimation.hpp"

using namespace spa;

namespace {

const ExponentialSeparable kTruth{0.1, 6.676, 1.0};
const TrendCoefficients kTrend{0.5, -0.1};
const Lag kLag{1.0, 1.0};
constexpr double kC = 0.5;

double sample_variance(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= double(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / double(x.size() - 1);
}

MonteCarloSetup exponential_setup(int replicates, std::uint64_t seed) {
  MonteCarloSetup s;
  s.truth = kTruth;
  s.trend = kTrend;
  s.replicates = replicates;
  s.seed = seed;
  return s;
}

// Covariance of the estimates from an independent pilot run.
struct Pilot {
  MatrixXd v_theta;
  double var_a1 = 0.0;
};

const Pilot& pilot() {
  static const Pilot p = [] {
    const auto fits = run_monte_carlo(exponential_setup(500, 9001));
    const MatrixXd v = estimate_covariance(fits, false);
    return Pilot{v.bottomRightCorner(3, 3), v(1, 1)};
  }();
  return p;
}

const std::vector<FitResult>& main_fits() {
  static const std::vector<FitResult> fits = run_monte_carlo(exponential_setup(500, 77));
  return fits;
}

}  // namespace

TEST_CASE("Monte Carlo: exponential fits are practically unbiased") {
  const auto fits = run_monte_carlo(exponential_setup(50, 11));
  const MonteCarloSummary s = summarize(fits, kTruth, kTrend);
  REQUIRE(s.rows.size() == 5);
  for (const auto& row : s.rows) {
    CAPTURE(row.name);
    CAPTURE(row.mean);
    CAPTURE(row.sd);
    CHECK(std::abs(row.mean - row.truth) <= 2.0 * row.sd);
  }
}

TEST_CASE("Monte Carlo: percent valid lands in the 60-95% band") {
  // Loose band around a reference figure of 77.6%; see the README for why this
  // implementation lands above the band.
  const auto fits = run_monte_carlo(exponential_setup(100, 12));
  const double pv = percent_valid(fits);
  CAPTURE(pv);
  CHECK(pv >= 60.0);
  CHECK(pv <= 95.0);
}

TEST_CASE("Monte Carlo: variance of sigma_D-hat matches the delta method") {
  const auto& fits = main_fits();
  std::vector<double> sd_hat;
  for (const auto& f : fits) sd_hat.push_back(std::sqrt(st_sigma_d2(f.model, kLag.h, kLag.u)));
  const double empirical = sample_variance(sd_hat);
  const double formula = var_sigma_d_hat(CovarianceModel(kTruth), kLag, pilot().v_theta);
  CAPTURE(empirical);
  CAPTURE(formula);
  CHECK(std::abs(formula / empirical - 1.0) <= 0.25);
}

TEST_CASE("Monte Carlo: variance of psi-hat matches the exact-partials route") {
  const auto& fits = main_fits();
  std::vector<double> psi_hat;
  for (const auto& f : fits) psi_hat.push_back(psi_at(to_covariance_model(f.model), MeanDifference::from_trend(f.trend), kC, kLag));
  const double empirical = sample_variance(psi_hat);
  const PaEstimate e = pa_estimate(CovarianceModel(kTruth), MeanDifference::from_trend(kTrend, pilot().var_a1), kC,
                                   kLag, pilot().v_theta);
  CAPTURE(empirical);
  CAPTURE(e.variance);
  CAPTURE(e.variance_printed);
  CHECK(std::abs(e.variance / empirical - 1.0) <= 0.25);
}

TEST_CASE("Monte Carlo: one-sided test has nominal size and power") {
  const auto fits = run_monte_carlo(exponential_setup(500, 4242));
  const double psi_true = psi_at(CovarianceModel(kTruth), MeanDifference::from_trend(kTrend), kC, kLag);
  int size_rejections = 0;
  int power_rejections = 0;
  double sd = 0.0;
  for (const auto& f : fits) {
    const PaEstimate e = pa_estimate(to_covariance_model(f.model), MeanDifference::from_trend(f.trend, pilot().var_a1),
                                     kC, kLag, pilot().v_theta);
    sd = e.sd();
    if (pa_test(e, psi_true, Alternative::Less).rejected(0.05)) ++size_rejections;
    if (pa_test(e, std::min(1.0, psi_true + 4.0 * sd), Alternative::Less).rejected(0.05)) ++power_rejections;
  }
  const double size = size_rejections / double(fits.size());
  const double power = power_rejections / double(fits.size());
  CAPTURE(size);
  CAPTURE(power);
  CHECK(size >= 0.03);
  CHECK(size <= 0.08);
  CHECK(power >= 0.9);
}
