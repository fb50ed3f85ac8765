#include "spa/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "spa/errors.hpp"
#include "spa/special.hpp"

namespace spa {
namespace {

void check_spec(const AgreementSpec& spec) {
  if (!(spec.c > 0.0)) throw DomainError("psi: the agreement threshold c must be positive");
  if (!(spec.sigma_d >= 0.0)) throw DomainError("psi: sigma_D must be non-negative");
  if (!std::isfinite(spec.mu_d)) throw DomainError("psi: mu_D must be finite");
}

}  // namespace

double psi(const AgreementSpec& spec) {
  check_spec(spec);
  if (spec.sigma_d == 0.0) return std::abs(spec.mu_d) <= spec.c ? 1.0 : 0.0;
  const double upper = (spec.c - spec.mu_d) / spec.sigma_d;
  const double lower = -(spec.c + spec.mu_d) / spec.sigma_d;
  // Pick the form that subtracts two small tail probabilities.
  double value;
  if (lower > 0.0) {
    value = normal_sf(lower) - normal_sf(upper);
  } else if (upper < 0.0) {
    value = normal_cdf(upper) - normal_cdf(lower);
  } else {
    value = 1.0 - (normal_sf(upper) + normal_cdf(lower));
  }
  return std::clamp(value, 0.0, 1.0);
}

PsiPartials psi_partials(const AgreementSpec& spec) {
  check_spec(spec);
  if (!(spec.sigma_d > 0.0)) throw DomainError("psi_partials: degenerate at sigma_D = 0");
  const double s = spec.sigma_d;
  const double z1 = (spec.c - spec.mu_d) / s;
  const double z2 = (spec.c + spec.mu_d) / s;
  const double f1 = normal_pdf(z1);
  const double f2 = normal_pdf(z2);
  return {(f2 - f1) / s, -((spec.c - spec.mu_d) * f1 + (spec.c + spec.mu_d) * f2) / (s * s)};
}

double psi_spatial(const SpatialModel& model, double mu_d, double c, double h) {
  return psi({c, mu_d, std::sqrt(sigma_d2_spatial(model, h))});
}

double psi_spatiotemporal(const SpatioTemporalModel& model, const TrendCoefficients& trend, double c, double h,
                          double u) {
  return psi({c, trend.slope() * u, std::sqrt(st_sigma_d2(model, h, u))});
}

double psi_at(const CovarianceModel& model, const MeanDifference& mean, double c, Lag lag) {
  return psi({c, mean.value(lag.u), std::sqrt(sigma_d2(model, lag))});
}

double var_sigma_d_hat(const CovarianceModel& model, Lag lag, const Eigen::Ref<const MatrixXd>& v_theta) {
  const VectorXd theta = parameters(model);
  if (v_theta.rows() != theta.size() || v_theta.cols() != theta.size()) {
    throw DomainError("var_sigma_d_hat: V_theta must be " + std::to_string(theta.size()) + "x" +
                      std::to_string(theta.size()) + " in the canonical parameter order");
  }
  const double s2 = sigma_d2(model, lag);
  if (!(s2 > 0.0)) throw DomainError("var_sigma_d_hat: degenerate at sigma_D^2 = 0");
  if (v_theta.isZero(0.0)) return 0.0;
  const VectorXd grad = grad_sigma_d2(model, lag);
  const double quad = grad.dot(v_theta * grad);
  if (quad < 0.0) {
    const double scale = grad.squaredNorm() * v_theta.diagonal().cwiseAbs().sum();
    if (quad < -1e-10 * scale) throw DomainError("var_sigma_d_hat: V_theta is not positive semidefinite");
    return 0.0;
  }
  return quad / (4.0 * s2);
}

PaEstimate pa_estimate(const CovarianceModel& model, const MeanDifference& mean, double c, Lag lag,
                       const Eigen::Ref<const MatrixXd>& v_theta) {
  PaEstimate est;
  est.lag = lag;
  est.c = c;
  est.mu_d = mean.value(lag.u);
  est.var_mu_d = mean.variance(lag.u);
  if (!(est.var_mu_d >= 0.0)) throw DomainError("pa_estimate: V_muD must be non-negative");
  const double s2 = sigma_d2(model, lag);
  if (!(s2 > 0.0)) throw DomainError("pa_estimate: degenerate at sigma_D = 0");
  est.sigma_d = std::sqrt(s2);
  est.var_sigma_d = var_sigma_d_hat(model, lag, v_theta);

  const AgreementSpec spec{c, est.mu_d, est.sigma_d};
  est.psi = psi(spec);
  const PsiPartials partials = psi_partials(spec);
  est.variance = partials.d_mu * partials.d_mu * est.var_mu_d + partials.d_sigma * partials.d_sigma * est.var_sigma_d;

  const double ratio = (c - est.mu_d) * (c - est.mu_d) / s2;
  est.variance_printed = 2.0 / std::numbers::pi * std::exp(-ratio) * (est.var_mu_d + ratio * est.var_sigma_d);
  return est;
}

PaEstimate pa_estimate(const SpatioTemporalModel& model, const TrendCoefficients& trend, double c, Lag lag,
                       const Eigen::Ref<const MatrixXd>& v_theta, double v_mu_d) {
  const MeanDifference mean{0.0, trend.slope(), v_mu_d, 0.0};
  return pa_estimate(to_covariance_model(model), mean, c, lag, v_theta);
}

std::string_view to_string(Alternative alternative) {
  switch (alternative) {
    case Alternative::TwoSided:
      return "two-sided";
    case Alternative::Less:
      return "less";
    case Alternative::Greater:
      return "greater";
  }
  return "two-sided";
}

Alternative parse_alternative(std::string_view text) {
  if (text == "two-sided" || text == "two_sided") return Alternative::TwoSided;
  if (text == "less") return Alternative::Less;
  if (text == "greater") return Alternative::Greater;
  throw DomainError("unknown alternative '" + std::string(text) + "' (expected two-sided, less or greater)");
}

PaTestResult pa_test(const PaEstimate& estimate, double psi0, Alternative alternative, bool monotone_in_lag) {
  if (!(psi0 >= 0.0 && psi0 <= 1.0)) throw DomainError("pa_test: psi0 must lie in [0, 1]");
  if (!(estimate.variance > 0.0)) throw DomainError("pa_test: estimate has zero variance");
  PaTestResult result;
  result.psi0 = psi0;
  result.psi_hat = estimate.psi;
  result.alternative = alternative;
  result.z = (estimate.psi - psi0) / std::sqrt(estimate.variance);
  switch (alternative) {
    case Alternative::TwoSided:
      result.p_value = std::min(1.0, 2.0 * normal_sf(std::abs(result.z)));
      break;
    case Alternative::Less:
      result.p_value = normal_cdf(result.z);
      break;
    case Alternative::Greater:
      result.p_value = normal_sf(result.z);
      break;
  }
  result.rejects_all_lags_if_rejected = monotone_in_lag && alternative == Alternative::Less && estimate.lag.h == 0.0;
  return result;
}

std::vector<PaCurveRow> pa_curve(const CovarianceModel& model, const MeanDifference& mean, const CurveGrid& grid,
                                 const std::optional<MatrixXd>& v_theta) {
  if (grid.c_values.empty() || grid.h_values.empty() || grid.u_values.empty()) {
    throw DomainError("pa_curve: c, h and u grids must be non-empty");
  }
  std::vector<PaCurveRow> rows;
  rows.reserve(grid.c_values.size() * grid.h_values.size() * grid.u_values.size());
  for (double u : grid.u_values) {
    for (double c : grid.c_values) {
      for (double h : grid.h_values) {
        const Lag lag{h, u};
        PaCurveRow row{u, c, h, 0.0, std::numeric_limits<double>::quiet_NaN()};
        if (v_theta && sigma_d2(model, lag) > 0.0) {
          const PaEstimate est = pa_estimate(model, mean, c, lag, *v_theta);
          row.psi = est.psi;
          row.sd = est.sd();
        } else {
          row.psi = psi_at(model, mean, c, lag);
          if (v_theta) row.sd = 0.0;
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace spa
