#include "spa/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "spa/special.hpp"

namespace spa {
namespace {

std::string describe(std::string_view what, double value) {
  std::ostringstream os;
  os << what << " (got " << value << ")";
  return os.str();
}

void require_positive(double value, std::string_view name, std::string_view where) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(where) + ": " + std::string(name) + " must be positive and finite");
  }
}

double wave_correlation(double h, double phi) {
  const double x = h / phi;
  if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

// c b^(nu+2kappa+1) B(nu+2kappa-1, gamma+1)
double wendland_scale(const BivariateWendlandModel& m, double c, double b, double gamma) {
  const double first = m.nu + 2.0 * m.kappa - 1.0;
  if (!(first > 0.0)) throw DomainError("wendland: nu + 2 kappa - 1 must be positive");
  if (!(gamma + 1.0 > 0.0)) throw DomainError("wendland: gamma_ij + 1 must be positive");
  return c * std::pow(b, m.nu + 2.0 * m.kappa + 1.0) * std::beta(first, gamma + 1.0);
}

double wendland_entry(const BivariateWendlandModel& m, double c, double b, double gamma, double h) {
  require_positive(b, "b_ij", "wendland");
  return wendland_scale(m, c, b, gamma) * gw_correlation(h / b, m.kappa, m.nu + gamma + 1.0);
}

// Sites spaced so that the grid spans a few correlation lengths.
double probe_spacing(const CovarianceModel& model) {
  return std::visit(overloaded{
      [](const BivariateMaternModel& m) { return 0.5 / std::cbrt(m.a_x * m.a_y * m.a_xy); },
      [](const BivariateWendlandModel& m) { return 0.5 * std::cbrt(m.b_11 * m.b_22 * m.b_12); },
      [](const WaveModel& m) { return 0.5 * m.phi; },
      [](const ExponentialSeparable& m) { return 0.5 * m.phi_s; },
      [](const Iacocesare& m) { return 0.5 * m.phi_s; },
  }, model);
}

std::vector<std::string> range_violations(const CovarianceModel& model) {
  std::vector<std::string> out;
  auto positive = [&](double v, std::string_view name) {
    if (!(v > 0.0) || !std::isfinite(v)) out.push_back(describe(std::string(name) + " must be positive", v));
  };
  auto correlation = [&](double v, std::string_view name) {
    if (!(std::abs(v) <= 1.0)) out.push_back(describe(std::string(name) + " must satisfy |" + std::string(name) + "| <= 1", v));
  };
  std::visit(overloaded{
      [&](const BivariateMaternModel& m) {
        positive(m.sigma2_x, "sigma2_x");
        positive(m.sigma2_y, "sigma2_y");
        positive(m.nu_x, "nu_x");
        positive(m.nu_y, "nu_y");
        positive(m.nu_xy, "nu_xy");
        positive(m.a_x, "a_x");
        positive(m.a_y, "a_y");
        positive(m.a_xy, "a_xy");
        correlation(m.rho_xy, "rho_xy");
      },
      [&](const BivariateWendlandModel& m) {
        positive(m.sigma2_x, "sigma2_x");
        positive(m.sigma2_y, "sigma2_y");
        correlation(m.rho_xy, "rho_xy");
        positive(m.c_11, "c_11");
        positive(m.c_22, "c_22");
        if (!(m.c_12 >= 0.0)) out.push_back(describe("c_12 must be non-negative", m.c_12));
        positive(m.b_11, "b_11");
        positive(m.b_22, "b_22");
        positive(m.b_12, "b_12");
        if (m.kappa < 0) out.push_back(describe("kappa must be a non-negative integer", m.kappa));
        if (!(m.nu + 2.0 * m.kappa - 1.0 > 0.0)) out.push_back(describe("nu + 2 kappa - 1 must be positive", m.nu));
        for (auto [g, name] : {std::pair{m.gamma_11, "gamma_11"}, {m.gamma_22, "gamma_22"}, {m.gamma_12, "gamma_12"}}) {
          if (!(g + 1.0 > 0.0) || !(m.nu + g + 1.0 > 0.0)) {
            out.push_back(describe(std::string(name) + " must satisfy gamma + 1 > 0 and nu + gamma + 1 > 0", g));
          }
        }
      },
      [&](const WaveModel& m) {
        positive(m.sigma2, "sigma2");
        positive(m.phi, "phi");
        correlation(m.rho_xy, "rho_xy");
      },
      [&](const ExponentialSeparable& m) {
        positive(m.sigma2, "sigma2");
        positive(m.phi_s, "phi_s");
        positive(m.phi_t, "phi_t");
      },
      [&](const Iacocesare& m) {
        positive(m.sigma2, "sigma2");
        positive(m.phi_s, "phi_s");
        positive(m.phi_t, "phi_t");
        positive(m.beta, "beta");
        if (!(m.alpha_s > 0.0 && m.alpha_s <= 2.0)) out.push_back(describe("alpha_s must lie in (0, 2]", m.alpha_s));
        if (!(m.alpha_t > 0.0 && m.alpha_t <= 2.0)) out.push_back(describe("alpha_t must lie in (0, 2]", m.alpha_t));
      },
  }, model);
  return out;
}

// Positive (semi)definite up to round-off. Cholesky first; a singular but
// PSD matrix (e.g. rho = 1 with identical margins) passes through the
// pivoted LDL^T check.
bool factorizes(const MatrixXd& c) {
  Eigen::LLT<MatrixXd> llt(c);
  if (llt.info() == Eigen::Success) return true;
  return semidefinite_ldlt(c, c.diagonal().cwiseAbs().maxCoeff()).has_value();
}

Eigen::MatrixX2d probe_sites(double spacing) {
  Eigen::MatrixX2d coords(36, 2);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) coords.row(r * 6 + c) << c * spacing, r * spacing;
  }
  return coords;
}

}  // namespace

std::optional<MatrixXd> semidefinite_ldlt(const MatrixXd& c, double scale) {
  Eigen::LDLT<MatrixXd> ldlt(c);
  const VectorXd d = ldlt.vectorD();
  if (!d.allFinite() || d.minCoeff() < -1e-10 * scale) return std::nullopt;
  MatrixXd l = ldlt.matrixL();
  l = l * d.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  MatrixXd r = ldlt.transpositionsP().transpose() * l;
  if (((r * r.transpose()) - c).cwiseAbs().maxCoeff() > 1e-9 * scale) return std::nullopt;
  return r;
}

// ---------------------------------------------------------------------------

BivariateWendlandModel BivariateWendlandModel::normalized() const {
  BivariateWendlandModel out = *this;
  out.c_11 = 1.0 / wendland_scale(*this, 1.0, b_11, gamma_11);
  out.c_22 = 1.0 / wendland_scale(*this, 1.0, b_22, gamma_22);
  out.c_12 = 1.0 / wendland_scale(*this, 1.0, b_12, gamma_12);
  return out;
}

CovarianceModel to_covariance_model(const SpatialModel& model) {
  return std::visit([](const auto& m) -> CovarianceModel { return m; }, model);
}

CovarianceModel to_covariance_model(const SpatioTemporalModel& model) {
  return std::visit([](const auto& m) -> CovarianceModel { return m; }, model);
}

bool is_spatiotemporal(const CovarianceModel& model) {
  return std::holds_alternative<ExponentialSeparable>(model) || std::holds_alternative<Iacocesare>(model);
}

SpatialModel as_spatial(const CovarianceModel& model) {
  return std::visit([](const auto& m) -> SpatialModel {
    using T = std::decay_t<decltype(m)>;
    if constexpr (std::is_constructible_v<SpatialModel, T>) {
      return m;
    } else {
      throw DomainError("as_spatial: model is a space-time family");
    }
  }, model);
}

SpatioTemporalModel as_spatiotemporal(const CovarianceModel& model) {
  return std::visit([](const auto& m) -> SpatioTemporalModel {
    using T = std::decay_t<decltype(m)>;
    if constexpr (std::is_constructible_v<SpatioTemporalModel, T>) {
      return m;
    } else {
      throw DomainError("as_spatiotemporal: model is a bivariate spatial family");
    }
  }, model);
}

std::string_view family_name(const CovarianceModel& model) {
  return std::visit(overloaded{
      [](const BivariateMaternModel&) { return std::string_view("matern"); },
      [](const BivariateWendlandModel&) { return std::string_view("wendland"); },
      [](const WaveModel&) { return std::string_view("wave"); },
      [](const ExponentialSeparable&) { return std::string_view("exponential"); },
      [](const Iacocesare&) { return std::string_view("iacocesare"); },
  }, model);
}

// ---------------------------------------------------------------------------

double matern_correlation(double h, double nu, double a) {
  require_positive(nu, "smoothness", "matern_correlation");
  require_positive(a, "decay", "matern_correlation");
  if (!(h >= 0.0)) throw DomainError("matern_correlation: lag must be non-negative");
  if (h == 0.0) return 1.0;
  const double x = a * h;
  if (!std::isfinite(x)) return 0.0;
  // x^nu K_nu(x) -> Gamma(nu) 2^(nu-1); the leading term of K_nu overflows
  // long before the correlation departs from one in double precision.
  if (nu * std::log(2.0 / x) > 600.0) return 1.0;
  const double log_m = (1.0 - nu) * std::numbers::ln2 - std::lgamma(nu) + nu * std::log(x) + log_bessel_k(nu, x);
  return std::min(1.0, std::exp(log_m));
}

double gw_correlation(double h, int kappa, double mu) {
  if (kappa < 0) throw DomainError("gw_correlation: kappa must be a non-negative integer");
  require_positive(mu, "mu", "gw_correlation");
  if (!(h >= 0.0)) throw DomainError("gw_correlation: lag must be non-negative");
  if (h >= 1.0) return 0.0;
  if (kappa == 0) return std::pow((1.0 - h) * (1.0 + h), mu);

  // With u = 1 - (1-h) v the integrand becomes (1-h)^(mu+kappa) v^mu
  // (1-v)^(kappa-1) P(v), P(v) = (1+h - (1-h) v)^(kappa-1) (1 - (1-h) v),
  // so the integral is a finite sum of beta functions.
  const double len = 1.0 - h;
  std::vector<double> poly{1.0};
  auto multiply = [&](double c0, double c1) {
    std::vector<double> next(poly.size() + 1, 0.0);
    for (std::size_t j = 0; j < poly.size(); ++j) {
      next[j] += c0 * poly[j];
      next[j + 1] += c1 * poly[j];
    }
    poly = std::move(next);
  };
  for (int i = 0; i < kappa - 1; ++i) multiply(1.0 + h, -len);
  multiply(1.0, -len);
  double sum = 0.0;
  for (std::size_t j = 0; j < poly.size(); ++j) sum += poly[j] * std::beta(mu + double(j) + 1.0, double(kappa));
  const double value = std::pow(len, mu + kappa) * sum / std::beta(2.0 * kappa, mu + 1.0);
  if (!std::isfinite(value)) throw NumericalError("gw_correlation: non-finite value");
  return std::clamp(value, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

Eigen::Matrix2d covariance_block(const SpatialModel& model, double h) {
  if (!(h >= 0.0)) throw DomainError("covariance: lag must be non-negative");
  Eigen::Matrix2d c;
  std::visit(overloaded{
      [&](const BivariateMaternModel& m) {
        const double cxy = m.rho_xy == 0.0 ? 0.0
                                          : m.rho_xy * std::sqrt(m.sigma2_x * m.sigma2_y) *
                                                matern_correlation(h, m.nu_xy, m.a_xy);
        c << m.sigma2_x * matern_correlation(h, m.nu_x, m.a_x), cxy, cxy,
            m.sigma2_y * matern_correlation(h, m.nu_y, m.a_y);
      },
      [&](const BivariateWendlandModel& m) {
        const double cxy = m.rho_xy * std::sqrt(m.sigma2_x * m.sigma2_y) * wendland_entry(m, m.c_12, m.b_12, m.gamma_12, h);
        c << m.sigma2_x * wendland_entry(m, m.c_11, m.b_11, m.gamma_11, h), cxy, cxy,
            m.sigma2_y * wendland_entry(m, m.c_22, m.b_22, m.gamma_22, h);
      },
      [&](const WaveModel& m) {
        require_positive(m.phi, "phi", "wave");
        const double r = wave_correlation(h, m.phi);
        c << m.sigma2 * r, m.rho_xy * m.sigma2 * r, m.rho_xy * m.sigma2 * r, m.sigma2 * r;
      },
  }, model);
  return c;
}

double cross_covariance(const SpatialModel& model, double h) { return covariance_block(model, h)(0, 1); }

double sigma_d2_spatial(const SpatialModel& model, double h) {
  const Eigen::Matrix2d at_zero = covariance_block(model, 0.0);
  const double cxy = cross_covariance(model, h);
  const double total = at_zero(0, 0) + at_zero(1, 1);
  const double value = total - 2.0 * cxy;
  if (value < 0.0) {
    if (value >= -1e-12 * total) return 0.0;
    throw ModelValidityError({describe("sigma_D^2 is negative; cross-covariance exceeds the marginal variances", value)});
  }
  return value;
}

double st_correlation(const SpatioTemporalModel& model, double h, double u) {
  if (!(h >= 0.0)) throw DomainError("st_correlation: lag must be non-negative");
  if (!std::isfinite(u)) throw DomainError("st_correlation: time lag must be finite");
  return std::visit(overloaded{
      [&](const ExponentialSeparable& m) {
        require_positive(m.phi_s, "phi_s", "st_correlation");
        require_positive(m.phi_t, "phi_t", "st_correlation");
        return exponential_separable_correlation(h, u, m.phi_s, m.phi_t);
      },
      [&](const Iacocesare& m) {
        require_positive(m.phi_s, "phi_s", "st_correlation");
        require_positive(m.phi_t, "phi_t", "st_correlation");
        require_positive(m.alpha_s, "alpha_s", "st_correlation");
        require_positive(m.alpha_t, "alpha_t", "st_correlation");
        require_positive(m.beta, "beta", "st_correlation");
        return iacocesare_correlation(h, u, m.phi_s, m.phi_t, m.alpha_s, m.alpha_t, m.beta);
      },
  }, model);
}

double st_variance(const SpatioTemporalModel& model) {
  return std::visit([](const auto& m) { return m.sigma2; }, model);
}

double st_covariance(const SpatioTemporalModel& model, double h, double u) {
  return st_variance(model) * st_correlation(model, h, u);
}

double st_sigma_d2(const SpatioTemporalModel& model, double h, double u) {
  if (!(h >= 0.0)) throw DomainError("st_sigma_d2: lag must be non-negative");
  if (!std::isfinite(u)) throw DomainError("st_sigma_d2: time lag must be finite");
  // 1 - R computed with expm1/log1p so that small lags keep full precision.
  const double one_minus_r = std::visit(overloaded{
      [&](const ExponentialSeparable& m) {
        require_positive(m.phi_s, "phi_s", "st_sigma_d2");
        require_positive(m.phi_t, "phi_t", "st_sigma_d2");
        return -std::expm1(-h / m.phi_s - std::abs(u) / m.phi_t);
      },
      [&](const Iacocesare& m) {
        (void)st_correlation(m, h, u);  // parameter checks
        const double s = std::pow(h / m.phi_s, m.alpha_s) + std::pow(std::abs(u) / m.phi_t, m.alpha_t);
        return -std::expm1(-m.beta * std::log1p(s));
      },
  }, model);
  return 2.0 * st_variance(model) * one_minus_r;
}

double sigma_d2(const CovarianceModel& model, Lag lag) {
  if (is_spatiotemporal(model)) return st_sigma_d2(as_spatiotemporal(model), lag.h, lag.u);
  return sigma_d2_spatial(as_spatial(model), lag.h);
}

double practical_range(const Iacocesare& model, double u) {
  require_positive(model.phi_s, "phi_s", "practical_range");
  require_positive(model.phi_t, "phi_t", "practical_range");
  require_positive(model.alpha_s, "alpha_s", "practical_range");
  require_positive(model.alpha_t, "alpha_t", "practical_range");
  require_positive(model.beta, "beta", "practical_range");
  const double bracket = std::pow(20.0, 1.0 / model.beta) - 1.0 - std::pow(std::abs(u) / model.phi_t, model.alpha_t);
  if (!(bracket > 0.0)) {
    throw DomainError(describe("practical_range: 20^(1/beta) - 1 - (|u|/phi_t)^alpha_t must be positive", bracket));
  }
  return model.phi_s * std::pow(bracket, 1.0 / model.alpha_s);
}

// ---------------------------------------------------------------------------

MatrixXd covariance_matrix(const SpatialModel& model, const Eigen::Ref<const Eigen::MatrixX2d>& coords) {
  const Eigen::Index n = coords.rows();
  MatrixXd c(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const Eigen::Matrix2d block = covariance_block(model, (coords.row(i) - coords.row(j)).norm());
      c(i, j) = c(j, i) = block(0, 0);
      c(n + i, n + j) = c(n + j, n + i) = block(1, 1);
      c(i, n + j) = c(n + j, i) = block(0, 1);
      c(j, n + i) = c(n + i, j) = block(1, 0);
    }
  }
  return c;
}

MatrixXd covariance_matrix(const SpatioTemporalModel& model, const Eigen::Ref<const Eigen::MatrixX2d>& coords,
                           const Eigen::Ref<const VectorXd>& times) {
  if (coords.rows() != times.size()) throw DomainError("covariance_matrix: coordinate and time counts differ");
  const Eigen::Index n = coords.rows();
  const double variance = st_variance(model);
  MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    c(i, i) = variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      c(i, j) = c(j, i) = st_covariance(model, (coords.row(i) - coords.row(j)).norm(), times(i) - times(j));
    }
  }
  return c;
}

// ---------------------------------------------------------------------------

std::vector<std::string> parameter_names(const CovarianceModel& model) {
  return std::visit(overloaded{
      [](const BivariateMaternModel&) {
        return std::vector<std::string>{"sigma2_x", "sigma2_y", "nu_x", "nu_y", "nu_xy", "a_x", "a_y", "a_xy", "rho_xy"};
      },
      [](const BivariateWendlandModel&) {
        return std::vector<std::string>{"sigma2_x", "sigma2_y", "rho_xy", "c_11", "c_22", "c_12", "b_11",
                                        "b_22", "b_12", "gamma_11", "gamma_22", "gamma_12", "nu"};
      },
      [](const WaveModel&) { return std::vector<std::string>{"sigma2", "phi", "rho_xy"}; },
      [](const ExponentialSeparable&) { return std::vector<std::string>{"phi_s", "phi_t", "sigma2"}; },
      [](const Iacocesare&) {
        return std::vector<std::string>{"phi_s", "phi_t", "sigma2", "alpha_s", "alpha_t", "beta"};
      },
  }, model);
}

VectorXd parameters(const CovarianceModel& model) {
  return std::visit(overloaded{
      [](const BivariateMaternModel& m) {
        VectorXd t(9);
        t << m.sigma2_x, m.sigma2_y, m.nu_x, m.nu_y, m.nu_xy, m.a_x, m.a_y, m.a_xy, m.rho_xy;
        return t;
      },
      [](const BivariateWendlandModel& m) {
        VectorXd t(13);
        t << m.sigma2_x, m.sigma2_y, m.rho_xy, m.c_11, m.c_22, m.c_12, m.b_11, m.b_22, m.b_12, m.gamma_11,
            m.gamma_22, m.gamma_12, m.nu;
        return t;
      },
      [](const WaveModel& m) {
        VectorXd t(3);
        t << m.sigma2, m.phi, m.rho_xy;
        return t;
      },
      [](const ExponentialSeparable& m) {
        VectorXd t(3);
        t << m.phi_s, m.phi_t, m.sigma2;
        return t;
      },
      [](const Iacocesare& m) {
        VectorXd t(6);
        t << m.phi_s, m.phi_t, m.sigma2, m.alpha_s, m.alpha_t, m.beta;
        return t;
      },
  }, model);
}

CovarianceModel with_parameters(const CovarianceModel& model, const Eigen::Ref<const VectorXd>& t) {
  if (t.size() != parameters(model).size()) throw DomainError("with_parameters: parameter vector has wrong length");
  return std::visit(overloaded{
      [&](BivariateMaternModel m) -> CovarianceModel {
        m.sigma2_x = t[0]; m.sigma2_y = t[1]; m.nu_x = t[2]; m.nu_y = t[3]; m.nu_xy = t[4];
        m.a_x = t[5]; m.a_y = t[6]; m.a_xy = t[7]; m.rho_xy = t[8];
        return m;
      },
      [&](BivariateWendlandModel m) -> CovarianceModel {
        m.sigma2_x = t[0]; m.sigma2_y = t[1]; m.rho_xy = t[2];
        m.c_11 = t[3]; m.c_22 = t[4]; m.c_12 = t[5];
        m.b_11 = t[6]; m.b_22 = t[7]; m.b_12 = t[8];
        m.gamma_11 = t[9]; m.gamma_22 = t[10]; m.gamma_12 = t[11]; m.nu = t[12];
        return m;
      },
      [&](WaveModel m) -> CovarianceModel {
        m.sigma2 = t[0]; m.phi = t[1]; m.rho_xy = t[2];
        return m;
      },
      [&](ExponentialSeparable m) -> CovarianceModel {
        m.phi_s = t[0]; m.phi_t = t[1]; m.sigma2 = t[2];
        return m;
      },
      [&](Iacocesare m) -> CovarianceModel {
        m.phi_s = t[0]; m.phi_t = t[1]; m.sigma2 = t[2]; m.alpha_s = t[3]; m.alpha_t = t[4]; m.beta = t[5];
        return m;
      },
  }, model);
}

VectorXd grad_sigma_d2(const CovarianceModel& model, Lag lag) {
  const VectorXd theta = parameters(model);
  VectorXd grad(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double step = std::max(1e-6 * std::abs(theta[i]), 1e-8);
    VectorXd up = theta;
    VectorXd down = theta;
    up[i] += step;
    down[i] -= step;
    double derivative = std::numeric_limits<double>::quiet_NaN();
    try {
      derivative = (sigma_d2(with_parameters(model, up), lag) - sigma_d2(with_parameters(model, down), lag)) / (2.0 * step);
    } catch (const std::exception&) {
      // left as NaN; reported below with the parameter index
    }
    if (!std::isfinite(derivative)) {
      throw NumericalError("grad_sigma_d2: non-finite derivative for parameter " + std::to_string(i) + " (" +
                           parameter_names(model)[static_cast<std::size_t>(i)] + ")");
    }
    grad[i] = derivative;
  }
  return grad;
}

// ---------------------------------------------------------------------------

ValidityReport validate_model(const CovarianceModel& model) {
  ValidityReport report;
  report.violations = range_violations(model);
  if (!report.violations.empty()) {
    report.valid = false;
    return report;
  }
  const double spacing = probe_spacing(model);
  const Eigen::MatrixX2d sites = probe_sites(spacing);
  MatrixXd c;
  try {
    if (is_spatiotemporal(model)) {
      Eigen::MatrixX2d coords(sites.rows() * 3, 2);
      VectorXd times(sites.rows() * 3);
      for (int t = 0; t < 3; ++t) {
        coords.middleRows(t * sites.rows(), sites.rows()) = sites;
        times.segment(t * sites.rows(), sites.rows()).setConstant(t + 1.0);
      }
      c = covariance_matrix(as_spatiotemporal(model), coords, times);
    } else {
      c = covariance_matrix(as_spatial(model), sites);
    }
  } catch (const std::exception& e) {
    report.valid = false;
    report.violations.emplace_back(std::string("covariance evaluation failed: ") + e.what());
    return report;
  }
  if (!c.allFinite() || !factorizes(c)) {
    report.valid = false;
    report.violations.emplace_back("joint covariance on the 6x6 probe grid is not positive definite");
  }
  return report;
}

void require_valid(const CovarianceModel& model) {
  ValidityReport report = validate_model(model);
  if (!report.valid) throw ModelValidityError(std::move(report.violations));
}

}  // namespace spa
