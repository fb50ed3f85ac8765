#include "spa/special.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

#include "spa/errors.hpp"

namespace spa {
namespace {

// Taylor coefficients of 1/Gamma(1 + z) about z = 0.
constexpr std::array<double, 27> kRecipGammaTaylor = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
};

struct TemmeGammas {
  double gam1;    // (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
  double gam2;    // (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
  double gampl;   // 1/Gamma(1+mu)
  double gammi;   // 1/Gamma(1-mu)
};

// |mu| <= 1/2. Even/odd splitting of the series avoids the 0/0 in gam1.
TemmeGammas temme_gammas(double mu) {
  const double mu2 = mu * mu;
  double even = 0.0;
  double odd = 0.0;
  for (std::size_t k = kRecipGammaTaylor.size(); k-- > 0;) {
    if (k % 2 == 0) {
      even = even * mu2 + kRecipGammaTaylor[k];
    } else {
      odd = odd * mu2 + kRecipGammaTaylor[k];
    }
  }
  // even(mu) = sum c_{2j} mu^{2j}, odd(mu) = sum c_{2j+1} mu^{2j}
  return {-odd, even, even + mu * odd, even - mu * odd};
}

constexpr int kMaxIterations = 100000;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Returns exp(x) K_mu(x) and exp(x) K_{mu+1}(x) for |mu| <= 1/2.
std::pair<double, double> scaled_k_pair(double mu, double x) {
  const double mu2 = mu * mu;
  const double xi = 1.0 / x;
  if (x < 2.0) {
    const double x2 = 0.5 * x;
    const double pimu = std::numbers::pi * mu;
    const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
    double d = -std::log(x2);
    double e = mu * d;
    const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
    const TemmeGammas g = temme_gammas(mu);
    double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
    double sum = ff;
    e = std::exp(e);
    double p = 0.5 * e / g.gampl;
    double q = 0.5 / (e * g.gammi);
    double c = 1.0;
    d = x2 * x2;
    double sum1 = p;
    int i = 1;
    for (; i <= kMaxIterations; ++i) {
      ff = (i * ff + p + q) / (i * i - mu2);
      c *= d / i;
      p /= (i - mu);
      q /= (i + mu);
      const double del = c * ff;
      sum += del;
      sum1 += c * (p - i * ff);
      if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    if (i > kMaxIterations) throw NumericalError("bessel_k: series did not converge");
    const double scale = std::exp(x);
    return {sum * scale, sum1 * 2.0 * xi * scale};
  }

  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i <= kMaxIterations; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i > kMaxIterations) throw NumericalError("bessel_k: continued fraction did not converge");
  h = a1 * h;
  const double kmu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  const double k1 = kmu * (mu + x + 0.5 - h) * xi;
  return {kmu, k1};
}

}  // namespace

double bessel_k_scaled(double nu, double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("bessel_k: argument must be positive and finite");
  if (!std::isfinite(nu)) throw DomainError("bessel_k: order must be finite");
  nu = std::abs(nu);  // K_{-nu} = K_nu
  const int steps = static_cast<int>(std::floor(nu + 0.5));
  const double mu = nu - steps;
  auto [kmu, k1] = scaled_k_pair(mu, x);
  const double two_over_x = 2.0 / x;
  for (int i = 1; i <= steps; ++i) {
    const double next = (mu + i) * two_over_x * k1 + kmu;
    kmu = k1;
    k1 = next;
  }
  return kmu;
}

double bessel_k(double nu, double x) { return bessel_k_scaled(nu, x) * std::exp(-x); }

double log_bessel_k(double nu, double x) { return std::log(bessel_k_scaled(nu, x)) - x; }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace spa
