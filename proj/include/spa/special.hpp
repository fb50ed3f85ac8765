#pragma once

#include <cmath>
#include <numbers>

namespace spa {

/// Modified Bessel function of the second kind K_nu(x), x > 0, any real nu.
/// Temme's series for x < 2, Steed's continued fraction otherwise, then
/// forward recurrence in the order.
double bessel_k(double nu, double x);

/// exp(x) * K_nu(x); finite for arguments where K_nu itself underflows.
double bessel_k_scaled(double nu, double x);

/// log K_nu(x).
double log_bessel_k(double nu, double x);

template <typename Scalar>
Scalar normal_pdf(Scalar z) {
  using std::exp;
  const Scalar inv_sqrt_2pi = Scalar(std::numbers::inv_sqrtpi_v<long double> / std::numbers::sqrt2_v<long double>);
  return inv_sqrt_2pi * exp(-z * z / Scalar(2));
}

/// Standard normal CDF via erfc, accurate in both tails.
template <typename Scalar>
Scalar normal_cdf(Scalar z) {
  using std::erfc;
  return Scalar(0.5) * erfc(-z / std::numbers::sqrt2_v<Scalar>);
}

/// Upper tail 1 - Phi(z) without cancellation.
template <typename Scalar>
Scalar normal_sf(Scalar z) {
  using std::erfc;
  return Scalar(0.5) * erfc(z / std::numbers::sqrt2_v<Scalar>);
}

/// Inverse of the standard normal CDF, p in (0, 1).
double normal_quantile(double p);

}  // namespace spa
