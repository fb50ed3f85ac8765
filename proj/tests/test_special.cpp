#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "spa/special.hpp"

using doctest::Approx;

TEST_CASE("bessel_k: half order closed form") {
  for (double x = 0.01; x <= 30.0; x *= 1.07) {
    const double expected = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x);
    CHECK(std::abs(spa::bessel_k(0.5, x) / expected - 1.0) <= 1e-12);
  }
}

TEST_CASE("bessel_k: symmetric in the order") {
  for (double nu : {0.1, 0.5, 1.3, 2.0, 3.75, 7.2}) {
    for (double x = 0.01; x <= 30.0; x *= 1.3) {
      CHECK(std::abs(spa::bessel_k(-nu, x) / spa::bessel_k(nu, x) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("bessel_k: matches the standard library") {
  for (double nu : {0.0, 0.2, 0.5, 1.0, 1.5, 2.4, 5.0, 12.5}) {
    for (double x : {1e-3, 0.05, 0.4, 1.0, 1.99, 2.01, 5.0, 17.0, 60.0}) {
      const double ref = std::cyl_bessel_k(nu, x);
      CAPTURE(nu);
      CAPTURE(x);
      CHECK(std::abs(spa::bessel_k(nu, x) / ref - 1.0) <= 1e-10);
      CHECK(std::abs(spa::log_bessel_k(nu, x) - std::log(ref)) <= 1e-10);
    }
  }
}

TEST_CASE("bessel_k: scaled form survives underflow") {
  const double x = 900.0;
  const double expected = std::sqrt(std::numbers::pi / (2.0 * x));
  CHECK(spa::bessel_k_scaled(0.5, x) == Approx(expected).epsilon(1e-12));
  CHECK(std::isfinite(spa::log_bessel_k(3.0, 1000.0)));
}

TEST_CASE("normal distribution helpers") {
  for (double z = -37.0; z <= 8.0; z += 0.25) {
    const double ref = oracle::phi_cdf(z);
    CHECK(spa::normal_cdf(z) == Approx(ref).epsilon(1e-12));
    CHECK(spa::normal_sf(-z) == Approx(ref).epsilon(1e-12));
  }
  for (double p : {1e-12, 1e-6, 0.025, 0.3, 0.5, 0.8, 0.975, 1 - 1e-9}) {
    CHECK(spa::normal_cdf(spa::normal_quantile(p)) == Approx(p).epsilon(1e-12));
  }
  CHECK(spa::normal_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-14));
}
