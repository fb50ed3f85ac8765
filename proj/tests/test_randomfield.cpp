#include <doctest.h>

#include <cmath>
#include <sstream>

#include "spa/estimation.hpp"
#include "spa/randomfield.hpp"

using doctest::Approx;
using namespace spa;

namespace {

const ExponentialSeparable kTruth{0.1, 6.676, 1.0};
const TrendCoefficients kTrend{0.5, -0.1};

}  // namespace

TEST_CASE("simulate_st: zero variance gives the trend exactly") {
  const GridSpec grid{5, 1.0, 4};
  const FieldSample f = simulate_st(grid, ExponentialSeparable{0.0, 6.676, 1.0}, kTrend, 3);
  REQUIRE(f.size() == grid.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) CHECK(f.values(i, 0) == kTrend.mean_at(f.times[i]));
}

TEST_CASE("simulate_st: layout is time-major, row-major over sites") {
  const GridSpec grid{3, 2.0, 2};
  const FieldSample f = simulate_st(grid, kTruth, kTrend, 1);
  CHECK(f.coords.row(0) == Eigen::RowVector2d(0.0, 0.0));
  CHECK(f.coords.row(1) == Eigen::RowVector2d(2.0, 0.0));
  CHECK(f.coords.row(3) == Eigen::RowVector2d(0.0, 2.0));
  CHECK(f.times[8] == 1.0);
  CHECK(f.times[9] == 2.0);
  CHECK(f.coords.row(9) == Eigen::RowVector2d(0.0, 0.0));
  CHECK(f.extent() == 6.0);
  CHECK(f.method == "kronecker");
}

TEST_CASE("simulate_st: reproducible and stream-separated") {
  const GridSpec grid{6, 1.0, 3};
  const FieldSample a = simulate_st(grid, kTruth, kTrend, 42, 7);
  const FieldSample b = simulate_st(grid, kTruth, kTrend, 42, 7);
  const FieldSample c = simulate_st(grid, kTruth, kTrend, 42, 8);
  const FieldSample d = simulate_st(grid, kTruth, kTrend, 43, 7);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(a.values != d.values);

  const Iacocesare iac{0.1, 4.0, 1.5, 1.0, 1.0, 2.0};
  CHECK(simulate_st(grid, iac, kTrend, 5).values == simulate_st(grid, iac, kTrend, 5).values);
  CHECK(simulate_st(grid, iac, kTrend, 5).method == "cholesky");
}

TEST_CASE("simulate_st: replicate means match the trend (CLT)") {
  const GridSpec grid{4, 1.0, 3};
  const FieldSampler sampler(grid, kTruth, kTrend);
  const int reps = 200;
  const Eigen::Index site = 2 * grid.sites() + 5;
  double sum = 0.0;
  double t = 0.0;
  for (int r = 0; r < reps; ++r) {
    const FieldSample f = sampler.draw(11, r);
    t = f.times[site];
    sum += f.values(site, 0) - kTrend.mean_at(t);
  }
  const double se = std::sqrt(kTruth.sigma2 / reps);
  CHECK(std::abs(sum / reps) < 3.0 * se);
}

TEST_CASE("simulate_st: empirical covariance between two points") {
  const GridSpec grid{4, 1.0, 3};
  const Iacocesare model{0.1, 4.0, 1.5, 1.0, 1.0, 2.0};
  const FieldSampler sampler(grid, model, kTrend);
  const Eigen::Index i = 1;                        // (1, 0), t = 1
  const Eigen::Index j = 2 * grid.sites() + 6;     // (2, 1), t = 3
  const int reps = 1000;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  FieldSample f;
  for (int r = 0; r < reps; ++r) {
    f = sampler.draw(5, r);
    const double x = f.values(i, 0) - kTrend.mean_at(f.times[i]);
    const double y = f.values(j, 0) - kTrend.mean_at(f.times[j]);
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  const double h = (f.coords.row(i) - f.coords.row(j)).norm();
  const double target = st_covariance(model, h, 2.0);
  const double se = std::sqrt((sxx / reps) * (syy / reps) + target * target) / std::sqrt(reps);
  CHECK(std::abs(sxy / reps - target) < 3.0 * se);
}

TEST_CASE("simulate_bivariate: identical components when rho = 1") {
  BivariateMaternModel m;
  m.rho_xy = 1.0;
  m.nu_x = m.nu_y = m.nu_xy = 1.5;
  m.a_x = m.a_y = m.a_xy = 0.7;
  const FieldSample f = simulate_bivariate(GridSpec{6, 1.0, 1}, m, {0.3, 0.3}, 9);
  REQUIRE(f.bivariate());
  CHECK((f.values.col(0) - f.values.col(1)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("simulate_bivariate: rho = 0 gives zero cross-correlation") {
  BivariateMaternModel m;
  const GridSpec grid{3, 1.0, 1};
  const FieldSampler sampler(grid, m, {1.0, 0.0});
  const int reps = 500;
  double sxy = 0.0;
  for (int r = 0; r < reps; ++r) {
    const FieldSample f = sampler.draw(4, r);
    sxy += (f.values(4, 0) - 1.0) * f.values(4, 1);
  }
  CHECK(std::abs(sxy / reps) < 3.0 / std::sqrt(double(reps)));
}

TEST_CASE("simulate_bivariate: the Matérn sensitivity parameters") {
  for (double axy : {0.1, 0.15, 0.2, 0.25, 0.3}) {
    for (double s2y : {0.8, 0.9, 1.0, 1.1, 1.2}) {
      BivariateMaternModel m;
      m.sigma2_x = 1.0;
      m.sigma2_y = s2y;
      m.a_x = m.a_y = 1.0;
      m.a_xy = axy;
      m.rho_xy = 0.0;
      CHECK_NOTHROW(simulate_bivariate(GridSpec{8, 1.0, 1}, m, {1.0, 0.5}, 1));
    }
  }
  // With a_XY < a_X = a_Y the joint model is only valid for small rho.
  BivariateMaternModel strong;
  strong.a_xy = 0.1;
  strong.rho_xy = 0.5;
  CHECK_FALSE(validate_model(strong).valid);
  CHECK_THROWS_AS(simulate_bivariate(GridSpec{8, 1.0, 1}, strong, {1.0, 0.5}, 1), ModelValidityError);
}

TEST_CASE("simulate_bivariate: cross-covariance matches C_XY empirically") {
  BivariateMaternModel m;
  m.sigma2_y = 2.0;
  m.rho_xy = 0.6;
  const GridSpec grid{3, 1.0, 1};
  const FieldSampler sampler(grid, m, {0.0, 0.0});
  const int reps = 2000;
  double s = 0.0;
  for (int r = 0; r < reps; ++r) {
    const FieldSample f = sampler.draw(8, r);
    s += f.values(0, 0) * f.values(1, 1);
  }
  const double target = cross_covariance(m, 1.0);
  const double se = std::sqrt(1.0 * 2.0 + target * target) / std::sqrt(double(reps));
  CHECK(std::abs(s / reps - target) < 3.0 * se);
}

TEST_CASE("assemble_covariance: examples") {
  Eigen::MatrixX2d one(1, 2);
  one << 0.0, 0.0;
  const MatrixXd c1 = assemble_covariance(ExponentialSeparable{0.37, 2.0, 1.0}, one, VectorXd::Ones(1));
  REQUIRE(c1.rows() == 1);
  CHECK(c1(0, 0) == 0.37);

  Eigen::MatrixX2d two(2, 2);
  two << 0.0, 0.0, 3.0, 4.0;
  const MatrixXd c2 = assemble_covariance(kTruth, two, VectorXd::Ones(2));
  CHECK(c2(0, 1) == Approx(0.1 * std::exp(-5.0 / 6.676)).epsilon(1e-15));

  const MatrixXd c = assemble_covariance(GridSpec{6, 1.0, 3}, kTruth);
  CHECK(c.llt().info() == Eigen::Success);
  CHECK(c == c.transpose());

  CHECK_THROWS_AS(assemble_covariance(GridSpec{201, 1.0, 1}, kTruth), DomainError);
  CHECK_THROWS_AS(simulate_st(GridSpec{64, 1.0, 10}, kTruth, kTrend, 1), DomainError);
}

TEST_CASE("semidefinite factor of a singular matrix") {
  MatrixXd c(3, 3);
  c << 1, 1, 0, 1, 1, 0, 0, 0, 2;
  const auto r = semidefinite_ldlt(c, 2.0);
  REQUIRE(r.has_value());
  CHECK(((*r) * r->transpose() - c).cwiseAbs().maxCoeff() < 1e-12);
  MatrixXd bad = c;
  bad(0, 1) = bad(1, 0) = 1.5;
  CHECK_FALSE(semidefinite_ldlt(bad, 2.0).has_value());
}

TEST_CASE("field files round-trip") {
  const FieldSample f = simulate_st(GridSpec{3, 1.5, 2}, kTruth, kTrend, 12, 3);
  std::stringstream ss;
  write_field(ss, f);
  const FieldSample g = read_field(ss);
  CHECK(g.values == f.values);
  CHECK(g.coords == f.coords);
  CHECK(g.times == f.times);
  REQUIRE(g.grid.has_value());
  CHECK(g.grid->n_s == 3);
  CHECK(g.grid->spacing == 1.5);
  CHECK(g.seed == 12);
  CHECK(g.stream == 3);

  BivariateMaternModel m;
  const FieldSample b = simulate_bivariate(GridSpec{3, 1.0, 1}, m, {0.0, 1.0}, 2);
  std::stringstream sb;
  write_field(sb, b);
  CHECK(read_field(sb).values == b.values);

  std::stringstream bad("x,y,z\n1,2,3\n");
  CHECK_THROWS_AS(read_field(bad), DomainError);
}

TEST_CASE("empirical semivariogram of simulated fields approaches the model") {
  const GridSpec grid{8, 1.0, 3};
  const FieldSampler sampler(grid, kTruth, kTrend);
  PairwiseConfig cfg;
  cfg.spatial_cutoff = 3.0;
  cfg.temporal_cutoff = 1.0;
  const int reps = 200;
  std::vector<double> sum;
  std::vector<double> sum2;
  std::vector<double> hs;
  for (int r = 0; r < reps; ++r) {
    FieldSample f = sampler.draw(21, r);
    for (Eigen::Index i = 0; i < f.size(); ++i) f.values(i, 0) -= kTrend.mean_at(f.times[i]);
    const VariogramEstimate v = empirical_variogram(f, VariogramBins{}, cfg);
    if (sum.empty()) {
      sum.assign(v.spatial.size(), 0.0);
      sum2.assign(v.spatial.size(), 0.0);
      for (const auto& row : v.spatial) hs.push_back(row.h);
    }
    REQUIRE(v.spatial.size() == sum.size());
    for (std::size_t k = 0; k < sum.size(); ++k) {
      sum[k] += v.spatial[k].gamma;
      sum2[k] += v.spatial[k].gamma * v.spatial[k].gamma;
    }
  }
  for (std::size_t k = 0; k < sum.size(); ++k) {
    const double mean = sum[k] / reps;
    const double se = std::sqrt((sum2[k] / reps - mean * mean) / reps);
    const double model = 0.5 * st_sigma_d2(kTruth, hs[k], 0.0);
    CAPTURE(hs[k]);
    CHECK(std::abs(mean - model) < 3.0 * se);
  }
}
