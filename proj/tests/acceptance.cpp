// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (skips do not count).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "spa/agreement.hpp"
#include "spa/covariance.hpp"
#include "spa/estimation.hpp"
#include "spa/image_codecs.hpp"
#include "spa/imagery.hpp"

using namespace spa;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome verdict(bool ok, const std::string& detail) { return {ok ? Status::Pass : Status::Fail, detail}; }

std::string num(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

double sample_variance(const std::vector<double>& x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= double(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / double(x.size() - 1);
}

// ---------------------------------------------------------------------------

Outcome wave_golden() {
  const WaveModel wave{1.0, 1.0, 0.5};
  const double expected[] = {0.6082, 0.4986, 0.5351};
  const double hs[] = {kPi / 2, 3 * kPi / 2, 5 * kPi / 2};
  bool ok = true;
  std::string detail;
  for (int i = 0; i < 3; ++i) {
    const double v = psi_spatial(wave, 0.0, 1.0, hs[i]);
    ok = ok && std::abs(v - expected[i]) <= 5e-4;
    detail += (i ? ", " : "") + num(v, 6);
  }
  return verdict(ok, "psi = " + detail + " (expected 0.6082, 0.4986, 0.5351 +/- 5e-4)");
}

Outcome matern_consistency() {
  double worst = 0.0;
  for (int m = 0; m <= 5; ++m) {
    for (double a : {0.5, 1.0, 2.0}) {
      for (int k = 0; k <= 2000; ++k) {
        const double h = 0.01 * std::pow(5000.0, k / 2000.0);
        const double closed = matern_half_integer(h, m, a);
        const double bessel = matern_correlation(h, m + 0.5, a);
        worst = std::max(worst, std::abs(closed - bessel) / std::abs(bessel));
      }
    }
  }
  return verdict(worst <= 1e-10, "max relative difference " + num(worst, 3) + " (limit 1e-10)");
}

Outcome monotonicity() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int violations = 0;
  int checked = 0;
  // The monotone result needs c > |mu_D|; mu_D is drawn inside (-c, c).
  auto sweep = [&](const SpatialModel& model, double c, double h_max) {
    const double mu_d = 0.99 * c * (2.0 * unit(rng) - 1.0);
    double previous = psi_spatial(model, mu_d, c, 0.0);
    for (int k = 1; k < 500; ++k) {
      const double v = psi_spatial(model, mu_d, c, h_max * k / 499.0);
      if (v > previous + 1e-12) ++violations;
      previous = v;
    }
    ++checked;
  };
  while (checked < 200) {
    BivariateMaternModel m;
    m.sigma2_x = 0.2 + 3.0 * unit(rng);
    m.sigma2_y = 0.2 + 3.0 * unit(rng);
    m.nu_x = 0.2 + 2.3 * unit(rng);
    m.nu_y = 0.2 + 2.3 * unit(rng);
    m.nu_xy = 0.5 * (m.nu_x + m.nu_y) + unit(rng);
    m.a_x = 0.3 + 2.0 * unit(rng);
    m.a_y = 0.3 + 2.0 * unit(rng);
    m.a_xy = std::min(m.a_x, m.a_y) * (0.5 + 0.5 * unit(rng));
    m.rho_xy = unit(rng);
    if (!validate_model(m).valid) continue;
    sweep(m, 0.2 + 2.0 * unit(rng), 15.0 / m.a_xy);
  }
  while (checked < 400) {
    BivariateWendlandModel w;
    w.kappa = checked % 5;
    w.nu = 1.5 + w.kappa + 2.0 * unit(rng);
    w.b_11 = 0.5 + unit(rng);
    w.b_22 = 0.5 + unit(rng);
    w.b_12 = 0.5 + unit(rng);
    w.rho_xy = unit(rng);
    w = w.normalized();
    if (!validate_model(w).valid) continue;
    sweep(w, 0.2 + 2.0 * unit(rng), 1.2 * std::max({w.b_11, w.b_22, w.b_12}));
  }
  return verdict(violations == 0, std::to_string(checked) + " curves x 500 lags, " + std::to_string(violations) +
                                      " increases beyond 1e-12");
}

// Covariance of the estimates from an independent pilot Monte Carlo; the
// per-fit inverse Hessian of the composite likelihood is not a sandwich
// estimator and understates the spread.
struct Pilot {
  MatrixXd v_theta;
  double var_a1 = 0.0;
};

MonteCarloSetup small_grid(int replicates, std::uint64_t seed) {
  MonteCarloSetup s;
  s.grid = GridSpec{15, 1.0, 10};
  s.truth = ExponentialSeparable{0.1, 6.676, 1.0};
  s.trend = TrendCoefficients{0.5, -0.1};
  s.replicates = replicates;
  s.seed = seed;
  return s;
}

const Pilot& pilot() {
  static const Pilot p = [] {
    const MatrixXd v = estimate_covariance(run_monte_carlo(small_grid(1000, 5001)), false);
    return Pilot{v.bottomRightCorner(3, 3), v(1, 1)};
  }();
  return p;
}

constexpr double kC = 0.5;
const Lag kLag{1.0, 1.0};

Outcome delta_method() {
  const MonteCarloSetup setup = small_grid(500, 101);
  const auto fits = run_monte_carlo(setup);
  std::vector<double> psi_hat;
  std::vector<double> naive;
  for (const auto& f : fits) {
    psi_hat.push_back(psi_at(to_covariance_model(f.model), MeanDifference::from_trend(f.trend), kC, kLag));
    if (f.v_theta() && f.slope_variance()) {
      naive.push_back(pa_estimate(to_covariance_model(f.model), MeanDifference::from_trend(f.trend, *f.slope_variance()),
                                  kC, kLag, *f.v_theta())
                          .variance);
    }
  }
  const double empirical = sample_variance(psi_hat);
  const PaEstimate e = pa_estimate(to_covariance_model(setup.truth), MeanDifference::from_trend(setup.trend, pilot().var_a1),
                                   kC, kLag, pilot().v_theta);
  std::nth_element(naive.begin(), naive.begin() + naive.size() / 2, naive.end());
  const double rel = e.variance / empirical - 1.0;
  return verdict(std::abs(rel) <= 0.25,
                 "empirical var " + num(empirical, 4) + ", exact-partials " + num(e.variance, 4) + " (" +
                     num(100 * rel, 3) + "%, limit 25%); printed formula " + num(e.variance_printed, 4) +
                     "; per-fit Hessian median " + (naive.empty() ? "n/a" : num(naive[naive.size() / 2], 4)));
}

Outcome replication_study() {
  MonteCarloSetup setup;
  setup.replicates = 100;
  setup.seed = 1;
  const auto fits = run_monte_carlo(setup);
  const MonteCarloSummary s = summarize(fits, setup.truth, setup.trend);
  bool ok = s.rows.size() == 5;
  std::string detail;
  for (const auto& row : s.rows) {
    const bool within = std::abs(row.mean - row.truth) <= 2.0 * row.sd;
    ok = ok && within;
    detail += row.name + " " + num(row.mean, 4) + " (sd " + num(row.sd, 3) + (within ? ")" : ", OUT)") + "; ";
  }
  return verdict(ok, detail + "percent valid " + num(s.percent_valid, 4) + "%");
}

Outcome pseudo_aic_identity() {
  const double a = pseudo_aic(19668351.95, 5);
  const double b = pseudo_aic(19682852.64, 8);
  const bool ok = std::abs(a - -39336693.90) <= 0.02 && std::abs(b - -39365689.28) <= 0.02;
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << "pAIC " << a << " and " << b;
  return verdict(ok, os.str());
}

Outcome gcc_checks() {
  RgbRaster px(2, 1);
  px.g(0, 0) = 255;
  px.r(0, 1) = px.g(0, 1) = px.b(0, 1) = 100;
  const GccRaster g = gcc(px);
  bool ok = g.values(0, 0) == 1.0 && g.values(0, 1) == 1.0 / 3.0;

  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> dn(0, 255);
  RgbRaster r(60, 45);
  for (Channel* c : {&r.r, &r.g, &r.b}) {
    for (Eigen::Index i = 0; i < c->size(); ++i) (*c)(i) = dn(rng);
  }
  double worst = 0.0;
  for (int window : {3, 5, 15}) {
    const RgbRaster d = downscale_block_mean(r, window);
    worst = std::max({worst, std::abs(d.r.mean() - r.r.mean()), std::abs(d.g.mean() - r.g.mean()),
                      std::abs(d.b.mean() - r.b.mean())});
  }
  ok = ok && worst <= 1e-12;
  return verdict(ok, "G_cc " + num(g.values(0, 0), 17) + ", " + num(g.values(0, 1), 17) +
                         "; block-mean drift " + num(worst, 3));
}

Outcome test_size() {
  const MonteCarloSetup setup = small_grid(500, 202);
  const auto fits = run_monte_carlo(setup);
  const double psi0 = psi_at(to_covariance_model(setup.truth), MeanDifference::from_trend(setup.trend), kC, kLag);
  int rejections = 0;
  for (const auto& f : fits) {
    const PaEstimate e = pa_estimate(to_covariance_model(f.model), MeanDifference::from_trend(f.trend, pilot().var_a1),
                                     kC, kLag, pilot().v_theta);
    if (pa_test(e, psi0, Alternative::Less).rejected(0.05)) ++rejections;
  }
  const double rate = rejections / double(fits.size());
  return verdict(rate >= 0.03 && rate <= 0.08,
                 "rejection rate " + num(rate, 4) + " at psi0 = " + num(psi0, 6) + " (band [0.03, 0.08])");
}

Outcome practical_range_check() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    const Iacocesare m{0.05 + unit(rng), 0.5 + 20.0 * unit(rng), 0.2 + 3.0 * unit(rng), 0.1 + 1.9 * unit(rng),
                       0.1 + 1.9 * unit(rng), 0.3 + 3.0 * unit(rng)};
    const auto f = [&](double h) { return st_correlation(m, h, 0.0) - 0.05; };
    double hi = m.phi_s;
    while (f(hi) > 0.0) hi *= 2.0;
    const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13 * std::abs(b); };
    const auto root = boost::math::tools::bisect(f, 0.0, hi, tol);
    const double bisected = 0.5 * (root.first + root.second);
    worst = std::max(worst, std::abs(practical_range(m, 0.0) - bisected) / bisected);
  }
  const Iacocesare image_model{0.00044, 6.53170, 2.08316, 1.06297, 0.95371, 1.94867};
  return verdict(worst <= 1e-6, "max relative difference " + num(worst, 3) +
                                    "; fitted image model gives " + num(practical_range(image_model, 0.0), 5) +
                                    " pixels against a reference value of 12.7 (reported only)");
}

Outcome phenocam() {
  const char* dir = std::getenv("SPA_PHENOCAM_DIR");
  if (!dir) return {Status::Skip, "set SPA_PHENOCAM_DIR to a directory of site images to run"};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string ext = entry.path().extension().string();
    if (entry.is_regular_file() && (ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".ppm")) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.size() < 2) return {Status::Skip, "fewer than two images in " + std::string(dir)};

  std::vector<GccRaster> rasters;
  for (const auto& f : files) {
    const RgbRaster img = read_image(f);
    Eigen::Index x0 = (img.width() - 570) / 2;
    Eigen::Index y0 = (img.height() - 660) / 2;
    if (const char* clip_at = std::getenv("SPA_PHENOCAM_CLIP")) {
      std::istringstream ss(clip_at);
      char comma = 0;
      ss >> x0 >> comma >> y0;
    }
    rasters.push_back(gcc(downscale_block_mean(clip(img, x0, y0, 570, 660), 15)));
  }
  const ImageField data = to_field(rasters);
  const FitResult f = fit(data.field, StFamily::Iacocesare);
  const CovarianceModel model = to_covariance_model(f.model);
  const double c = std::sqrt(st_variance(f.model));
  CurveGrid grid;
  grid.c_values = {c};
  grid.u_values = {0.0, 1.0, 2.0, 3.0};
  for (int h = 0; h <= 20; ++h) grid.h_values.push_back(h);
  const auto rows = pa_curve(model, MeanDifference::from_trend(f.trend), grid);

  bool monotone = true;
  double spread_late = 0.0;
  for (double u : grid.u_values) {
    std::vector<double> psi;
    for (const auto& r : rows) {
      if (r.u == u && r.h > 0.0) psi.push_back(r.psi);
    }
    for (std::size_t i = 1; u <= 1.0 && i < psi.size(); ++i) monotone = monotone && psi[i] <= psi[i - 1] + 1e-12;
    if (u >= 2.0) spread_late = std::max(spread_late, *std::max_element(psi.begin(), psi.end()) -
                                                          *std::min_element(psi.begin(), psi.end()));
  }
  return verdict(monotone && spread_late <= 0.05,
                 std::to_string(files.size()) + " images, " + std::to_string(data.field.size()) +
                     " pixels; non-increasing for u <= 1: " + (monotone ? "yes" : "no") +
                     "; PA spread over 1 <= h <= 20 for u >= 2: " + num(spread_late, 3));
}

struct Criterion {
  int id;
  std::string name;
  double seconds_limit;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "wave counterexample", 1.0, wave_golden},
      {2, "Matern closed forms", 5.0, matern_consistency},
      {3, "PA monotone in lag", 30.0, monotonicity},
      {4, "delta-method variance", 1200.0, delta_method},
      {5, "exponential replication study", 2700.0, replication_study},
      {6, "pseudo-AIC identity", 1.0, pseudo_aic_identity},
      {7, "G_cc and block means", 1.0, gcc_checks},
      {8, "test size", 1800.0, test_size},
      {9, "practical range", 5.0, practical_range_check},
      {10, "image series PA curves", 3600.0, phenocam},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::Fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.status != Status::Skip && secs > c.seconds_limit) {
      o.status = Status::Fail;
      o.detail += "; over the " + num(c.seconds_limit) + " s limit";
    }
    const char* tag = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    if (o.status == Status::Fail) ++failures;
    std::cout << tag << " C" << c.id << ' ' << c.name << ": " << o.detail << " [" << std::fixed
              << std::setprecision(2) << secs << " s]" << std::defaultfloat << std::endl;
  }
  return failures;
}
