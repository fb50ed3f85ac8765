#include "spa/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "spa/errors.hpp"
#include "spa/optimize.hpp"
#include "spa/parallel.hpp"

namespace spa {
namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct KeyHash {
  std::size_t operator()(const std::pair<long long, long long>& k) const noexcept {
    const auto a = static_cast<unsigned long long>(k.first);
    const auto b = static_cast<unsigned long long>(k.second);
    return std::hash<unsigned long long>{}(a * 0x9E3779B97F4A7C15ULL ^ (b + 0x632BE59BD9B4E019ULL + (a << 6)));
  }
};

using CellMap = std::unordered_map<std::pair<long long, long long>, std::vector<Eigen::Index>, KeyHash>;

std::size_t distinct_count(const VectorXd& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end());
  return static_cast<std::size_t>(std::unique(s.begin(), s.end()) - s.begin());
}

double time_span(const FieldSample& data) {
  return data.times.size() ? data.times.maxCoeff() - data.times.minCoeff() + 1.0 : 1.0;
}

// Correlation of every lag class; empty when some |rho| is too close to one.
bool class_correlations(const PairStatistics& stats, const SpatioTemporalModel& model, std::vector<double>& rho) {
  rho.resize(stats.classes.size());
  for (std::size_t k = 0; k < stats.classes.size(); ++k) {
    rho[k] = st_correlation(model, stats.classes[k].h, stats.classes[k].u);
    if (!(std::abs(rho[k]) < 1.0 - 1e-12)) return false;
  }
  return true;
}

struct Profile {
  double loglik = kNegInf;
  Eigen::Vector2d beta = Eigen::Vector2d::Zero();
  double sigma2 = 0.0;
};

// Maximizes the composite likelihood over trend and sigma^2 for the
// correlation parameters of `model`.
Profile profile(const PairStatistics& stats, const SpatioTemporalModel& model) {
  Profile out;
  std::vector<double> rho;
  if (!class_correlations(stats, model, rho)) return out;
  Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  double c0 = 0.0;
  double log_det = 0.0;
  for (std::size_t k = 0; k < stats.classes.size(); ++k) {
    const LagClass& lc = stats.classes[k];
    const double r = rho[k];
    const double w = 1.0 / (1.0 - r * r);
    a += w * (lc.sff - 2.0 * r * lc.cff);
    g += w * (lc.syf - r * lc.cyf);
    c0 += w * (lc.syy - 2.0 * r * lc.pyy);
    log_det += double(lc.count) * std::log1p(-r * r);
  }
  Eigen::LDLT<Eigen::Matrix2d> solver(a);
  if (solver.info() != Eigen::Success || !(solver.vectorD().minCoeff() > 0.0)) return out;
  const Eigen::Vector2d delta = solver.solve(g);
  const double q = c0 - g.dot(delta);
  const double n = double(stats.pairs);
  if (!(q > 0.0)) return out;
  out.sigma2 = q / (2.0 * n);
  out.beta = stats.beta0 + delta;
  out.loglik = -n * kLog2Pi - n * std::log(out.sigma2) - 0.5 * log_det - n;
  return out;
}

// Search coordinates: log ranges, logit(alpha / 2), log beta. sigma^2 is profiled.
SpatioTemporalModel from_search(StFamily family, const VectorXd& z) {
  if (family == StFamily::Exponential) return ExponentialSeparable{1.0, std::exp(z[0]), std::exp(z[1])};
  auto half_logistic = [](double v) { return 2.0 / (1.0 + std::exp(-v)); };
  return Iacocesare{1.0, std::exp(z[0]), std::exp(z[1]), half_logistic(z[2]), half_logistic(z[3]), std::exp(z[4])};
}

VectorXd to_search(const SpatioTemporalModel& model) {
  return std::visit(overloaded{
      [](const ExponentialSeparable& m) {
        VectorXd z(2);
        z << std::log(m.phi_s), std::log(m.phi_t);
        return z;
      },
      [](const Iacocesare& m) {
        auto logit_half = [](double a) {
          const double p = std::clamp(a / 2.0, 1e-9, 1.0 - 1e-9);
          return std::log(p / (1.0 - p));
        };
        VectorXd z(5);
        z << std::log(m.phi_s), std::log(m.phi_t), logit_half(m.alpha_s), logit_half(m.alpha_t), std::log(m.beta);
        return z;
      },
  }, model);
}

SpatioTemporalModel with_sigma2(SpatioTemporalModel model, double sigma2) {
  std::visit([&](auto& m) { m.sigma2 = sigma2; }, model);
  return model;
}

std::map<std::string, ParameterBounds> resolved_bounds(const PairwiseConfig& config, const FieldSample& data) {
  const double extent = data.extent();
  const double span = time_span(data);
  std::map<std::string, ParameterBounds> b{
      {"phi_s", {1e-4 * extent, 1e3 * extent}},
      {"phi_t", {1e-3, 1e3 * span}},
      {"sigma2", {0.0, std::numeric_limits<double>::infinity()}},
      {"alpha_s", {0.0, 2.0}},
      {"alpha_t", {0.0, 2.0}},
      {"beta", {1e-3, 1e3}},
  };
  for (const auto& [name, bound] : config.bounds) b[name] = bound;
  return b;
}

bool within(const std::map<std::string, ParameterBounds>& bounds, const SpatioTemporalModel& model) {
  const CovarianceModel cm = to_covariance_model(model);
  const VectorXd theta = parameters(cm);
  const auto names = parameter_names(cm);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto it = bounds.find(names[i]);
    if (it == bounds.end()) continue;
    const double v = theta[static_cast<Eigen::Index>(i)];
    if (names[i] == "sigma2") {
      if (v < it->second.lower || v > it->second.upper) return false;
    } else if (!(v > it->second.lower && v <= it->second.upper)) {
      return false;
    }
  }
  return true;
}

std::vector<SpatioTemporalModel> starting_grid(StFamily family, double extent) {
  std::vector<SpatioTemporalModel> out;
  for (double fs : {0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0}) {
    for (double ft : {0.2, 0.5, 1.0, 2.0, 5.0}) {
      if (family == StFamily::Exponential) {
        out.emplace_back(ExponentialSeparable{1.0, fs * extent, ft});
      } else {
        out.emplace_back(Iacocesare{1.0, fs * extent, ft, 1.0, 1.0, 1.0});
      }
    }
  }
  return out;
}

// Central-difference Hessian, step 1e-4 relative.
MatrixXd numerical_hessian(const std::function<double(const VectorXd&)>& f, const VectorXd& x) {
  const Eigen::Index p = x.size();
  VectorXd step(p);
  for (Eigen::Index i = 0; i < p; ++i) step[i] = 1e-4 * std::max(std::abs(x[i]), 1e-2);
  const double f0 = f(x);
  MatrixXd h(p, p);
  auto at = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
    VectorXd y = x;
    y[i] += si * step[i];
    y[j] += sj * step[j];
    return f(y);
  };
  for (Eigen::Index i = 0; i < p; ++i) {
    h(i, i) = (at(i, 1, i, 0) - 2.0 * f0 + at(i, -1, i, 0)) / (step[i] * step[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      h(i, j) = h(j, i) =
          (at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1) + at(i, -1, j, -1)) / (4.0 * step[i] * step[j]);
    }
  }
  return h;
}

}  // namespace

std::string_view to_string(StFamily family) {
  return family == StFamily::Exponential ? "exponential" : "iacocesare";
}

StFamily parse_family(std::string_view text) {
  if (text == "exponential") return StFamily::Exponential;
  if (text == "iacocesare") return StFamily::Iacocesare;
  throw DomainError("unknown space-time family '" + std::string(text) + "' (expected exponential or iacocesare)");
}

void PairwiseConfig::validate() const {
  if (!(spatial_cutoff >= 0.0) || !std::isfinite(spatial_cutoff)) {
    throw DomainError("pairwise: spatial cutoff must be positive (0 selects the default)");
  }
  if (!(temporal_cutoff > 0.0) || !std::isfinite(temporal_cutoff)) {
    throw DomainError("pairwise: temporal cutoff must be positive");
  }
  if (max_evaluations < 1) throw DomainError("pairwise: optimizer budget must be at least 1");
  for (const auto& [name, b] : bounds) {
    if (!(b.lower < b.upper)) throw DomainError("pairwise: bounds of " + name + " must satisfy lower < upper");
  }
}

double PairwiseConfig::resolved_spatial_cutoff(const FieldSample& data) const {
  if (spatial_cutoff > 0.0) return spatial_cutoff;
  const double extent = data.extent();
  if (!(extent > 0.0)) throw DomainError("pairwise: data have zero spatial extent; set a spatial cutoff");
  return 0.25 * extent;
}

PairStatistics pair_statistics(const FieldSample& data, const PairwiseConfig& config, bool center) {
  config.validate();
  if (data.bivariate()) throw DomainError("pairwise likelihood needs a univariate space-time field");
  const Eigen::Index n = data.size();
  if (n < 2) throw DomainError("pairwise likelihood needs at least two observations");
  if (data.coords.rows() != n || data.times.size() != n) throw DomainError("field: coordinate count mismatch");

  PairStatistics st;
  st.spatial_cutoff = config.resolved_spatial_cutoff(data);
  st.temporal_cutoff = config.temporal_cutoff;

  const VectorXd raw = data.values.col(0);
  if (!raw.allFinite()) throw DomainError("field: values must be finite");
  if (center) {
    if (distinct_count(data.times) >= 2) {
      st.beta0 = ols_detrend(data.times, raw).trend.beta;
    } else {
      st.beta0 << raw.mean(), 0.0;
    }
  }
  const VectorXd y = raw.array() - st.beta0[0] - st.beta0[1] * data.times.array();

  const double hc = st.spatial_cutoff;
  const double h_limit = hc * (1.0 + 1e-12);
  const double u_limit = st.temporal_cutoff * (1.0 + 1e-12);

  // Observations grouped by time, each group hashed into cells of side hc.
  std::vector<double> time_values(data.times.data(), data.times.data() + n);
  std::sort(time_values.begin(), time_values.end());
  time_values.erase(std::unique(time_values.begin(), time_values.end()), time_values.end());
  std::vector<CellMap> cells(time_values.size());
  std::vector<std::size_t> group(static_cast<std::size_t>(n));
  auto cell_of = [&](Eigen::Index i) {
    return std::pair<long long, long long>{static_cast<long long>(std::floor(data.coords(i, 0) / hc)),
                                           static_cast<long long>(std::floor(data.coords(i, 1) / hc))};
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto g = static_cast<std::size_t>(
        std::lower_bound(time_values.begin(), time_values.end(), data.times[i]) - time_values.begin());
    group[static_cast<std::size_t>(i)] = g;
    cells[g][cell_of(i)].push_back(i);
  }

  const double qh = 1e-9 * std::max(1.0, hc);
  const double qu = 1e-9 * std::max(1.0, st.temporal_cutoff);
  std::unordered_map<std::pair<long long, long long>, std::size_t, KeyHash> index;

  for (Eigen::Index i = 0; i < n; ++i) {
    const double ti = data.times[i];
    const Eigen::Vector2d fi(1.0, ti);
    const auto [cx, cy] = cell_of(i);
    for (std::size_t g = 0; g < time_values.size(); ++g) {
      const double u = std::abs(time_values[g] - ti);
      if (u > u_limit) continue;
      for (long long dx = -1; dx <= 1; ++dx) {
        for (long long dy = -1; dy <= 1; ++dy) {
          const auto it = cells[g].find({cx + dx, cy + dy});
          if (it == cells[g].end()) continue;
          for (Eigen::Index j : it->second) {
            if (j <= i) continue;
            const double h = (data.coords.row(i) - data.coords.row(j)).norm();
            if (h > h_limit || (h == 0.0 && u == 0.0)) continue;
            const std::pair<long long, long long> key{std::llround(h / qh), std::llround(u / qu)};
            auto [pos, inserted] = index.try_emplace(key, st.classes.size());
            if (inserted) {
              LagClass lc;
              lc.h = h;
              lc.u = u;
              st.classes.push_back(lc);
            }
            LagClass& lc = st.classes[pos->second];
            const Eigen::Vector2d fj(1.0, data.times[j]);
            const double yi = y[i];
            const double yj = y[j];
            const double d = raw[i] - raw[j];
            ++lc.count;
            lc.syy += yi * yi + yj * yj;
            lc.pyy += yi * yj;
            lc.sdd += d * d;
            lc.syf += yi * fi + yj * fj;
            lc.cyf += yi * fj + yj * fi;
            lc.sff += fi * fi.transpose() + fj * fj.transpose();
            lc.cff += 0.5 * (fi * fj.transpose() + fj * fi.transpose());
          }
        }
      }
    }
  }
  for (const LagClass& lc : st.classes) st.pairs += lc.count;
  std::sort(st.classes.begin(), st.classes.end(),
            [](const LagClass& a, const LagClass& b) { return a.u != b.u ? a.u < b.u : a.h < b.h; });
  if (st.pairs == 0) throw DomainError("pairwise: no pairs within the cutoffs");
  return st;
}

double composite_loglik(const PairStatistics& stats, const SpatioTemporalModel& model,
                        const TrendCoefficients& trend) {
  if (trend.beta.size() != 2) throw DomainError("composite_loglik: trend must have intercept and slope");
  const double sigma2 = st_variance(model);
  if (!(sigma2 > 0.0)) throw DomainError("composite_loglik: sigma2 must be positive");
  std::vector<double> rho;
  if (!class_correlations(stats, model, rho)) return kNegInf;
  const Eigen::Vector2d delta = trend.beta - stats.beta0;
  const double log_sigma2 = std::log(sigma2);
  double total = 0.0;
  for (std::size_t k = 0; k < stats.classes.size(); ++k) {
    const LagClass& lc = stats.classes[k];
    const double r = rho[k];
    const double one_minus = 1.0 - r * r;
    const double s = lc.syy - 2.0 * delta.dot(lc.syf) + delta.dot(lc.sff * delta);
    const double p = lc.pyy - delta.dot(lc.cyf) + delta.dot(lc.cff * delta);
    total += -double(lc.count) * (kLog2Pi + log_sigma2 + 0.5 * std::log1p(-r * r)) -
             (s - 2.0 * r * p) / (2.0 * sigma2 * one_minus);
  }
  return total;
}

double composite_loglik(const FieldSample& data, const SpatioTemporalModel& model, const TrendCoefficients& trend,
                        const PairwiseConfig& config) {
  return composite_loglik(pair_statistics(data, config), model, trend);
}

double exact_loglik(const FieldSample& data, const SpatioTemporalModel& model, const TrendCoefficients& trend) {
  const Eigen::Index n = data.size();
  if (n > 500) throw DomainError("exact_loglik: limited to 500 observations");
  if (data.bivariate()) throw DomainError("exact_loglik: needs a univariate space-time field");
  const MatrixXd cov = covariance_matrix(model, data.coords, data.times);
  Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw FactorizationError("exact_loglik: covariance is not positive definite");
  const VectorXd r = data.values.col(0).array() - trend.intercept() - trend.slope() * data.times.array();
  const VectorXd w = llt.matrixL().solve(r);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (double(n) * kLog2Pi + log_det + w.squaredNorm());
}

VectorXd FitResult::estimates() const {
  const VectorXd theta = parameters(to_covariance_model(model));
  VectorXd out(2 + theta.size());
  out << trend.intercept(), trend.slope(), theta;
  return out;
}

std::vector<std::string> FitResult::names() const {
  std::vector<std::string> out{"a0", "a1"};
  for (auto& name : parameter_names(to_covariance_model(model))) out.push_back(std::move(name));
  return out;
}

std::optional<MatrixXd> FitResult::v_theta() const {
  if (!v_full) return std::nullopt;
  const Eigen::Index p = v_full->rows() - 2;
  return MatrixXd(v_full->bottomRightCorner(p, p));
}

std::optional<double> FitResult::slope_variance() const {
  if (!v_full) return std::nullopt;
  return (*v_full)(1, 1);
}

FitResult fit(const FieldSample& data, StFamily family, const PairwiseConfig& config) {
  if (distinct_count(data.times) < 2) throw DomainError("fit: the trend needs at least two distinct times");
  const PairStatistics stats = pair_statistics(data, config);
  const auto bounds = resolved_bounds(config, data);

  FitResult res;
  res.family = family;
  res.pairs = stats.pairs;
  res.extent = data.extent();

  auto objective = [&](const VectorXd& z) {
    const SpatioTemporalModel m = from_search(family, z);
    const Profile p = profile(stats, m);
    if (!std::isfinite(p.loglik) || !within(bounds, with_sigma2(m, p.sigma2))) {
      return std::numeric_limits<double>::infinity();
    }
    return -p.loglik;
  };

  VectorXd z0;
  if (config.initial) {
    const bool exp_initial = std::holds_alternative<ExponentialSeparable>(*config.initial);
    if (exp_initial != (family == StFamily::Exponential)) {
      throw DomainError("fit: initial model belongs to a different family");
    }
    z0 = to_search(*config.initial);
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& start : starting_grid(family, res.extent)) {
      const VectorXd z = to_search(start);
      const double v = objective(z);
      if (v < best) best = v, z0 = z;
    }
    if (z0.size() == 0) throw NumericalError("fit: composite likelihood is not finite at any starting point");
  }

  NelderMeadOptions opt;
  opt.max_evaluations = config.max_evaluations;
  const NelderMeadResult nm = nelder_mead(objective, z0, opt);
  res.evaluations = nm.evaluations;
  res.converged = nm.converged;
  if (!nm.converged) res.warnings.push_back("optimizer budget exhausted before convergence");

  const SpatioTemporalModel shape = from_search(family, nm.x);
  const Profile best = profile(stats, shape);
  if (!std::isfinite(best.loglik)) throw NumericalError("fit: composite likelihood is not finite at the optimum");
  res.model = with_sigma2(shape, best.sigma2);
  res.trend = TrendCoefficients(best.beta[0], best.beta[1]);
  res.composite_loglik = best.loglik;
  res.n_params = static_cast<int>(res.estimates().size());
  res.pseudo_aic = pseudo_aic(res.composite_loglik, res.n_params);
  const double phi_s = std::visit([](const auto& m) { return m.phi_s; }, res.model);
  res.valid = phi_s > 0.0 && phi_s < res.extent;

  if (config.compute_vcov) {
    const CovarianceModel base = to_covariance_model(res.model);
    auto cl = [&](const VectorXd& x) {
      const TrendCoefficients trend(x[0], x[1]);
      const SpatioTemporalModel m = as_spatiotemporal(with_parameters(base, x.tail(x.size() - 2)));
      return composite_loglik(stats, m, trend);
    };
    try {
      const MatrixXd h = numerical_hessian(cl, res.estimates());
      const MatrixXd info = -0.5 * (h + h.transpose());
      Eigen::LLT<MatrixXd> llt(info);
      if (!info.allFinite() || llt.info() != Eigen::Success) {
        res.warnings.push_back("Hessian of the composite likelihood is not negative definite; V_theta omitted");
      } else {
        MatrixXd v = llt.solve(MatrixXd::Identity(info.rows(), info.cols()));
        res.v_full = 0.5 * (v + v.transpose());
      }
    } catch (const std::exception& e) {
      res.warnings.push_back(std::string("V_theta omitted: ") + e.what());
    }
  }
  return res;
}

DetrendResult ols_detrend(const Eigen::Ref<const VectorXd>& times, const Eigen::Ref<const VectorXd>& values) {
  if (times.size() != values.size()) throw DomainError("ols_detrend: times and values differ in length");
  if (times.size() < 2) throw DomainError("ols_detrend: needs at least two observations");
  const double t_mean = times.mean();
  const double y_mean = values.mean();
  const VectorXd tc = times.array() - t_mean;
  const double sxx = tc.squaredNorm();
  if (!(sxx > 0.0)) throw DomainError("ols_detrend: degenerate design (a single distinct time)");
  const double slope = tc.dot(values) / sxx;
  const double intercept = y_mean - slope * t_mean;
  DetrendResult out;
  out.trend = TrendCoefficients(intercept, slope);
  out.residuals = values.array() - intercept - slope * times.array();
  return out;
}

DetrendResult ols_detrend(const FieldSample& data) {
  if (data.bivariate()) throw DomainError("ols_detrend: needs a univariate space-time field");
  return ols_detrend(data.times, data.values.col(0));
}

FieldSample detrended(const FieldSample& data) {
  FieldSample out = data;
  out.values = ols_detrend(data).residuals;
  return out;
}

VariogramEstimate empirical_variogram(const FieldSample& data, const VariogramBins& bins,
                                      const PairwiseConfig& config) {
  if (!std::is_sorted(bins.h_edges.begin(), bins.h_edges.end())) {
    throw DomainError("variogram: bin edges must be increasing");
  }
  const PairStatistics stats = pair_statistics(data, config, false);

  // Bin id: -1 for h = 0, else index of the first edge >= h, or one class
  // per distinct distance when no edges are given.
  std::vector<double> distinct;
  for (const LagClass& lc : stats.classes) distinct.push_back(lc.h);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const std::vector<double>& edges = bins.h_edges.empty() ? distinct : bins.h_edges;
  auto bin_of = [&](double h) -> long {
    if (h == 0.0) return -1;
    const auto it = std::lower_bound(edges.begin(), edges.end(), h * (1.0 - 1e-12));
    return it == edges.end() ? -2 : static_cast<long>(it - edges.begin());
  };

  struct Acc {
    double h_sum = 0.0;
    double sdd = 0.0;
    std::size_t count = 0;
  };
  std::map<std::pair<double, long>, Acc> joint;
  for (const LagClass& lc : stats.classes) {
    const long b = bin_of(lc.h);
    if (b == -2) continue;
    Acc& a = joint[{lc.u, b}];
    a.h_sum += lc.h * double(lc.count);
    a.sdd += lc.sdd;
    a.count += lc.count;
  }
  VariogramEstimate out;
  for (const auto& [key, a] : joint) {
    const VariogramRow row{a.h_sum / double(a.count), key.first, a.sdd / (2.0 * double(a.count)), a.count};
    out.joint.push_back(row);
    if (key.first == 0.0) out.spatial.push_back(row);
    if (key.second == -1) out.temporal.push_back(row);
  }
  return out;
}

double percent_valid(const std::vector<FitResult>& fits) {
  if (fits.empty()) throw DomainError("percent_valid: no fits");
  const auto valid = std::count_if(fits.begin(), fits.end(), [](const FitResult& f) { return f.valid; });
  return 100.0 * double(valid) / double(fits.size());
}

std::vector<FitResult> run_monte_carlo(const MonteCarloSetup& setup) {
  if (setup.replicates < 1) throw DomainError("monte carlo: replicate count must be at least 1");
  const FieldSampler sampler(setup.grid, setup.truth, setup.trend);
  std::vector<FitResult> fits(static_cast<std::size_t>(setup.replicates));
  parallel_for(fits.size(), setup.jobs, [&](std::size_t r) {
    const FieldSample data = sampler.draw(setup.seed, r);
    try {
      fits[r] = fit(data, setup.family, setup.config);
    } catch (const NumericalError& e) {
      fits[r].family = setup.family;
      fits[r].valid = false;
      fits[r].warnings.push_back(e.what());
    }
  });
  return fits;
}

MonteCarloSummary summarize(const std::vector<FitResult>& fits, const SpatioTemporalModel& truth,
                            const TrendCoefficients& trend) {
  const CovarianceModel cm = to_covariance_model(truth);
  const VectorXd theta = parameters(cm);
  VectorXd truth_vec(2 + theta.size());
  truth_vec << trend.intercept(), trend.slope(), theta;
  std::vector<std::string> names{"a0", "a1"};
  for (auto& name : parameter_names(cm)) names.push_back(std::move(name));

  MonteCarloSummary out;
  out.replicates = fits.size();
  std::vector<VectorXd> rows;
  for (const FitResult& f : fits) {
    if (f.valid) rows.push_back(f.estimates());
  }
  out.valid = rows.size();
  out.percent_valid = fits.empty() ? 0.0 : 100.0 * double(out.valid) / double(fits.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < names.size(); ++k) {
    SummaryRow row{names[k], truth_vec[static_cast<Eigen::Index>(k)], nan, nan};
    if (!rows.empty()) {
      double sum = 0.0;
      for (const auto& r : rows) sum += r[static_cast<Eigen::Index>(k)];
      row.mean = sum / double(rows.size());
    }
    if (rows.size() > 1) {
      double ss = 0.0;
      for (const auto& r : rows) ss += std::pow(r[static_cast<Eigen::Index>(k)] - row.mean, 2);
      row.sd = std::sqrt(ss / double(rows.size() - 1));
    }
    out.rows.push_back(row);
  }
  return out;
}

MatrixXd estimate_covariance(const std::vector<FitResult>& fits, bool valid_only) {
  std::vector<VectorXd> rows;
  for (const FitResult& f : fits) {
    if ((f.valid || !valid_only) && f.pairs > 0) rows.push_back(f.estimates());
  }
  if (rows.size() < 2) throw DomainError("estimate_covariance: needs at least two fits");
  MatrixXd x(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = rows[i];
  const MatrixXd centred = x.rowwise() - x.colwise().mean();
  return centred.transpose() * centred / double(x.rows() - 1);
}

MatrixXd parametric_bootstrap_vcov(const FitResult& fitted, const GridSpec& grid, int replicates,
                                   std::uint64_t seed, int jobs, const PairwiseConfig& config) {
  MonteCarloSetup setup;
  setup.grid = grid;
  setup.truth = fitted.model;
  setup.trend = fitted.trend;
  setup.family = fitted.family;
  setup.replicates = replicates;
  setup.seed = seed;
  setup.jobs = jobs;
  setup.config = config;
  setup.config.compute_vcov = false;
  return estimate_covariance(run_monte_carlo(setup), false);
}

}  // namespace spa
