#include "spa/randomfield.hpp"

#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "spa/errors.hpp"

namespace spa {
namespace {

void check_size(Eigen::Index n) {
  if (n > kMaxFieldSize) {
    throw DomainError("field of " + std::to_string(n) + " values exceeds the dense size limit of " +
                      std::to_string(kMaxFieldSize));
  }
}

// Coordinates and times of every grid observation, time-major.
void grid_observations(const GridSpec& grid, Eigen::MatrixX2d& coords, VectorXd& times) {
  const Eigen::MatrixX2d sites = grid.site_coords();
  const Eigen::Index s = grid.sites();
  coords.resize(grid.size(), 2);
  times.resize(grid.size());
  for (int t = 0; t < grid.n_t; ++t) {
    coords.middleRows(t * s, s) = sites;
    times.segment(t * s, s).setConstant(t + 1.0);
  }
}

VectorXd standard_normals(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
  return z;
}

MatrixXd time_lags(int n_t) {
  MatrixXd lags(n_t, n_t);
  for (int i = 0; i < n_t; ++i) {
    for (int j = 0; j < n_t; ++j) lags(i, j) = std::abs(i - j);
  }
  return lags;
}

}  // namespace

void GridSpec::validate() const {
  if (n_s < 2) throw DomainError("grid: N_S must be at least 2");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw DomainError("grid: spacing must be positive");
  if (n_t < 1) throw DomainError("grid: N_T must be at least 1");
}

Eigen::MatrixX2d GridSpec::site_coords() const {
  Eigen::MatrixX2d coords(sites(), 2);
  for (int r = 0; r < n_s; ++r) {
    for (int c = 0; c < n_s; ++c) coords.row(Eigen::Index(r) * n_s + c) << c * spacing, r * spacing;
  }
  return coords;
}

double FieldSample::extent() const {
  if (grid) return grid->extent();
  if (extent_hint > 0.0) return extent_hint;
  if (coords.rows() == 0) return 0.0;
  const Eigen::RowVector2d span = coords.colwise().maxCoeff() - coords.colwise().minCoeff();
  return span.maxCoeff();
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

MatrixXd assemble_covariance(const CovarianceModel& model, const Eigen::Ref<const Eigen::MatrixX2d>& coords,
                             const Eigen::Ref<const VectorXd>& times) {
  if (is_spatiotemporal(model)) {
    check_size(coords.rows());
    return covariance_matrix(as_spatiotemporal(model), coords, times);
  }
  check_size(2 * coords.rows());
  return covariance_matrix(as_spatial(model), coords);
}

MatrixXd assemble_covariance(const GridSpec& grid, const CovarianceModel& model) {
  grid.validate();
  if (!is_spatiotemporal(model)) {
    check_size(2 * grid.sites());
    return covariance_matrix(as_spatial(model), grid.site_coords());
  }
  check_size(grid.size());
  Eigen::MatrixX2d coords;
  VectorXd times;
  grid_observations(grid, coords, times);
  return covariance_matrix(as_spatiotemporal(model), coords, times);
}

FieldSampler::FieldSampler(const GridSpec& grid, const SpatioTemporalModel& model, const TrendCoefficients& trend)
    : grid_(grid), model_(to_covariance_model(model)), trend_(trend) {
  grid_.validate();
  check_size(grid_.size());
  if (trend_.beta.size() != 2) throw DomainError("simulate: trend must have intercept and slope");
  const double variance = st_variance(model);
  if (variance == 0.0) {
    method_ = "none";
    return;
  }
  require_valid(model_);
  if (const auto* m = std::get_if<ExponentialSeparable>(&model)) {
    const Eigen::MatrixX2d sites = grid_.site_coords();
    MatrixXd rs(sites.rows(), sites.rows());
    for (Eigen::Index i = 0; i < sites.rows(); ++i) {
      for (Eigen::Index j = 0; j < sites.rows(); ++j) {
        rs(i, j) = std::exp(-(sites.row(i) - sites.row(j)).norm() / m->phi_s);
      }
    }
    const MatrixXd rt = (-time_lags(grid_.n_t).array() / m->phi_t).exp().matrix();
    Eigen::LLT<MatrixXd> llt_s(rs);
    Eigen::LLT<MatrixXd> llt_t(rt);
    if (llt_s.info() == Eigen::Success && llt_t.info() == Eigen::Success) {
      ls_ = llt_s.matrixL();
      lt_ = llt_t.matrixL();
      scale_ = std::sqrt(m->sigma2);
      method_ = "kronecker";
      return;
    }
  }
  factorize(assemble_covariance(grid_, model_), variance);
}

FieldSampler::FieldSampler(const GridSpec& grid, const SpatialModel& model, const Eigen::Vector2d& means)
    : grid_(grid), model_(to_covariance_model(model)), means_(means), bivariate_(true) {
  grid_.validate();
  check_size(2 * grid_.sites());
  require_valid(model_);
  const MatrixXd cov = assemble_covariance(grid_, model_);
  factorize(cov, cov.diagonal().maxCoeff());
}

void FieldSampler::factorize(const MatrixXd& cov, double variance_scale) {
  Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    factor_lower_ = true;
    method_ = "cholesky";
    return;
  }
  if (auto root = semidefinite_ldlt(cov, variance_scale)) {
    factor_ = std::move(*root);
    factor_lower_ = false;
    method_ = "ldlt";
    return;
  }
  MatrixXd jittered = cov;
  jittered.diagonal().array() += 1e-10 * variance_scale;
  Eigen::LLT<MatrixXd> retry(jittered);
  if (retry.info() == Eigen::Success) {
    factor_ = retry.matrixL();
    factor_lower_ = true;
    method_ = "cholesky+jitter";
    return;
  }
  throw FactorizationError("covariance matrix is not positive semidefinite; the model is not valid on this grid");
}

FieldSample FieldSampler::draw(std::uint64_t seed, std::uint64_t stream) const {
  FieldSample out;
  out.grid = grid_;
  out.model = model_;
  out.seed = seed;
  out.stream = stream;
  out.method = method_;
  std::mt19937_64 rng = make_rng(seed, stream);

  if (bivariate_) {
    const Eigen::Index n = grid_.sites();
    out.coords = grid_.site_coords();
    out.times = VectorXd::Ones(n);
    out.means = means_;
    const VectorXd z = standard_normals(rng, 2 * n);
    const VectorXd joint =
        factor_lower_ ? VectorXd(factor_.triangularView<Eigen::Lower>() * z) : VectorXd(factor_ * z);
    out.values.resize(n, 2);
    out.values.col(0) = joint.head(n).array() + means_[0];
    out.values.col(1) = joint.tail(n).array() + means_[1];
    return out;
  }

  grid_observations(grid_, out.coords, out.times);
  out.trend = trend_;
  VectorXd y = (trend_.intercept() + trend_.slope() * out.times.array()).matrix();
  if (method_ == "kronecker") {
    const Eigen::Index s = grid_.sites();
    const VectorXd z = standard_normals(rng, s * grid_.n_t);
    const Eigen::Map<const MatrixXd> w(z.data(), s, grid_.n_t);
    const MatrixXd lw = ls_.triangularView<Eigen::Lower>() * w;
    const MatrixXd field = scale_ * (lw * lt_.transpose());
    y += Eigen::Map<const VectorXd>(field.data(), field.size());
  } else if (method_ != "none") {
    const VectorXd z = standard_normals(rng, grid_.size());
    y += factor_lower_ ? VectorXd(factor_.triangularView<Eigen::Lower>() * z) : VectorXd(factor_ * z);
  }
  out.values = y;
  return out;
}

FieldSample simulate_st(const GridSpec& grid, const SpatioTemporalModel& model, const TrendCoefficients& trend,
                        std::uint64_t seed, std::uint64_t stream) {
  return FieldSampler(grid, model, trend).draw(seed, stream);
}

FieldSample simulate_bivariate(const GridSpec& grid, const SpatialModel& model, const Eigen::Vector2d& means,
                               std::uint64_t seed, std::uint64_t stream) {
  return FieldSampler(grid, model, means).draw(seed, stream);
}

void write_field(std::ostream& os, const FieldSample& sample) {
  os << std::setprecision(17);
  if (sample.grid) {
    os << "# n_s=" << sample.grid->n_s << " spacing=" << sample.grid->spacing << " n_t=" << sample.grid->n_t
       << " seed=" << sample.seed << " stream=" << sample.stream << '\n';
  } else if (sample.extent_hint > 0.0) {
    os << "# extent=" << sample.extent_hint << '\n';
  }
  os << (sample.bivariate() ? "x,y,X,Y\n" : "x,y,t,value\n");
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    os << sample.coords(i, 0) << ',' << sample.coords(i, 1) << ',';
    if (sample.bivariate()) {
      os << sample.values(i, 0) << ',' << sample.values(i, 1) << '\n';
    } else {
      os << sample.times[i] << ',' << sample.values(i, 0) << '\n';
    }
  }
}

FieldSample read_field(std::istream& is) {
  FieldSample out;
  std::string line;
  std::string header;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string token;
      GridSpec grid;
      bool has_grid = false;
      while (meta >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "n_s") grid.n_s = std::stoi(value), has_grid = true;
        else if (key == "spacing") grid.spacing = std::stod(value);
        else if (key == "n_t") grid.n_t = std::stoi(value);
        else if (key == "seed") out.seed = std::stoull(value);
        else if (key == "stream") out.stream = std::stoull(value);
        else if (key == "extent") out.extent_hint = std::stod(value);
      }
      if (has_grid) out.grid = grid;
      continue;
    }
    header = line;
    break;
  }
  if (!header.empty() && header.back() == '\r') header.pop_back();
  const bool bivariate = header == "x,y,X,Y";
  if (!bivariate && header != "x,y,t,value") {
    throw DomainError("field file: expected header 'x,y,t,value' or 'x,y,X,Y', got '" + header + "'");
  }
  std::vector<std::array<double, 4>> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::array<double, 4> row{};
    std::istringstream fields(line);
    std::string cell;
    for (int k = 0; k < 4; ++k) {
      if (!std::getline(fields, cell, ',')) {
        throw DomainError("field file: line " + std::to_string(line_no) + " has fewer than 4 columns");
      }
      try {
        row[k] = std::stod(cell);
      } catch (const std::exception&) {
        throw DomainError("field file: line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    rows.push_back(row);
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  out.coords.resize(n, 2);
  out.times = VectorXd::Ones(n);
  out.values.resize(n, bivariate ? 2 : 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    out.coords.row(i) << r[0], r[1];
    if (bivariate) {
      out.values.row(i) << r[2], r[3];
    } else {
      out.times[i] = r[2];
      out.values(i, 0) = r[3];
    }
  }
  return out;
}

}  // namespace spa
