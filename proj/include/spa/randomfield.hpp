#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>

#include "spa/covariance.hpp"
#include "spa/trend.hpp"
#include "spa/types.hpp"

namespace spa {

/// Largest number of jointly simulated values (dense factorization).
inline constexpr Eigen::Index kMaxFieldSize = 40000;

/// N_S x N_S regular grid with N_T time steps t = 1, ..., N_T.
/// Site (row, col) sits at (col * spacing, row * spacing).
struct GridSpec {
  int n_s = 2;
  double spacing = 1.0;
  int n_t = 1;

  Eigen::Index sites() const { return Eigen::Index(n_s) * n_s; }
  Eigen::Index size() const { return sites() * n_t; }
  /// N_S * spacing; used for the validity rule on fitted spatial ranges.
  double extent() const { return n_s * spacing; }

  /// Throws DomainError when an invariant fails.
  void validate() const;

  /// Site coordinates, row-major (sites() x 2).
  Eigen::MatrixX2d site_coords() const;
};

/// Observations of a Gaussian field. Space-time samples hold one column of
/// values with coordinates and time per row, ordered time-major then
/// row-major over the grid. Bivariate samples hold columns (X, Y) per site.
struct FieldSample {
  Eigen::MatrixX2d coords;
  VectorXd times;
  MatrixXd values;
  std::optional<GridSpec> grid;
  /// Spatial extent for data without a GridSpec (e.g. image rasters); 0 if unknown.
  double extent_hint = 0.0;
  std::optional<CovarianceModel> model;
  TrendCoefficients trend;
  Eigen::Vector2d means = Eigen::Vector2d::Zero();
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  /// Name of the factorization used to draw the sample, if simulated.
  std::string method;

  Eigen::Index size() const { return values.rows(); }
  bool bivariate() const { return values.cols() == 2; }
  /// Spatial extent used by the validity rule: grid extent when known,
  /// then extent_hint, otherwise the larger side of the bounding box.
  double extent() const;
};

/// mt19937_64 seeded through std::seed_seq from (seed, stream). Distinct
/// streams give independent replicates for the same base seed.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// Dense covariance of all grid values: space-time models use the
/// time-major site ordering, bivariate models the X block then the Y block.
MatrixXd assemble_covariance(const GridSpec& grid, const CovarianceModel& model);

/// Same for an arbitrary list of observations.
MatrixXd assemble_covariance(const CovarianceModel& model, const Eigen::Ref<const Eigen::MatrixX2d>& coords,
                             const Eigen::Ref<const VectorXd>& times);

/// Holds a symmetric factor L (C = L L') so that many replicates can be
/// drawn from one factorization. Tries, in order: the Kronecker factor of a
/// separable exponential model, Cholesky, pivoted LDL' accepted when the
/// matrix is positive semidefinite to round-off, and Cholesky after adding
/// 1e-10 * sigma^2 to the diagonal (reported through jitter_applied()).
class FieldSampler {
 public:
  FieldSampler(const GridSpec& grid, const SpatioTemporalModel& model, const TrendCoefficients& trend);
  FieldSampler(const GridSpec& grid, const SpatialModel& model, const Eigen::Vector2d& means);

  FieldSample draw(std::uint64_t seed, std::uint64_t stream = 0) const;

  const std::string& method() const { return method_; }
  bool jitter_applied() const { return method_ == "cholesky+jitter"; }

 private:
  void factorize(const MatrixXd& cov, double variance_scale);

  GridSpec grid_;
  CovarianceModel model_;
  TrendCoefficients trend_;
  Eigen::Vector2d means_ = Eigen::Vector2d::Zero();
  bool bivariate_ = false;
  std::string method_;
  MatrixXd factor_;
  bool factor_lower_ = false;
  // Kronecker path: C = sigma^2 R_t (x) R_s with Cholesky factors of each.
  MatrixXd ls_;
  MatrixXd lt_;
  double scale_ = 0.0;
};

/// Space-time field Y = F beta + Z on the grid. A zero variance gives the
/// trend exactly.
FieldSample simulate_st(const GridSpec& grid, const SpatioTemporalModel& model, const TrendCoefficients& trend,
                        std::uint64_t seed, std::uint64_t stream = 0);

/// Joint draw of (X, Y) on the grid (time is ignored).
FieldSample simulate_bivariate(const GridSpec& grid, const SpatialModel& model, const Eigen::Vector2d& means,
                               std::uint64_t seed, std::uint64_t stream = 0);

/// Comma-separated text with header "x,y,t,value" or "x,y,X,Y".
void write_field(std::ostream& os, const FieldSample& sample);
FieldSample read_field(std::istream& is);

}  // namespace spa
