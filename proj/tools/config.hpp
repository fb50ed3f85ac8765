#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "spa/covariance.hpp"
#include "spa/errors.hpp"
#include "spa/estimation.hpp"
#include "spa/randomfield.hpp"
#include "spa/trend.hpp"

namespace spa::cli {

/// Bad or missing configuration; reported with exit code 2.
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// INI file with sections, plus command-line overrides.
class Config {
 public:
  Config() = default;
  static Config load(const std::filesystem::path& path);
  static Config from_string(const std::string& text, const std::filesystem::path& base_dir = ".");

  bool has(const std::string& key) const;
  bool has_section(const std::string& section) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
  /// Path value resolved against the directory of the config file.
  std::filesystem::path get_path(const std::string& key) const;

  const boost::property_tree::ptree& tree() const { return tree_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  boost::property_tree::ptree tree_;
  std::filesystem::path base_dir_ = ".";
};

/// Command name, grids, seeds, replicate count and output directory shared
/// by every subcommand.
struct RunConfig {
  std::string command;
  Config config;
  std::uint64_t seed = 1;
  int jobs = 1;
  int replicates = 1;
  std::filesystem::path out = "out";
};

/// Covariance model from a section: "family" plus canonical parameter names;
/// unspecified parameters keep their defaults.
CovarianceModel model_from_section(const Config& config, const std::string& section = "model");
TrendCoefficients trend_from_section(const Config& config, const std::string& section = "trend");
GridSpec grid_from_section(const Config& config, const std::string& section = "grid");
PairwiseConfig pairwise_from_section(const Config& config, const std::string& section = "pairwise");

/// Fitted model, trend and covariance of the estimates, as written by `fit`.
struct FittedModel {
  CovarianceModel model;
  TrendCoefficients trend;
  std::optional<MatrixXd> vcov;
  std::vector<std::string> vcov_names;
};

FittedModel fitted_from_config(const Config& config);
void write_fit_ini(const std::filesystem::path& path, const FitResult& fit, const std::optional<MatrixXd>& vcov,
                   const std::string& vcov_source);

}  // namespace spa::cli
