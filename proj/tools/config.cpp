#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>

#include "spa/io.hpp"

namespace spa::cli {
namespace pt = boost::property_tree;

namespace {

// Drops trailing "; ..." or "# ..." comments, which the INI reader keeps as
// part of the value. A marker counts only after whitespace.
std::string strip_inline_comments(std::istream& is) {
  std::ostringstream out;
  for (std::string line; std::getline(is, line);) {
    for (std::size_t i = 1; i < line.size(); ++i) {
      if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.erase(i);
        break;
      }
    }
    out << line << '\n';
  }
  return out.str();
}

pt::ptree parse_ini(std::istream& is, const std::string& what) {
  std::istringstream clean(strip_inline_comments(is));
  pt::ptree tree;
  try {
    pt::read_ini(clean, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("cannot parse " + what + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  return tree;
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open " + path.string());
  Config c;
  c.tree_ = parse_ini(is, path.string());
  c.base_dir_ = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return c;
}

Config Config::from_string(const std::string& text, const std::filesystem::path& base_dir) {
  std::istringstream is(text);
  Config c;
  c.tree_ = parse_ini(is, "config");
  c.base_dir_ = base_dir;
  return c;
}

bool Config::has(const std::string& key) const { return tree_.get_optional<std::string>(key).has_value(); }

bool Config::has_section(const std::string& section) const {
  return tree_.get_child_optional(section).has_value();
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
  return tree_.get<std::string>(key, fallback);
}

std::string Config::require(const std::string& key) const {
  const auto v = tree_.get_optional<std::string>(key);
  if (!v || v->empty()) throw ConfigError("missing required key '" + key + "'");
  return *v;
}

double Config::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const auto values = parse_list(get(key, ""));
  if (values.size() != 1) throw ConfigError("key '" + key + "' must be a single number");
  return values.front();
}

int Config::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, fallback);
  if (v != std::floor(v)) throw ConfigError("key '" + key + "' must be an integer");
  return static_cast<int>(v);
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  try {
    return std::stoull(get(key, ""));
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "' must be a non-negative integer");
  }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = get(key, "");
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "' must be true or false");
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_list(get(key, ""));
  } catch (const DomainError& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

std::filesystem::path Config::get_path(const std::string& key) const {
  const std::filesystem::path p = require(key);
  return p.is_absolute() ? p : base_dir_ / p;
}

CovarianceModel model_from_section(const Config& config, const std::string& section) {
  const std::string family = config.require(section + ".family");
  CovarianceModel model;
  if (family == "matern") {
    model = BivariateMaternModel{};
  } else if (family == "wendland") {
    BivariateWendlandModel w;
    w.kappa = config.get_int(section + ".kappa", 0);
    model = w;
  } else if (family == "wave") {
    model = WaveModel{};
  } else if (family == "exponential") {
    model = ExponentialSeparable{};
  } else if (family == "iacocesare") {
    model = Iacocesare{};
  } else {
    throw ConfigError("unknown model family '" + family +
                      "' (expected matern, wendland, wave, exponential or iacocesare)");
  }
  const auto names = parameter_names(model);
  VectorXd theta = parameters(model);
  std::set<std::string> known(names.begin(), names.end());
  known.insert({"family", "kappa", "normalize"});
  for (const auto& [key, value] : config.tree().get_child(section)) {
    if (!known.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "] for family " + family);
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    theta[static_cast<Eigen::Index>(i)] = config.get_double(section + "." + names[i], theta[static_cast<Eigen::Index>(i)]);
  }
  model = with_parameters(model, theta);
  if (auto* w = std::get_if<BivariateWendlandModel>(&model); w && config.get_bool(section + ".normalize", false)) {
    *w = w->normalized();
  }
  return model;
}

TrendCoefficients trend_from_section(const Config& config, const std::string& section) {
  return TrendCoefficients(config.get_double(section + ".a0", 0.0), config.get_double(section + ".a1", 0.0));
}

GridSpec grid_from_section(const Config& config, const std::string& section) {
  GridSpec g;
  g.n_s = config.get_int(section + ".n_s", 20);
  g.spacing = config.get_double(section + ".spacing", 1.0);
  g.n_t = config.get_int(section + ".n_t", 10);
  g.validate();
  return g;
}

PairwiseConfig pairwise_from_section(const Config& config, const std::string& section) {
  PairwiseConfig p;
  p.spatial_cutoff = config.get_double(section + ".spatial_cutoff", p.spatial_cutoff);
  p.temporal_cutoff = config.get_double(section + ".temporal_cutoff", p.temporal_cutoff);
  p.max_evaluations = config.get_int(section + ".max_evaluations", p.max_evaluations);
  for (const std::string name : {"phi_s", "phi_t", "sigma2", "alpha_s", "alpha_t", "beta"}) {
    const std::string key = section + "." + name + "_bounds";
    if (!config.has(key)) continue;
    const auto b = config.get_list(key, {});
    if (b.size() != 2) throw ConfigError("key '" + key + "' must be 'lower,upper'");
    p.bounds[name] = {b[0], b[1]};
  }
  if (config.has_section("initial")) {
    const CovarianceModel m = model_from_section(config, "initial");
    if (!is_spatiotemporal(m)) throw ConfigError("[initial] must describe a space-time family");
    p.initial = as_spatiotemporal(m);
  }
  p.validate();
  return p;
}

FittedModel fitted_from_config(const Config& config) {
  Config source = config;
  for (const std::string key : {"pa.fit", "test.fit"}) {
    if (config.has(key)) {
      source = Config::load(config.get_path(key));
      break;
    }
  }
  FittedModel out;
  out.model = model_from_section(source, "model");
  out.trend = trend_from_section(source, "trend");
  if (source.has_section("vcov")) {
    std::string names = source.require("vcov.names");
    std::stringstream ss(names);
    for (std::string item; std::getline(ss, item, ',');) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      out.vcov_names.push_back(item);
    }
    const auto p = static_cast<Eigen::Index>(out.vcov_names.size());
    MatrixXd v(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
      const auto row = source.get_list("vcov.row" + std::to_string(i), {});
      if (static_cast<Eigen::Index>(row.size()) != p) {
        throw ConfigError("[vcov] row" + std::to_string(i) + " must have " + std::to_string(p) + " entries");
      }
      for (Eigen::Index j = 0; j < p; ++j) v(i, j) = row[static_cast<std::size_t>(j)];
    }
    out.vcov = v;
  }
  return out;
}

void write_fit_ini(const std::filesystem::path& path, const FitResult& fit, const std::optional<MatrixXd>& vcov,
                   const std::string& vcov_source) {
  write_atomic(path, [&](std::ostream& os) {
    const CovarianceModel cm = to_covariance_model(fit.model);
    const auto names = parameter_names(cm);
    const VectorXd theta = parameters(cm);
    os << "[model]\nfamily = " << family_name(cm) << '\n';
    for (std::size_t i = 0; i < names.size(); ++i) {
      os << names[i] << " = " << format_double(theta[static_cast<Eigen::Index>(i)]) << '\n';
    }
    os << "\n[trend]\na0 = " << format_double(fit.trend.intercept()) << "\na1 = " << format_double(fit.trend.slope())
       << "\n\n[fit]\ncomposite_loglik = " << format_double(fit.composite_loglik)
       << "\npseudo_aic = " << format_double(fit.pseudo_aic) << "\nparameters = " << fit.n_params
       << "\nvalid = " << (fit.valid ? "true" : "false") << "\nconverged = " << (fit.converged ? "true" : "false")
       << "\npairs = " << fit.pairs << "\nextent = " << format_double(fit.extent)
       << "\nevaluations = " << fit.evaluations << '\n';
    if (vcov) {
      os << "\n[vcov]\nsource = " << vcov_source << "\nnames = " << join(fit.names(), ",") << '\n';
      for (Eigen::Index i = 0; i < vcov->rows(); ++i) {
        std::vector<std::string> cells;
        for (Eigen::Index j = 0; j < vcov->cols(); ++j) cells.push_back(format_double((*vcov)(i, j)));
        os << "row" << i << " = " << join(cells, ",") << '\n';
      }
    }
  });
}

}  // namespace spa::cli
