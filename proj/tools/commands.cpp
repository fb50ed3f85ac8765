#include "commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <boost/property_tree/exceptions.hpp>

#include "spa/agreement.hpp"
#include "spa/estimation.hpp"
#include "spa/image_codecs.hpp"
#include "spa/imagery.hpp"
#include "spa/io.hpp"
#include "spa/parallel.hpp"
#include "spa/randomfield.hpp"
#include "spa/svg.hpp"

namespace spa::cli {
namespace fs = std::filesystem;
namespace {

std::string fmt(double v) { return format_double(v); }

std::string padded(std::size_t i, int width = 4) {
  std::string s = std::to_string(i);
  return std::string(static_cast<std::size_t>(std::max(0, width - int(s.size()))), '0') + s;
}

std::vector<fs::path> list_files(const fs::path& dir, const std::set<std::string>& extensions) {
  if (!fs::is_directory(dir)) throw ConfigError("input directory not found: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().filename() == "manifest.csv") continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (extensions.count(ext)) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Files named by `section.files` (comma list) or found in `section.input`
// (a file or a directory).
std::vector<fs::path> input_files(const Config& cfg, const std::string& section,
                                  const std::set<std::string>& extensions) {
  std::vector<fs::path> files;
  if (cfg.has(section + ".files")) {
    std::stringstream ss(cfg.get(section + ".files", ""));
    for (std::string item; std::getline(ss, item, ',');) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      if (item.empty()) continue;
      fs::path p = item;
      if (!p.is_absolute()) p = cfg.base_dir() / p;
      files.push_back(p);
    }
    std::vector<std::string> missing;
    for (const auto& p : files) {
      if (!fs::exists(p)) missing.push_back(p.string());
    }
    if (!missing.empty()) throw ConfigError("input file(s) not found: " + join(missing, ", "));
  } else {
    const fs::path input = cfg.get_path(section + ".input");
    if (fs::is_regular_file(input)) {
      files.push_back(input);
    } else if (fs::is_directory(input)) {
      files = list_files(input, extensions);
    } else {
      throw ConfigError("input not found: " + input.string());
    }
  }
  if (files.empty()) throw ConfigError("no input files in [" + section + "]");
  return files;
}

FieldSample load_field(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open field file " + path.string());
  try {
    return read_field(is);
  } catch (const DomainError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_field_file(const fs::path& path, const FieldSample& sample) {
  write_atomic(path, [&](std::ostream& os) { write_field(os, sample); });
}

void write_svg(const fs::path& path, const SvgPlot& plot) {
  write_atomic(path, [&](std::ostream& os) { plot.render(os); });
}

VectorXd model_block(const FittedModel& fitted, MatrixXd& v_theta, double& var_a1, bool& has_vcov) {
  const VectorXd theta = parameters(fitted.model);
  has_vcov = fitted.vcov.has_value();
  var_a1 = 0.0;
  if (!has_vcov) return theta;
  const MatrixXd& v = *fitted.vcov;
  const Eigen::Index p = theta.size();
  if (v.rows() == p + 2 && fitted.vcov_names.size() >= 2 && fitted.vcov_names[0] == "a0" &&
      fitted.vcov_names[1] == "a1") {
    v_theta = v.bottomRightCorner(p, p);
    var_a1 = v(1, 1);
  } else if (v.rows() == p) {
    v_theta = v;
  } else {
    throw ConfigError("[vcov] has " + std::to_string(v.rows()) + " rows; expected " + std::to_string(p) + " or " +
                      std::to_string(p + 2));
  }
  return theta;
}

MeanDifference mean_difference(const Config& cfg, const FittedModel& fitted, double var_a1) {
  if (is_spatiotemporal(fitted.model)) return MeanDifference::from_trend(fitted.trend, var_a1);
  return MeanDifference::constant(cfg.get_double("pa.mu_d", 0.0), cfg.get_double("pa.var_mu_d", 0.0));
}

}  // namespace

int cmd_simulate(const RunConfig& run, std::ostream& log) {
  const Config& cfg = run.config;
  const CovarianceModel model = model_from_section(cfg);
  const GridSpec grid = grid_from_section(cfg);
  if (run.replicates < 1) throw ConfigError("replicates must be at least 1");
  std::optional<FieldSampler> sampler;
  if (is_spatiotemporal(model)) {
    sampler.emplace(grid, as_spatiotemporal(model), trend_from_section(cfg));
  } else {
    const Eigen::Vector2d means(cfg.get_double("means.mu_x", 0.0), cfg.get_double("means.mu_y", 0.0));
    sampler.emplace(grid, as_spatial(model), means);
  }
  std::vector<std::string> files(static_cast<std::size_t>(run.replicates));
  parallel_for(files.size(), run.jobs, [&](std::size_t r) {
    const FieldSample sample = sampler->draw(run.seed, r);
    files[r] = "field_" + padded(r + 1) + ".csv";
    write_field_file(run.out / files[r], sample);
  });
  write_atomic(run.out / "manifest.csv", [&](std::ostream& os) {
    os << "replicate,seed,stream,file,family,method\n";
    for (std::size_t r = 0; r < files.size(); ++r) {
      os << r + 1 << ',' << run.seed << ',' << r << ',' << files[r] << ',' << family_name(model) << ','
         << sampler->method() << '\n';
    }
  });
  log << "simulated " << files.size() << " field(s) of family " << family_name(model) << " on a " << grid.n_s << 'x'
      << grid.n_s << 'x' << grid.n_t << " grid (" << sampler->method() << ") into " << run.out.string() << '\n';
  if (sampler->jitter_applied()) log << "note: diagonal jitter 1e-10 sigma^2 was applied\n";
  return kExitOk;
}

int cmd_fit(const RunConfig& run, std::ostream& log) {
  const Config& cfg = run.config;
  const StFamily family = parse_family(cfg.get("fit.family", "exponential"));
  const PairwiseConfig pairwise = pairwise_from_section(cfg);
  const std::string vcov_mode = cfg.get("fit.vcov", "hessian");
  if (vcov_mode != "hessian" && vcov_mode != "bootstrap") {
    throw ConfigError("fit.vcov must be hessian or bootstrap");
  }
  const auto files = input_files(cfg, "fit", {".csv"});

  std::vector<FitResult> fits(files.size());
  std::vector<FieldSample> data(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) data[i] = load_field(files[i]);
  parallel_for(files.size(), run.jobs, [&](std::size_t i) { fits[i] = fit(data[i], family, pairwise); });

  fs::create_directories(run.out / "fits");
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::optional<MatrixXd> vcov = fits[i].v_full;
    std::string source = "naive inverse Hessian of the composite log-likelihood";
    if (vcov_mode == "bootstrap") {
      const GridSpec grid = data[i].grid ? *data[i].grid : grid_from_section(cfg);
      const int reps = cfg.get_int("fit.bootstrap_replicates", 100);
      vcov = parametric_bootstrap_vcov(fits[i], grid, reps, run.seed, run.jobs, pairwise);
      source = "parametric bootstrap, " + std::to_string(reps) + " replicates";
    }
    write_fit_ini(run.out / "fits" / (files[i].stem().string() + ".fit.ini"), fits[i], vcov, source);
  }

  const auto names = fits.front().names();
  write_atomic(run.out / "fits.csv", [&](std::ostream& os) {
    os << "file," << join(names, ",") << ",composite_loglik,pseudo_aic,valid,converged,pairs\n";
    for (std::size_t i = 0; i < fits.size(); ++i) {
      os << files[i].filename().string();
      const VectorXd est = fits[i].estimates();
      for (Eigen::Index k = 0; k < est.size(); ++k) os << ',' << fmt(est[k]);
      os << ',' << fmt(fits[i].composite_loglik) << ',' << fmt(fits[i].pseudo_aic) << ',' << fits[i].valid << ','
         << fits[i].converged << ',' << fits[i].pairs << '\n';
    }
  });

  // One row per statistic (true, mean, sd), one column per parameter, then percent valid.
  std::optional<SpatioTemporalModel> truth;
  if (cfg.has_section("model")) {
    const CovarianceModel m = model_from_section(cfg);
    if (is_spatiotemporal(m) && family_name(m) == to_string(family)) truth = as_spatiotemporal(m);
  }
  const MonteCarloSummary summary =
      summarize(fits, truth ? *truth : fits.front().model, truth ? trend_from_section(cfg) : fits.front().trend);
  write_atomic(run.out / "summary.csv", [&](std::ostream& os) {
    os << "statistic," << join(names, ",") << ",percent_valid\n";
    if (truth) {
      os << "true";
      for (const auto& r : summary.rows) os << ',' << fmt(r.truth);
      os << ",\n";
    }
    os << "mean";
    for (const auto& r : summary.rows) os << ',' << fmt(r.mean);
    os << ',' << fmt(summary.percent_valid) << "\nsd";
    for (const auto& r : summary.rows) os << ',' << fmt(r.sd);
    os << ",\n";
  });
  log << "fitted " << fits.size() << " file(s); percent valid " << fmt(summary.percent_valid) << "%\n";
  for (std::size_t i = 0; i < fits.size(); ++i) {
    for (const auto& w : fits[i].warnings) log << "warning: " << files[i].filename().string() << ": " << w << '\n';
  }
  return kExitOk;
}

int cmd_pa(const RunConfig& run, std::ostream& log) {
  const Config& cfg = run.config;
  const FittedModel fitted = fitted_from_config(cfg);
  MatrixXd v_theta;
  double var_a1 = 0.0;
  bool has_vcov = false;
  model_block(fitted, v_theta, var_a1, has_vcov);
  const bool st = is_spatiotemporal(fitted.model);

  CurveGrid grid;
  grid.c_values = cfg.get_list("pa.c", {});
  grid.h_values = cfg.get_list("pa.h", {});
  grid.u_values = st ? cfg.get_list("pa.u", {0.0, 1.0, 2.0, 3.0}) : std::vector<double>{0.0};
  if (grid.h_values.empty()) throw ConfigError("pa.h must list at least one spatial lag");
  if (grid.c_values.empty()) throw ConfigError("pa.c must list at least one threshold");
  if (grid.u_values.empty()) throw ConfigError("pa.u must list at least one time lag");

  const MeanDifference mean = mean_difference(cfg, fitted, var_a1);
  const auto rows = pa_curve(fitted.model, mean, grid, has_vcov ? std::optional<MatrixXd>(v_theta) : std::nullopt);

  write_atomic(run.out / "pa_curve.csv", [&](std::ostream& os) {
    os << "u,c,h,psi,sd\n";
    for (const auto& r : rows) os << fmt(r.u) << ',' << fmt(r.c) << ',' << fmt(r.h) << ',' << fmt(r.psi) << ','
                                  << fmt(r.sd) << '\n';
  });
  for (double u : grid.u_values) {
    SvgPlot plot(st ? "Probability of agreement, u = " + fmt(u) : "Probability of agreement", "||h||", "PA");
    plot.set_y_range(0.0, 1.0);
    for (double c : grid.c_values) {
      std::vector<double> xs;
      std::vector<double> ys;
      for (const auto& r : rows) {
        if (r.u == u && r.c == c) xs.push_back(r.h), ys.push_back(r.psi);
      }
      plot.add_series("c = " + fmt(c), xs, ys);
    }
    write_svg(run.out / ("pa_u" + fmt(u) + ".svg"), plot);
  }
  log << "wrote " << rows.size() << " PA values for family " << family_name(fitted.model) << " to "
      << (run.out / "pa_curve.csv").string() << '\n';
  return kExitOk;
}

int cmd_test(const RunConfig& run, std::ostream& log) {
  const Config& cfg = run.config;
  const FittedModel fitted = fitted_from_config(cfg);
  MatrixXd v_theta;
  double var_a1 = 0.0;
  bool has_vcov = false;
  model_block(fitted, v_theta, var_a1, has_vcov);
  if (!has_vcov) throw ConfigError("test needs a [vcov] section (write one with `spa fit`)");

  const double psi0 = cfg.get_double("test.psi0", 0.95);
  if (!(psi0 >= 0.0 && psi0 <= 1.0)) throw ConfigError("test.psi0 must lie in [0, 1], got " + fmt(psi0));
  const Alternative alternative = parse_alternative(cfg.get("test.alternative", "less"));
  const double level = cfg.get_double("test.level", 0.05);
  const double c = cfg.get_double("test.c", cfg.get_list("pa.c", {0.1}).front());
  const auto hs = cfg.get_list("test.h", {0.0});
  const double u = cfg.get_double("test.u", 0.0);
  const bool monotone = cfg.get_bool("test.monotone", !std::holds_alternative<WaveModel>(fitted.model));
  const MeanDifference mean = mean_difference(cfg, fitted, var_a1);

  std::vector<PaTestResult> results;
  std::vector<PaEstimate> estimates;
  for (double h : hs) {
    estimates.push_back(pa_estimate(fitted.model, mean, c, Lag{h, u}, v_theta));
    results.push_back(pa_test(estimates.back(), psi0, alternative, monotone));
  }
  write_atomic(run.out / "test.csv", [&](std::ostream& os) {
    os << "h,u,c,psi0,psi_hat,sd,sd_printed,z,p_value,alternative,level,rejected,rejects_all_lags\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& e = estimates[i];
      const auto& r = results[i];
      os << fmt(e.lag.h) << ',' << fmt(e.lag.u) << ',' << fmt(c) << ',' << fmt(psi0) << ',' << fmt(r.psi_hat) << ','
         << fmt(e.sd()) << ',' << fmt(std::sqrt(e.variance_printed)) << ',' << fmt(r.z) << ',' << fmt(r.p_value)
         << ',' << to_string(alternative) << ',' << fmt(level) << ',' << r.rejected(level) << ','
         << (r.rejected(level) && r.rejects_all_lags_if_rejected) << '\n';
    }
  });
  for (std::size_t i = 0; i < results.size(); ++i) {
    log << "h=" << fmt(estimates[i].lag.h) << " u=" << fmt(u) << " psi_hat=" << fmt(results[i].psi_hat)
        << " z=" << fmt(results[i].z) << " p=" << fmt(results[i].p_value)
        << (results[i].rejected(level) ? " reject H0" : " do not reject H0") << '\n';
  }
  return kExitOk;
}

int cmd_gcc(const RunConfig& run, std::ostream& log) {
  const Config& cfg = run.config;
  const auto files = input_files(cfg, "gcc", {".ppm", ".pnm", ".png", ".jpg", ".jpeg"});
  const int window = cfg.get_int("gcc.window", 15);
  const std::string order = cfg.get("gcc.order", "downscale-first");
  if (order != "downscale-first" && order != "gcc-first") {
    throw ConfigError("gcc.order must be downscale-first or gcc-first");
  }
  const std::string rounding_name = cfg.get("gcc.rounding", "none");
  if (rounding_name != "none" && rounding_name != "half-up") throw ConfigError("gcc.rounding must be none or half-up");
  const Rounding rounding = rounding_name == "half-up" ? Rounding::HalfUp : Rounding::None;
  const bool do_clip = cfg.has("gcc.width") || cfg.has("gcc.height");

  std::vector<GccRaster> rasters(files.size());
  std::vector<bool> dated(files.size());
  parallel_for(files.size(), run.jobs, [&](std::size_t i) {
    RgbRaster img = read_image(files[i]);
    dated[i] = year_from_stem(files[i]).has_value();
    if (do_clip) {
      img = clip(img, cfg.get_int("gcc.x0", 0), cfg.get_int("gcc.y0", 0), std::stoi(cfg.require("gcc.width")),
                 std::stoi(cfg.require("gcc.height")));
    }
    rasters[i] = order == "downscale-first" ? gcc(downscale_block_mean(img, window, rounding))
                                            : gcc_block_mean(img, window);
  });
  const auto n_dated = std::count(dated.begin(), dated.end(), true);
  if (n_dated != 0 && n_dated != static_cast<long>(dated.size())) {
    throw ConfigError("either every image name or none must carry a yyyy-mm-dd date");
  }
  if (n_dated == 0) {
    for (std::size_t i = 0; i < rasters.size(); ++i) rasters[i].timestamp = static_cast<int>(i) + 1;
  }

  const ImageField field = to_field(rasters);
  write_field_file(run.out / "gcc_field.csv", field.field);
  const int first = std::min_element(rasters.begin(), rasters.end(), [](const auto& a, const auto& b) {
                      return a.timestamp < b.timestamp;
                    })->timestamp;
  write_atomic(run.out / "gcc_summary.csv", [&](std::ostream& os) {
    os << "file,timestamp,t,width,height,mean,min,max,missing\n";
    for (std::size_t i = 0; i < rasters.size(); ++i) {
      const auto& g = rasters[i];
      const Channel present = g.values.isNaN().select(0.0, Channel::Ones(g.height(), g.width()));
      const Channel filled = g.values.isNaN().select(0.0, g.values);
      const double n = present.sum();
      const double lo = g.values.isNaN().select(std::numeric_limits<double>::infinity(), g.values).minCoeff();
      const double hi = g.values.isNaN().select(-std::numeric_limits<double>::infinity(), g.values).maxCoeff();
      os << files[i].filename().string() << ',' << g.timestamp << ',' << g.timestamp - first + 1 << ','
         << g.width() << ',' << g.height() << ',' << fmt(n > 0 ? filled.sum() / n : NAN) << ',' << fmt(lo) << ','
         << fmt(hi) << ',' << g.missing() << '\n';
    }
  });
  log << "output dimensions: " << rasters.front().width() << " x " << rasters.front().height() << " pixels per image ("
      << files.size() << " images, window " << window << ", " << order << ")\n";
  log << "field rows: " << field.field.size() << "; missing pixels dropped: " << field.dropped << '\n';
  return kExitOk;
}

int cmd_variogram(const RunConfig& run, std::ostream& log) {
  const Config& cfg = run.config;
  FieldSample data = load_field(cfg.get_path("variogram.input"));
  if (data.bivariate()) throw ConfigError("variogram needs a space-time field file (x,y,t,value)");
  const PairwiseConfig pairwise = pairwise_from_section(cfg);
  if (cfg.get_bool("variogram.detrend", true)) {
    const DetrendResult d = ols_detrend(data);
    data.values = d.residuals;
    write_atomic(run.out / "trend.csv", [&](std::ostream& os) {
      os << "a0,a1\n" << fmt(d.trend.intercept()) << ',' << fmt(d.trend.slope()) << '\n';
    });
    write_field_file(run.out / "residuals.csv", data);
  }
  VariogramBins bins;
  bins.h_edges = cfg.get_list("variogram.h_edges", {});
  const VariogramEstimate v = empirical_variogram(data, bins, pairwise);

  auto table = [&](const std::string& name, const std::vector<VariogramRow>& rows) {
    write_atomic(run.out / name, [&](std::ostream& os) {
      os << "h,u,gamma,count\n";
      for (const auto& r : rows) os << fmt(r.h) << ',' << fmt(r.u) << ',' << fmt(r.gamma) << ',' << r.count << '\n';
    });
  };
  table("variogram_spatial.csv", v.spatial);
  table("variogram_temporal.csv", v.temporal);
  table("variogram_joint.csv", v.joint);

  std::optional<SpatioTemporalModel> model;
  if (cfg.has_section("model")) {
    const CovarianceModel m = model_from_section(cfg);
    if (is_spatiotemporal(m)) model = as_spatiotemporal(m);
  }
  auto plot = [&](const std::string& file, const std::string& title, const std::string& xlabel,
                  const std::vector<VariogramRow>& rows, bool spatial) {
    SvgPlot p(title, xlabel, "semivariance");
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& r : rows) xs.push_back(spatial ? r.h : r.u), ys.push_back(r.gamma);
    p.add_series("empirical", xs, ys);
    if (model && !xs.empty()) {
      std::vector<double> mx;
      std::vector<double> my;
      const double hi = *std::max_element(xs.begin(), xs.end());
      for (int k = 0; k <= 100; ++k) {
        const double x = hi * k / 100.0;
        mx.push_back(x);
        my.push_back(0.5 * (spatial ? st_sigma_d2(*model, x, 0.0) : st_sigma_d2(*model, 0.0, x)));
      }
      p.add_series("model", mx, my);
    }
    write_svg(run.out / file, p);
  };
  plot("variogram_spatial.svg", "Marginal spatial variogram (u = 0)", "||h||", v.spatial, true);
  plot("variogram_temporal.svg", "Marginal temporal variogram (h = 0)", "u", v.temporal, false);
  log << "variogram: " << v.spatial.size() << " spatial bins, " << v.temporal.size() << " temporal lags, "
      << v.joint.size() << " joint cells\n";
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Probability of agreement for spatial and space-time Gaussian fields", "spa"};
  app.require_subcommand(1);
  std::string config_path;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir;
  const std::map<std::string, int (*)(const RunConfig&, std::ostream&)> commands{
      {"simulate", cmd_simulate}, {"fit", cmd_fit},   {"pa", cmd_pa},
      {"test", cmd_test},         {"gcc", cmd_gcc},   {"variogram", cmd_variogram},
  };
  const std::map<std::string, std::string> help{
      {"simulate", "simulate Gaussian fields on a grid"},
      {"fit", "fit trend and covariance by pairwise composite likelihood"},
      {"pa", "probability-of-agreement curves over lags and thresholds"},
      {"test", "test H0: psi = psi0 at given lags"},
      {"gcc", "clip, downscale and compute G_cc fields from images"},
      {"variogram", "detrend and compute empirical variograms"},
  };
  std::map<std::string, std::array<CLI::Option*, 3>> overrides;
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "INI configuration file")->required();
    overrides[name] = {sub->add_option("--seed", seed, "base RNG seed"),
                       sub->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber),
                       sub->add_option("--out", out_dir, "output directory")};
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << kErrorToken << ' ' << e.what() << '\n';
    return kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    RunConfig rc;
    rc.command = name;
    rc.config = Config::load(config_path);
    const auto& opts = overrides.at(name);
    rc.seed = opts[0]->count() ? seed : rc.config.get_u64("run.seed", 1);
    rc.jobs = opts[1]->count() ? jobs : rc.config.get_int("run.jobs", 1);
    rc.replicates = rc.config.get_int("run.replicates", 1);
    rc.out = opts[2]->count() ? fs::path(out_dir)
                              : (rc.config.has("run.out") ? rc.config.get_path("run.out") : fs::path("out"));
    if (rc.jobs < 1) throw ConfigError("jobs must be at least 1");
    fs::create_directories(rc.out);
    return commands.at(name)(rc, out);
  } catch (const ModelValidityError& e) {
    err << kErrorToken << ' ' << e.what() << '\n';
    for (const auto& v : e.violations()) err << kErrorToken << " violation: " << v << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << kErrorToken << ' ' << e.what() << '\n';
    return kExitNumerical;
  } catch (const DomainError& e) {
    err << kErrorToken << ' ' << e.what() << '\n';
    return kExitConfig;
  } catch (const boost::property_tree::ptree_error& e) {
    err << kErrorToken << " config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << kErrorToken << ' ' << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << kErrorToken << ' ' << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace spa::cli
