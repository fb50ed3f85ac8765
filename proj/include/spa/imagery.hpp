#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spa/randomfield.hpp"
#include "spa/types.hpp"

namespace spa {

using Channel = Eigen::ArrayXXd;  // height x width

/// Three-channel raster of digital numbers. Channels are stored as doubles
/// so that block means need not be rounded; decoded images hold integers
/// in [0, 255].
struct RgbRaster {
  Channel r;
  Channel g;
  Channel b;
  int timestamp = 0;

  RgbRaster() = default;
  RgbRaster(Eigen::Index width, Eigen::Index height, int timestamp = 0);

  Eigen::Index width() const { return r.cols(); }
  Eigen::Index height() const { return r.rows(); }

  /// Throws DomainError unless dimensions are positive, channels agree in
  /// shape and every value lies in [0, 255].
  void validate() const;
};

/// Green chromatic coordinate per pixel; NaN marks a missing pixel.
struct GccRaster {
  Channel values;
  int timestamp = 0;

  Eigen::Index width() const { return values.cols(); }
  Eigen::Index height() const { return values.rows(); }
  Eigen::Index missing() const;
};

/// Sub-raster with top-left pixel (x0, y0).
RgbRaster clip(const RgbRaster& raster, Eigen::Index x0, Eigen::Index y0, Eigen::Index width, Eigen::Index height);

enum class Rounding { None, HalfUp };

/// Output is ceil(height / window) x ceil(width / window); each pixel is the
/// mean over its block, trailing partial blocks included. Rounding::HalfUp
/// rounds each mean to an integer digital number.
RgbRaster downscale_block_mean(const RgbRaster& raster, int window, Rounding rounding = Rounding::None);

/// G / (R + G + B); pixels with R + G + B = 0 are missing.
GccRaster gcc(const RgbRaster& raster);

/// Alternative order: mean of the per-pixel G_cc over each block (missing
/// pixels skipped; a block without any present pixel is missing).
GccRaster gcc_block_mean(const RgbRaster& raster, int window);

struct ImageField {
  FieldSample field;
  std::size_t dropped = 0;
};

/// Stacks rasters into a space-time field: one row per present pixel,
/// coordinates at pixel centres (x + 0.5, y + 0.5), t = timestamp - first
/// timestamp + 1. Rows are ordered by time, then row-major.
ImageField to_field(const std::vector<GccRaster>& rasters);

/// Comma-separated x,y,t,gcc; missing pixels are written as "nan".
void write_gcc(std::ostream& os, const GccRaster& raster);

/// Binary (P6) or ASCII (P3) portable pixmap with maxval 255.
RgbRaster read_ppm(std::istream& is);
RgbRaster read_ppm(const std::filesystem::path& path);
/// Binary P6; values are rounded half-up and clamped to [0, 255].
void write_ppm(std::ostream& os, const RgbRaster& raster);

/// Year of the first yyyy-mm-dd or yyyy_mm_dd date in a file stem.
std::optional<int> year_from_stem(const std::filesystem::path& path);

}  // namespace spa
