#include "spa/imagery.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <regex>

#include "spa/errors.hpp"

namespace spa {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Channel block_mean(const Channel& c, int window) {
  const Eigen::Index rows = (c.rows() + window - 1) / window;
  const Eigen::Index cols = (c.cols() + window - 1) / window;
  Channel out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Eigen::Index r0 = i * window;
      const Eigen::Index c0 = j * window;
      const Eigen::Index nr = std::min<Eigen::Index>(window, c.rows() - r0);
      const Eigen::Index nc = std::min<Eigen::Index>(window, c.cols() - c0);
      out(i, j) = c.block(r0, c0, nr, nc).sum() / double(nr * nc);
    }
  }
  return out;
}

// Skips whitespace and '#' comments between PPM header tokens.
long read_header_int(std::istream& is) {
  for (;;) {
    const int ch = is.peek();
    if (ch == '#') {
      is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    } else if (std::isspace(ch)) {
      is.get();
    } else {
      break;
    }
  }
  long v = -1;
  if (!(is >> v)) throw DomainError("ppm: malformed header");
  return v;
}

}  // namespace

RgbRaster::RgbRaster(Eigen::Index width, Eigen::Index height, int ts)
    : r(Channel::Zero(height, width)), g(Channel::Zero(height, width)), b(Channel::Zero(height, width)),
      timestamp(ts) {}

void RgbRaster::validate() const {
  if (width() <= 0 || height() <= 0) throw DomainError("raster: dimensions must be positive");
  if (g.rows() != r.rows() || g.cols() != r.cols() || b.rows() != r.rows() || b.cols() != r.cols()) {
    throw DomainError("raster: channel shapes differ");
  }
  for (const Channel* c : {&r, &g, &b}) {
    if (!c->allFinite() || c->minCoeff() < 0.0 || c->maxCoeff() > 255.0) {
      throw DomainError("raster: channel values must lie in [0, 255]");
    }
  }
}

Eigen::Index GccRaster::missing() const { return values.isNaN().count(); }

RgbRaster clip(const RgbRaster& raster, Eigen::Index x0, Eigen::Index y0, Eigen::Index width, Eigen::Index height) {
  if (x0 < 0 || y0 < 0 || width <= 0 || height <= 0 || x0 + width > raster.width() ||
      y0 + height > raster.height()) {
    throw DomainError("clip: rectangle (" + std::to_string(x0) + ", " + std::to_string(y0) + ", " +
                      std::to_string(width) + " x " + std::to_string(height) + ") exceeds the " +
                      std::to_string(raster.width()) + " x " + std::to_string(raster.height()) + " raster");
  }
  RgbRaster out;
  out.r = raster.r.block(y0, x0, height, width);
  out.g = raster.g.block(y0, x0, height, width);
  out.b = raster.b.block(y0, x0, height, width);
  out.timestamp = raster.timestamp;
  return out;
}

RgbRaster downscale_block_mean(const RgbRaster& raster, int window, Rounding rounding) {
  if (window <= 0) throw DomainError("downscale: window must be at least 1");
  RgbRaster out;
  out.r = block_mean(raster.r, window);
  out.g = block_mean(raster.g, window);
  out.b = block_mean(raster.b, window);
  out.timestamp = raster.timestamp;
  if (rounding == Rounding::HalfUp) {
    for (Channel* c : {&out.r, &out.g, &out.b}) *c = (*c + 0.5).floor();
  }
  return out;
}

GccRaster gcc(const RgbRaster& raster) {
  GccRaster out;
  out.timestamp = raster.timestamp;
  const Channel total = raster.r + raster.g + raster.b;
  out.values = (total > 0.0).select(raster.g / total, kNaN);
  return out;
}

GccRaster gcc_block_mean(const RgbRaster& raster, int window) {
  if (window <= 0) throw DomainError("gcc_block_mean: window must be at least 1");
  const GccRaster fine = gcc(raster);
  const Channel present = fine.values.isNaN().select(0.0, Channel::Ones(fine.height(), fine.width()));
  const Channel filled = fine.values.isNaN().select(0.0, fine.values);
  const Eigen::Index rows = (fine.height() + window - 1) / window;
  const Eigen::Index cols = (fine.width() + window - 1) / window;
  GccRaster out;
  out.timestamp = raster.timestamp;
  out.values.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const Eigen::Index r0 = i * window;
      const Eigen::Index c0 = j * window;
      const Eigen::Index nr = std::min<Eigen::Index>(window, fine.height() - r0);
      const Eigen::Index nc = std::min<Eigen::Index>(window, fine.width() - c0);
      const double n = present.block(r0, c0, nr, nc).sum();
      out.values(i, j) = n > 0.0 ? filled.block(r0, c0, nr, nc).sum() / n : kNaN;
    }
  }
  return out;
}

ImageField to_field(const std::vector<GccRaster>& rasters) {
  if (rasters.empty()) throw DomainError("to_field: no rasters");
  const Eigen::Index w = rasters.front().width();
  const Eigen::Index h = rasters.front().height();
  std::map<int, const GccRaster*> by_time;
  for (const GccRaster& g : rasters) {
    if (g.width() != w || g.height() != h) {
      throw DomainError("to_field: raster dimensions differ (" + std::to_string(g.width()) + " x " +
                        std::to_string(g.height()) + " vs " + std::to_string(w) + " x " + std::to_string(h) + ")");
    }
    if (!by_time.emplace(g.timestamp, &g).second) {
      throw DomainError("to_field: duplicate timestamp " + std::to_string(g.timestamp));
    }
  }
  const int first = by_time.begin()->first;

  ImageField out;
  Eigen::Index rows = 0;
  for (const auto& [t, g] : by_time) rows += g->values.size() - g->missing();
  out.dropped = static_cast<std::size_t>(Eigen::Index(rasters.size()) * w * h - rows);
  FieldSample& f = out.field;
  f.coords.resize(rows, 2);
  f.times.resize(rows);
  f.values.resize(rows, 1);
  f.extent_hint = double(std::max(w, h));
  Eigen::Index k = 0;
  for (const auto& [t, g] : by_time) {
    for (Eigen::Index y = 0; y < h; ++y) {
      for (Eigen::Index x = 0; x < w; ++x) {
        const double v = g->values(y, x);
        if (std::isnan(v)) continue;
        f.coords.row(k) << x + 0.5, y + 0.5;
        f.times[k] = t - first + 1.0;
        f.values(k, 0) = v;
        ++k;
      }
    }
  }
  return out;
}

void write_gcc(std::ostream& os, const GccRaster& raster) {
  os.precision(17);
  os << "x,y,t,gcc\n";
  for (Eigen::Index y = 0; y < raster.height(); ++y) {
    for (Eigen::Index x = 0; x < raster.width(); ++x) {
      const double v = raster.values(y, x);
      os << x + 0.5 << ',' << y + 0.5 << ',' << raster.timestamp << ',';
      if (std::isnan(v)) {
        os << "nan\n";
      } else {
        os << v << '\n';
      }
    }
  }
}

RgbRaster read_ppm(std::istream& is) {
  char magic[2] = {0, 0};
  is.read(magic, 2);
  if (!is || magic[0] != 'P' || (magic[1] != '6' && magic[1] != '3')) {
    throw DomainError("ppm: expected a P6 or P3 header");
  }
  const long width = read_header_int(is);
  const long height = read_header_int(is);
  const long maxval = read_header_int(is);
  if (width <= 0 || height <= 0) throw DomainError("ppm: dimensions must be positive");
  if (maxval != 255) throw DomainError("ppm: only maxval 255 is supported");
  RgbRaster out(width, height);
  if (magic[1] == '6') {
    is.get();  // single whitespace before the raster
    std::vector<unsigned char> bytes(static_cast<std::size_t>(width * height * 3));
    is.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (is.gcount() != static_cast<std::streamsize>(bytes.size())) throw DomainError("ppm: truncated pixel data");
    std::size_t k = 0;
    for (long y = 0; y < height; ++y) {
      for (long x = 0; x < width; ++x) {
        out.r(y, x) = bytes[k++];
        out.g(y, x) = bytes[k++];
        out.b(y, x) = bytes[k++];
      }
    }
  } else {
    for (long y = 0; y < height; ++y) {
      for (long x = 0; x < width; ++x) {
        for (Channel* c : {&out.r, &out.g, &out.b}) {
          const long v = read_header_int(is);
          if (v < 0 || v > 255) throw DomainError("ppm: sample out of range");
          (*c)(y, x) = double(v);
        }
      }
    }
  }
  return out;
}

RgbRaster read_ppm(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DomainError("cannot open image " + path.string());
  RgbRaster out = read_ppm(is);
  if (const auto year = year_from_stem(path)) out.timestamp = *year;
  return out;
}

void write_ppm(std::ostream& os, const RgbRaster& raster) {
  raster.validate();
  os << "P6\n" << raster.width() << ' ' << raster.height() << "\n255\n";
  for (Eigen::Index y = 0; y < raster.height(); ++y) {
    for (Eigen::Index x = 0; x < raster.width(); ++x) {
      for (const Channel* c : {&raster.r, &raster.g, &raster.b}) {
        os.put(static_cast<char>(static_cast<unsigned char>(std::clamp(std::floor((*c)(y, x) + 0.5), 0.0, 255.0))));
      }
    }
  }
}

std::optional<int> year_from_stem(const std::filesystem::path& path) {
  static const std::regex date(R"((\d{4})[-_](\d{2})[-_](\d{2}))");
  const std::string stem = path.stem().string();
  std::smatch m;
  if (!std::regex_search(stem, m, date)) return std::nullopt;
  const int month = std::stoi(m[2].str());
  const int day = std::stoi(m[3].str());
  if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
  return std::stoi(m[1].str());
}

}  // namespace spa
