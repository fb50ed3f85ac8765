#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "spa/errors.hpp"
#include "spa/image_codecs.hpp"
#include "spa/imagery.hpp"

using doctest::Approx;
using namespace spa;
namespace fs = std::filesystem;

namespace {

RgbRaster random_raster(Eigen::Index w, Eigen::Index h, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dn(0, 255);
  RgbRaster r(w, h);
  for (Channel* c : {&r.r, &r.g, &r.b}) {
    for (Eigen::Index i = 0; i < c->size(); ++i) (*c)(i) = dn(rng);
  }
  return r;
}

bool same_with_nan(const Channel& a, const Channel& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::isnan(a(i)) != std::isnan(b(i))) return false;
    if (!std::isnan(a(i)) && a(i) != b(i)) return false;
  }
  return true;
}

// 3 x 2 RGB image: (0,255,0) (100,100,100) (0,0,0) / (10,20,30) (255,255,255) (1,2,3).
const unsigned char kPng[] = {
    0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52, 0x00,
    0x00, 0x00, 0x03, 0x00, 0x00, 0x00, 0x02, 0x08, 0x02, 0x00, 0x00, 0x00, 0x12, 0x16, 0xf1, 0x4d, 0x00,
    0x00, 0x00, 0x1c, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x60, 0xf8, 0xcf, 0x90, 0x92, 0x92, 0xc2,
    0xc0, 0xc0, 0xc0, 0xc0, 0x25, 0x22, 0xf7, 0xff, 0xff, 0x7f, 0x46, 0x26, 0x66, 0x00, 0x34, 0x5d, 0x05,
    0x6b, 0xd6, 0x61, 0x26, 0x0f, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};

}  // namespace

TEST_CASE("gcc: examples") {
  RgbRaster px(3, 1);
  px.g(0, 0) = 255;
  px.r(0, 1) = px.g(0, 1) = px.b(0, 1) = 100;
  const GccRaster g = gcc(px);
  CHECK(g.values(0, 0) == 1.0);
  CHECK(g.values(0, 1) == 1.0 / 3.0);
  CHECK(std::isnan(g.values(0, 2)));
  CHECK(g.missing() == 1);
}

TEST_CASE("gcc: values lie in [0, 1]") {
  const GccRaster g = gcc(random_raster(40, 30, 1));
  for (Eigen::Index i = 0; i < g.values.size(); ++i) {
    if (std::isnan(g.values(i))) continue;
    CHECK(g.values(i) >= 0.0);
    CHECK(g.values(i) <= 1.0);
  }
}

TEST_CASE("clip: examples") {
  const RgbRaster r = random_raster(7, 5, 2);
  const RgbRaster full = clip(r, 0, 0, 7, 5);
  CHECK((full.r == r.r).all());
  CHECK((full.g == r.g).all());
  CHECK((full.b == r.b).all());
  const RgbRaster one = clip(r, 4, 3, 1, 1);
  CHECK(one.g(0, 0) == r.g(3, 4));
  CHECK(one.r(0, 0) == r.r(3, 4));
  CHECK_THROWS_AS(clip(r, 5, 0, 3, 1), DomainError);
  CHECK_THROWS_AS(clip(r, -1, 0, 3, 1), DomainError);

  const RgbRaster sensor(2048, 1636);
  const RgbRaster roi = clip(sensor, 700, 500, 570, 660);
  CHECK(roi.width() == 570);
  CHECK(roi.height() == 660);
  CHECK(downscale_block_mean(roi, 15).width() == 38);
  CHECK(downscale_block_mean(roi, 15).height() == 44);
}

TEST_CASE("gcc commutes with clip") {
  const RgbRaster r = random_raster(12, 9, 3);
  const GccRaster a = gcc(clip(r, 2, 1, 6, 5));
  const GccRaster b = gcc(r);
  CHECK(same_with_nan(a.values, b.values.block(1, 2, 5, 6)));
}

TEST_CASE("downscale_block_mean: examples") {
  const RgbRaster r = random_raster(9, 6, 4);
  const RgbRaster same = downscale_block_mean(r, 1);
  CHECK((same.r == r.r).all());
  CHECK((same.b == r.b).all());

  RgbRaster flat(10, 7);
  flat.r.setConstant(12);
  flat.g.setConstant(200);
  flat.b.setConstant(3);
  const RgbRaster small = downscale_block_mean(flat, 3);
  CHECK(small.width() == 4);
  CHECK(small.height() == 3);
  CHECK((small.g == 200.0).all());
  CHECK((small.r == 12.0).all());

  RgbRaster block(2, 2);
  block.g << 0, 100, 100, 200;
  CHECK(downscale_block_mean(block, 2).g(0, 0) == 100.0);

  RgbRaster odd(2, 1);
  odd.g << 100, 101;
  CHECK(downscale_block_mean(odd, 2).g(0, 0) == 100.5);
  CHECK(downscale_block_mean(odd, 2, Rounding::HalfUp).g(0, 0) == 101.0);

  // Trailing partial blocks average their own pixels.
  RgbRaster edge(3, 1);
  edge.g << 10, 20, 90;
  CHECK(downscale_block_mean(edge, 2).g(0, 1) == 90.0);
  CHECK_THROWS_AS(downscale_block_mean(edge, 0), DomainError);
}

TEST_CASE("downscale_block_mean preserves the global mean on divisible sizes") {
  for (int window : {2, 3, 4, 6}) {
    const RgbRaster r = random_raster(24, 12, static_cast<unsigned>(window));
    const RgbRaster d = downscale_block_mean(r, window);
    CHECK(d.r.mean() == Approx(r.r.mean()).epsilon(1e-15));
    CHECK(d.g.mean() == Approx(r.g.mean()).epsilon(1e-15));
    CHECK(d.b.mean() == Approx(r.b.mean()).epsilon(1e-15));
  }
}

TEST_CASE("gcc_block_mean averages per-pixel G_cc") {
  RgbRaster r(2, 1);
  r.g << 100, 50;
  r.r << 100, 0;
  r.b << 0, 0;
  const GccRaster alt = gcc_block_mean(r, 2);
  CHECK(alt.values(0, 0) == Approx(0.75));
  const GccRaster dflt = gcc(downscale_block_mean(r, 2));
  CHECK(dflt.values(0, 0) == Approx(75.0 / 125.0));

  RgbRaster dark(2, 2);
  CHECK(std::isnan(gcc_block_mean(dark, 2).values(0, 0)));
}

TEST_CASE("to_field: examples") {
  GccRaster g;
  g.values.resize(2, 2);
  g.values << 0.3, 0.4, 0.5, 0.6;
  g.timestamp = 2008;
  const ImageField f = to_field({g});
  CHECK(f.field.size() == 4);
  CHECK((f.field.times.array() == 1.0).all());
  CHECK(f.field.coords.row(1) == Eigen::RowVector2d(1.5, 0.5));
  CHECK(f.field.values(2, 0) == 0.5);
  CHECK(f.dropped == 0);

  std::vector<GccRaster> series;
  for (int year = 2008; year < 2023; ++year) {
    GccRaster r;
    r.values = Channel::Constant(58, 44, 0.35);
    r.timestamp = year;
    series.push_back(r);
  }
  series[3].values(5, 5) = std::numeric_limits<double>::quiet_NaN();
  const ImageField big = to_field(series);
  CHECK(big.field.size() == 38280 - 1);
  CHECK(big.dropped == 1);
  CHECK(big.field.times.maxCoeff() == 15.0);
  CHECK(big.field.extent() == 58.0);

  series[1].timestamp = series[0].timestamp;
  CHECK_THROWS_AS(to_field(series), DomainError);
  series[1].timestamp = 2009;
  series[2].values = Channel::Constant(10, 10, 0.3);
  CHECK_THROWS_AS(to_field(series), DomainError);
}

TEST_CASE("ppm round-trip and header parsing") {
  const RgbRaster r = random_raster(5, 4, 7);
  std::stringstream ss;
  write_ppm(ss, r);
  const RgbRaster back = read_ppm(ss);
  CHECK((back.r == r.r).all());
  CHECK((back.g == r.g).all());
  CHECK((back.b == r.b).all());

  std::stringstream ascii("P3\n# comment\n2 1\n255\n0 255 0  100 100 100\n");
  const RgbRaster a = read_ppm(ascii);
  CHECK(a.g(0, 0) == 255);
  CHECK(a.b(0, 1) == 100);

  std::stringstream bad("P5\n1 1\n255\n");
  CHECK_THROWS_AS(read_ppm(bad), DomainError);
  std::stringstream deep("P6\n1 1\n65535\n");
  CHECK_THROWS_AS(read_ppm(deep), DomainError);
}

TEST_CASE("image files: timestamps from names and decoders") {
  CHECK(year_from_stem("harvard_2014_06_15_120000.jpg") == 2014);
  CHECK(year_from_stem("site-2019-07-01.ppm") == 2019);
  CHECK_FALSE(year_from_stem("frame_0001.ppm").has_value());

  const fs::path dir = fs::temp_directory_path() / "spa_imagery_test";
  fs::create_directories(dir);
  const fs::path ppm = dir / "plot_2012-06-30.ppm";
  {
    std::ofstream os(ppm, std::ios::binary);
    write_ppm(os, random_raster(3, 2, 9));
  }
  const RgbRaster loaded = read_image(ppm);
  CHECK(loaded.timestamp == 2012);
  CHECK(loaded.width() == 3);

  if (png_supported()) {
    const fs::path png = dir / "plot_2013-06-30.png";
    {
      std::ofstream os(png, std::ios::binary);
      os.write(reinterpret_cast<const char*>(kPng), sizeof(kPng));
    }
    const RgbRaster p = read_image(png);
    CHECK(p.timestamp == 2013);
    CHECK(p.width() == 3);
    CHECK(p.height() == 2);
    CHECK(p.g(0, 0) == 255);
    CHECK(p.r(0, 1) == 100);
    CHECK(p.b(1, 0) == 30);
    CHECK(p.b(1, 2) == 3);
  }
  CHECK_THROWS_AS(read_image(dir / "missing.ppm"), DomainError);
  CHECK_THROWS_AS(read_image(dir / "notes.txt"), DomainError);
  fs::remove_all(dir);
}

TEST_CASE("write_gcc marks missing pixels") {
  GccRaster g;
  g.values.resize(1, 2);
  g.values << 0.25, std::numeric_limits<double>::quiet_NaN();
  g.timestamp = 3;
  std::stringstream ss;
  write_gcc(ss, g);
  CHECK(ss.str() == "x,y,t,gcc\n0.5,0.5,3,0.25\n1.5,0.5,3,nan\n");
}
