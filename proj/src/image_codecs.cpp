#include "spa/image_codecs.hpp"

#include <algorithm>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "spa/errors.hpp"

#ifdef SPA_HAVE_PNG
#include <png.h>
#endif
#ifdef SPA_HAVE_JPEG
#include <jpeglib.h>
#endif

namespace spa {
namespace {

using File = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

File open_file(const std::filesystem::path& path) {
  File f(std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!f) throw DomainError("cannot open image " + path.string());
  return f;
}

// Interleaved RGB rows into a raster.
RgbRaster from_rgb(const std::vector<unsigned char>& px, long width, long height) {
  RgbRaster out(width, height);
  std::size_t k = 0;
  for (long y = 0; y < height; ++y) {
    for (long x = 0; x < width; ++x) {
      out.r(y, x) = px[k++];
      out.g(y, x) = px[k++];
      out.b(y, x) = px[k++];
    }
  }
  return out;
}

#ifdef SPA_HAVE_PNG
RgbRaster read_png(const std::filesystem::path& path) {
  File f = open_file(path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) throw NumericalError("png: out of memory");
  std::vector<unsigned char> px;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DomainError("png: cannot decode " + path.string());
  }
  png_init_io(png, f.get());
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  px.resize(std::size_t(width) * height * 3);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = px.data() + std::size_t(y) * width * 3;
  png_read_image(png, rows.data());
  png_destroy_read_struct(&png, &info, nullptr);
  return from_rgb(px, long(width), long(height));
}
#endif

#ifdef SPA_HAVE_JPEG
struct JpegError {
  jpeg_error_mgr base;
  std::jmp_buf jump;
};

RgbRaster read_jpeg(const std::filesystem::path& path) {
  File f = open_file(path);
  jpeg_decompress_struct cinfo{};
  JpegError err{};
  cinfo.err = jpeg_std_error(&err.base);
  err.base.error_exit = [](j_common_ptr c) { std::longjmp(reinterpret_cast<JpegError*>(c->err)->jump, 1); };
  std::vector<unsigned char> px;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw DomainError("jpeg: cannot decode " + path.string());
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, f.get());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const long width = cinfo.output_width;
  const long height = cinfo.output_height;
  px.resize(std::size_t(width) * height * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = px.data() + std::size_t(cinfo.output_scanline) * width * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return from_rgb(px, width, height);
}
#endif

}  // namespace

bool png_supported() {
#ifdef SPA_HAVE_PNG
  return true;
#else
  return false;
#endif
}

bool jpeg_supported() {
#ifdef SPA_HAVE_JPEG
  return true;
#else
  return false;
#endif
}

RgbRaster read_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DomainError("image not found: " + path.string());
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  RgbRaster out;
  if (ext == ".ppm" || ext == ".pnm") {
    return read_ppm(path);
  } else if (ext == ".png") {
#ifdef SPA_HAVE_PNG
    out = read_png(path);
#else
    throw DomainError("PNG support was not built: " + path.string());
#endif
  } else if (ext == ".jpg" || ext == ".jpeg") {
#ifdef SPA_HAVE_JPEG
    out = read_jpeg(path);
#else
    throw DomainError("JPEG support was not built: " + path.string());
#endif
  } else {
    throw DomainError("unsupported image format: " + path.string());
  }
  if (const auto year = year_from_stem(path)) out.timestamp = *year;
  return out;
}

}  // namespace spa
