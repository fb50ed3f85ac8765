#pragma once

#include <filesystem>

#include "spa/imagery.hpp"

namespace spa {

bool png_supported();
bool jpeg_supported();

/// Decodes a PPM, PNG or JPEG file by extension and sets the timestamp from
/// a date in the file stem when one is present. PNG and JPEG require the
/// corresponding library at build time.
RgbRaster read_image(const std::filesystem::path& path);

}  // namespace spa
