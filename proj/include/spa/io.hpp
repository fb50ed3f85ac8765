#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace spa {

/// Writes through a temporary file in the same directory and renames it
/// over `path`, so readers never observe a partial file.
void write_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

/// Shortest decimal form that reads back to the same double; "nan", "inf".
std::string format_double(double value);

/// "a,b,c" or "start:stop:step" (inclusive of stop up to round-off).
std::vector<double> parse_list(std::string_view text);

std::string join(const std::vector<std::string>& items, std::string_view sep = ",");

}  // namespace spa
