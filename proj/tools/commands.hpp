#pragma once

#include <iosfwd>
#include <string_view>

#include "config.hpp"

namespace spa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
/// Prefix of every machine-readable error line on stderr.
inline constexpr std::string_view kErrorToken = "spa-error:";

int cmd_simulate(const RunConfig& run, std::ostream& log);
int cmd_fit(const RunConfig& run, std::ostream& log);
int cmd_pa(const RunConfig& run, std::ostream& log);
int cmd_test(const RunConfig& run, std::ostream& log);
int cmd_gcc(const RunConfig& run, std::ostream& log);
int cmd_variogram(const RunConfig& run, std::ostream& log);

/// Parses arguments, dispatches and maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spa::cli
