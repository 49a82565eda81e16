#pragma once

#include <ostream>

namespace aggfield {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  ///< verification or analysis failure
inline constexpr int kExitUsage = 2;    ///< bad flags, config or input files

/// Entry point of the aggfield tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aggfield
