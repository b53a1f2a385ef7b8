#pragma once

#include <ostream>

namespace plh::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitContract = 3;
inline constexpr int kExitVerify = 4;

/// Runs one command line. Results go to `out` unless --out names a file;
/// diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plh::cli
