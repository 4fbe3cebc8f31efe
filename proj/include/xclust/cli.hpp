#pragma once

// The xclust command-line tool as a library entry point.

#include <iosfwd>

namespace xclust::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitDegenerate = 4;
inline constexpr int kExitInternal = 1;

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;
/// Default output directory when --output is not given.
inline constexpr const char* kOutputDirEnv = "XCLUST_OUTPUT_DIR";

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xclust::cli
