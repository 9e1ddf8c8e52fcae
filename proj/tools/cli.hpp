#pragma once

#include <iosfwd>

namespace voxgs::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;    // bad arguments, unreadable input, invalid values
inline constexpr int kExitCorrupt = 3;  // container failed a decoder check
inline constexpr int kExitDegenerate = 4;  // calibration result undefined

// Entry point of the voxgs tool, callable in-process.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace voxgs::cli
