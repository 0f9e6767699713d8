#pragma once

namespace rllp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;  // bad usage, bad config, or refused overwrite
inline constexpr int kExitAbort = 3;   // simulation aborted

/// Subcommands: run, compare, sweep, gen-path. Diagnostics go to standard error.
int main(int argc, const char* const* argv);

}  // namespace rllp::cli
