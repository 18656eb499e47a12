#pragma once

#include <iosfwd>

namespace econloop::gateway {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitHalted = 2;
inline constexpr int kExitRejected = 3;
inline constexpr int kExitUsage = 64;

/// econloop run | profile | ablation | serve. Returns the process exit code:
/// 0 Completed, 2 Halted, 3 Rejected, 64 bad flags.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace econloop::gateway
