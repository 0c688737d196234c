#pragma once

#include <iosfwd>

namespace rcw::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitRejected = 2;

/// Runs one command line. Verdicts and reports go to `out`, diagnostics to
/// `err`. Returns 0 when a verdict was computed, 1 on usage or internal
/// errors, 2 when a checked file is rejected.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rcw::cli
