#pragma once

#include <spdlog/spdlog.h>

namespace rcw {

/// Shared stderr logger. Level comes from RCW_LOG: "quiet" (default; errors
/// only), "info" or "debug".
spdlog::logger& log();

}  // namespace rcw
