#include "rcw/log.hpp"

#include <cstdlib>
#include <string_view>

#include <spdlog/sinks/stdout_sinks.h>

namespace rcw {

spdlog::logger& log() {
  static const std::shared_ptr<spdlog::logger> logger = [] {
    auto l = std::make_shared<spdlog::logger>("rcw", std::make_shared<spdlog::sinks::stderr_sink_mt>());
    const char* env = std::getenv("RCW_LOG");
    const std::string_view level = env ? env : "quiet";
    if (level == "debug")
      l->set_level(spdlog::level::debug);
    else if (level == "info")
      l->set_level(spdlog::level::info);
    else
      l->set_level(spdlog::level::err);
    l->set_pattern("[%l] %v");
    return l;
  }();
  return *logger;
}

}  // namespace rcw
