#include "spadnet/log.hpp"

#include <atomic>

#include <spdlog/spdlog.h>

namespace spadnet::log {
namespace {
std::atomic<bool> g_quiet{false};
}

void info(std::string_view message) {
  if (!g_quiet) spdlog::info("{}", message);
}

void warn(std::string_view message) {
  if (!g_quiet) spdlog::warn("{}", message);
}

void set_quiet(bool quiet) { g_quiet = quiet; }

}  // namespace spadnet::log
