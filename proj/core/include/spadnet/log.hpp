#pragma once

#include <string_view>

namespace spadnet::log {

void info(std::string_view message);
void warn(std::string_view message);

/// Silences warnings (tests that deliberately trigger them).
void set_quiet(bool quiet);

}  // namespace spadnet::log
