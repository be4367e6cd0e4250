#include "ness/diagnostics.hpp"

#include <iostream>
#include <mutex>

namespace ness {
namespace {

std::mutex &handler_mutex() {
  static std::mutex m;
  return m;
}

WarningHandler &handler() {
  static WarningHandler h = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return h;
}

} // namespace

void warn(std::string_view message) {
  std::lock_guard lock(handler_mutex());
  if (handler())
    handler()(message);
}

WarningHandler set_warning_handler(WarningHandler h) {
  std::lock_guard lock(handler_mutex());
  auto previous = std::move(handler());
  handler() = std::move(h);
  return previous;
}

} // namespace ness
