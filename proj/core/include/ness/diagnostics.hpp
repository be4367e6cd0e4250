#pragma once

#include <functional>
#include <string_view>

namespace ness {

using WarningHandler = std::function<void(std::string_view)>;

/// Route a non-fatal diagnostic. Default handler prints to stderr.
void warn(std::string_view message);

/// Install a handler; returns the previous one. Pass an empty function to silence.
WarningHandler set_warning_handler(WarningHandler handler);

} // namespace ness
