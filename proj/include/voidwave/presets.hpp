#pragma once

#include <string>
#include <vector>

namespace voidwave {

// Text of a named built-in configuration (same content as the matching
// presets/<name>.cfg file); throws ConfigError for unknown names.
const std::string& preset_text(const std::string& name);

std::vector<std::string> preset_names();

} // namespace voidwave
