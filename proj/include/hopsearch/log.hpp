#pragma once

#include <functional>
#include <string>

namespace hopsearch::log {

enum class Level { Info, Warn };

using Sink = std::function<void(Level, const std::string&)>;

// Replaces the process-wide sink; pass nullptr to restore the stderr default.
void set_sink(Sink sink);

void info(const std::string& message);
void warn(const std::string& message);

}  // namespace hopsearch::log
