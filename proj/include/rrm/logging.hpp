#pragma once

#include <functional>
#include <string_view>

namespace rrm {

enum class LogLevel { Info, Warning, Error };

using LogSink = std::function<void(LogLevel, std::string_view)>;

// Installs a process-wide sink; passing an empty function restores stderr.
// Returns the previously installed sink.
LogSink set_log_sink(LogSink sink);

void log(LogLevel level, std::string_view message);

inline void log_info(std::string_view message) { log(LogLevel::Info, message); }
inline void log_warning(std::string_view message) { log(LogLevel::Warning, message); }

}  // namespace rrm
