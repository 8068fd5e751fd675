#pragma once

#include <string>

namespace hardatt {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3 };

void set_log_level(LogLevel level);
void log(LogLevel level, const std::string& message);

// Logs `message` the first time `key` is seen in this process.
void log_once(LogLevel level, const std::string& key, const std::string& message);

}  // namespace hardatt
