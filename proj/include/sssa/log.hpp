#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace sssa {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

// Verbosity comes from SSSA_LOG in {error, info, debug}; default error.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("SSSA_LOG");
    if (env == nullptr) {
      return LogLevel::kError;
    }
    const std::string value(env);
    if (value == "debug") {
      return LogLevel::kDebug;
    }
    if (value == "info") {
      return LogLevel::kInfo;
    }
    return LogLevel::kError;
  }();
  return level;
}

inline void log_message(LogLevel level, const std::string& message) {
  if (level > log_level()) {
    return;
  }
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  const char* tag = level == LogLevel::kError
                        ? "error"
                        : (level == LogLevel::kInfo ? "info" : "debug");
  std::cerr << "[sssa:" << tag << "] " << message << '\n';
}

inline void log_error(const std::string& message) {
  log_message(LogLevel::kError, message);
}
inline void log_info(const std::string& message) {
  log_message(LogLevel::kInfo, message);
}
inline void log_debug(const std::string& message) {
  log_message(LogLevel::kDebug, message);
}

}  // namespace sssa
