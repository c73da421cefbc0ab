#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>
#include <string>

namespace clf::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

// Level comes from the CLF_LOG environment variable (debug|info|warn|error|off),
// default warn. Read once.
inline Level threshold() {
  static const Level level = [] {
    const char* env = std::getenv("CLF_LOG");
    if (!env) return Level::warn;
    if (std::strcmp(env, "debug") == 0) return Level::debug;
    if (std::strcmp(env, "info") == 0) return Level::info;
    if (std::strcmp(env, "warn") == 0) return Level::warn;
    if (std::strcmp(env, "error") == 0) return Level::error;
    if (std::strcmp(env, "off") == 0) return Level::off;
    return Level::warn;
  }();
  return level;
}

inline void write(Level level, const std::string& message) {
  if (level < threshold()) return;
  static std::mutex mu;
  static const char* names[] = {"DEBUG", "INFO", "WARN", "ERROR"};
  std::lock_guard<std::mutex> lock(mu);
  std::fprintf(stderr, "[clf %s] %s\n", names[static_cast<int>(level)], message.c_str());
}

inline void debug(const std::string& m) { write(Level::debug, m); }
inline void info(const std::string& m) { write(Level::info, m); }
inline void warn(const std::string& m) { write(Level::warn, m); }
inline void error(const std::string& m) { write(Level::error, m); }

}  // namespace clf::log
