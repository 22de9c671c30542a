#pragma once

#include <sstream>
#include <string>

namespace vcdm::logging {

enum class Level { error = 0, info = 1, debug = 2 };

// Reads VCDM_LOG_LEVEL (error|info|debug); defaults to info.
Level level();
void set_level(Level level);
void write(Level level, const std::string& message);

template <class... Args>
void error(const Args&... args) {
  std::ostringstream s;
  (s << ... << args);
  write(Level::error, s.str());
}

template <class... Args>
void info(const Args&... args) {
  if (level() < Level::info) return;
  std::ostringstream s;
  (s << ... << args);
  write(Level::info, s.str());
}

template <class... Args>
void debug(const Args&... args) {
  if (level() < Level::debug) return;
  std::ostringstream s;
  (s << ... << args);
  write(Level::debug, s.str());
}

}  // namespace vcdm::logging
