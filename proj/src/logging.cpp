#include "vcdm/logging.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>

namespace vcdm::logging {

namespace {

std::optional<Level> g_level;

Level from_env() {
  const char* raw = std::getenv("VCDM_LOG_LEVEL");
  if (!raw) return Level::info;
  const std::string v(raw);
  if (v == "error") return Level::error;
  if (v == "debug") return Level::debug;
  return Level::info;
}

}  // namespace

Level level() {
  if (!g_level) g_level = from_env();
  return *g_level;
}

void set_level(Level lvl) { g_level = lvl; }

void write(Level lvl, const std::string& message) {
  const char* tag = lvl == Level::error ? "error" : lvl == Level::info ? "info" : "debug";
  std::cerr << "[vcdm " << tag << "] " << message << '\n';
}

}  // namespace vcdm::logging
