#pragma once

#include <string_view>

namespace rpm::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

// Process-wide threshold; messages below it are dropped. Default: warn.
void set_level(Level level);
Level level();

void write(Level level, std::string_view message);

inline void debug(std::string_view m) { write(Level::debug, m); }
inline void info(std::string_view m) { write(Level::info, m); }
inline void warn(std::string_view m) { write(Level::warn, m); }

}  // namespace rpm::log
