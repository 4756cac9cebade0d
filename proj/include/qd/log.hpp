#pragma once

#include <string_view>

namespace qd::log {

enum class Level { Debug, Info, Warn, Error, Off };

void set_level(Level level);
Level level();

void debug(std::string_view message);
void info(std::string_view message);
void warn(std::string_view message);
void error(std::string_view message);

}  // namespace qd::log
