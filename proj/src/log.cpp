#include "qd/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace qd::log {

namespace {

std::atomic<Level> g_level{Level::Info};
std::mutex g_mu;

void emit(Level at, std::string_view tag, std::string_view message) {
    if (at < g_level.load()) return;
    std::lock_guard lock(g_mu);
    std::cerr << "qd: " << tag << message << '\n';
}

}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level.load(); }

void debug(std::string_view message) { emit(Level::Debug, "debug: ", message); }
void info(std::string_view message) { emit(Level::Info, "", message); }
void warn(std::string_view message) { emit(Level::Warn, "warning: ", message); }
void error(std::string_view message) { emit(Level::Error, "error: ", message); }

}  // namespace qd::log
