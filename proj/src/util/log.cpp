#include "ctrltab/util/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace ctrltab::util {
namespace {
std::atomic<LogLevel> g_level{LogLevel::info};
std::mutex g_mutex;

const char* label(LogLevel level) {
    switch (level) {
    case LogLevel::debug: return "debug";
    case LogLevel::info: return "info";
    case LogLevel::warning: return "warning";
    case LogLevel::error: return "error";
    }
    return "?";
}
} // namespace

void set_log_level(LogLevel level) { g_level = level; }

void log(LogLevel level, std::string_view message) {
    if (level < g_level.load()) return;
    std::lock_guard lock(g_mutex);
    std::cerr << "[" << label(level) << "] " << message << '\n';
}

} // namespace ctrltab::util
