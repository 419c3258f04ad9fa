#include "spx/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace spx {

namespace {

LogLevel initial_level() {
    const char* env = std::getenv("SPXPIPE_LOG");
    if (!env) return LogLevel::info;
    if (std::strcmp(env, "quiet") == 0 || std::strcmp(env, "0") == 0) return LogLevel::quiet;
    if (std::strcmp(env, "debug") == 0 || std::strcmp(env, "2") == 0) return LogLevel::debug;
    return LogLevel::info;
}

LogLevel g_level = initial_level();

}  // namespace

void set_log_level(LogLevel level) { g_level = level; }

LogLevel log_level() { return g_level; }

void log_info(const std::string& msg) {
    if (g_level >= LogLevel::info) std::fprintf(stderr, "[spx] %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
    if (g_level >= LogLevel::debug) std::fprintf(stderr, "[spx:debug] %s\n", msg.c_str());
}

}  // namespace spx
