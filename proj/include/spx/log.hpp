#pragma once

#include <string>

namespace spx {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

// Level comes from the SPXPIPE_LOG environment variable
// (quiet|info|debug, default info) unless overridden.
void set_log_level(LogLevel level);
LogLevel log_level();

void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace spx
