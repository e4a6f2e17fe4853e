#pragma once
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace wagner {

/// Log level from WAGNER_LOG in {error, warn, info, debug}; default warn.
enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("WAGNER_LOG");
        if (!env) return LogLevel::Warn;
        if (std::strcmp(env, "error") == 0) return LogLevel::Error;
        if (std::strcmp(env, "info") == 0) return LogLevel::Info;
        if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
        return LogLevel::Warn;
    }();
    return level;
}

template <class... Args>
void log(LogLevel level, const char* format, Args... args) {
    if (level > log_level()) return;
    const char* tag = level == LogLevel::Error  ? "error"
                      : level == LogLevel::Warn ? "warn"
                      : level == LogLevel::Info ? "info"
                                                : "debug";
    std::fprintf(stderr, "[wagner:%s] ", tag);
    std::fprintf(stderr, format, args...);
    std::fputc('\n', stderr);
}

}  // namespace wagner
