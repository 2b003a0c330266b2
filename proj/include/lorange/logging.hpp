#pragma once

#include <cstdlib>
#include <iostream>
#include <string>

namespace lorange {

// Verbosity comes only from the LORANGE_LOG environment variable:
// "quiet" silences info and warnings, "debug" enables debug lines.
inline int log_level() {
  static const int level = [] {
    const char* env = std::getenv("LORANGE_LOG");
    if (!env) return 1;
    const std::string v(env);
    if (v == "quiet") return 0;
    if (v == "debug") return 2;
    return 1;
  }();
  return level;
}

inline void log_info(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[info] " << msg << '\n';
}

inline void log_warn(const std::string& msg) {
  if (log_level() >= 1) std::cerr << "[warn] " << msg << '\n';
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::cerr << "[debug] " << msg << '\n';
}

}  // namespace lorange
