#pragma once

#include <functional>
#include <iostream>
#include <string_view>

namespace svmcs {

using WarningHandler = std::function<void(std::string_view)>;

inline WarningHandler& warning_handler() {
  static WarningHandler handler = [](std::string_view msg) {
    std::clog << "svmcs warning: " << msg << '\n';
  };
  return handler;
}

// Returns the previous handler.
inline WarningHandler set_warning_handler(WarningHandler h) {
  WarningHandler old = std::move(warning_handler());
  warning_handler() = std::move(h);
  return old;
}

inline void warn(std::string_view msg) {
  if (warning_handler()) warning_handler()(msg);
}

}  // namespace svmcs
