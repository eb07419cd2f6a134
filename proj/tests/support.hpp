#pragma once

#include <optional>

#include "svmcs/error.hpp"

namespace testing {

// Error code raised by fn, or nullopt when it returns normally.
template <class F>
std::optional<svmcs::errc> error_code(F&& fn) {
  try {
    fn();
  } catch (const svmcs::error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace testing
