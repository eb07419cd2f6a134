#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace svmcs {

enum class errc {
  invalid_argument,
  unsupported_dimension,
  duplicate_point,
  degenerate_box,
  numerical_conditioning,
  solver_failure,
  degenerate_training,
  empty_interval,
  isolated_point,
  singular_design,
  format_error,
};

inline const char* to_string(errc code) {
  switch (code) {
    case errc::invalid_argument: return "invalid-argument";
    case errc::unsupported_dimension: return "unsupported-dimension";
    case errc::duplicate_point: return "duplicate-point";
    case errc::degenerate_box: return "degenerate-box";
    case errc::numerical_conditioning: return "numerical-conditioning";
    case errc::solver_failure: return "solver-failure";
    case errc::degenerate_training: return "degenerate-training";
    case errc::empty_interval: return "empty-interval";
    case errc::isolated_point: return "isolated-point";
    case errc::singular_design: return "singular-design";
    case errc::format_error: return "format-error";
  }
  return "unknown";
}

// All library failures are reported through this one type; code() tells
// callers which contract was broken.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

// Raised by label_grid when a single point evaluation fails.
class point_error : public error {
 public:
  point_error(errc code, std::size_t index, const std::string& what)
      : error(code, "point " + std::to_string(index) + ": " + what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

inline void require(bool cond, errc code, const char* what) {
  if (!cond) fail(code, what);
}

}  // namespace svmcs
