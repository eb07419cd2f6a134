#pragma once

#include <cmath>
#include <span>
#include <string>

#include "svmcs/error.hpp"
#include "svmcs/geometry.hpp"

namespace svmcs {

// exp(-x) underflows to zero in double beyond this.
inline constexpr double exp_underflow = 745.2;

// Gaussian kernel exp(-||u - v||^2 / (2 sigma^2)).
struct RbfKernel {
  double sigma2 = 1.0;

  explicit RbfKernel(double s2) : sigma2(s2) {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
      fail(errc::invalid_argument, "RBF sigma^2 must be positive and finite");
  }

  double inv_two_sigma2() const noexcept { return 0.5 / sigma2; }

  double from_squared_distance(double d2) const noexcept {
    const double x = d2 * inv_two_sigma2();
    return x > exp_underflow ? 0.0 : std::exp(-x);
  }

  double operator()(std::span<const double> u, std::span<const double> v) const {
    return from_squared_distance(squared_distance(u, v));
  }

  static constexpr const char* name() { return "rbf"; }
};

inline double rbf_kernel(std::span<const double> u, std::span<const double> v, double sigma2) {
  require(u.size() == v.size(), errc::invalid_argument, "kernel arguments differ in dimension");
  return RbfKernel(sigma2)(u, v);
}

// (u.v + 1)^degree. Kept for comparison runs; the pipeline uses RbfKernel.
struct PolynomialKernel {
  int degree = 2;

  explicit PolynomialKernel(int deg) : degree(deg) {
    require(degree >= 1, errc::invalid_argument, "polynomial degree must be >= 1");
  }

  double operator()(std::span<const double> u, std::span<const double> v) const {
    double dot = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) dot += u[k] * v[k];
    return std::pow(dot + 1.0, degree);
  }

  static constexpr const char* name() { return "polynomial"; }
};

template <class K>
concept Kernel = requires(const K& k, std::span<const double> u) {
  { k(u, u) } -> std::convertible_to<double>;
};

}  // namespace svmcs
