#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "svmcs/error.hpp"

namespace svmcs {

using point = std::vector<double>;

inline double squared_distance(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double diff = u[k] - v[k];
    s += diff * diff;
  }
  return s;
}

inline double distance(std::span<const double> u, std::span<const double> v) {
  return std::sqrt(squared_distance(u, v));
}

// Row-major list of d-dimensional points.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {
    require(dim >= 1, errc::invalid_argument, "point dimension must be >= 1");
  }
  PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
    require(dim >= 1, errc::invalid_argument, "point dimension must be >= 1");
    require(coords_.size() % dim == 0, errc::invalid_argument,
            "coordinate count is not a multiple of the dimension");
  }
  PointSet(std::initializer_list<point> pts) {
    for (const auto& p : pts) push_back(p);
  }
  static PointSet from_points(const std::vector<point>& pts) {
    PointSet out;
    for (const auto& p : pts) out.push_back(p);
    return out;
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const noexcept { return size() == 0; }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  std::span<double> operator[](std::size_t i) { return {coords_.data() + i * dim_, dim_}; }

  void push_back(std::span<const double> p) {
    if (dim_ == 0) {
      require(!p.empty(), errc::invalid_argument, "point dimension must be >= 1");
      dim_ = p.size();
    }
    require(p.size() == dim_, errc::invalid_argument, "point dimension mismatch");
    coords_.insert(coords_.end(), p.begin(), p.end());
  }
  void push_back(const point& p) { push_back(std::span<const double>(p)); }

  void reserve(std::size_t n) { coords_.reserve(n * dim_); }
  void truncate(std::size_t n) {
    if (n < size()) coords_.resize(n * dim_);
  }

  point at(std::size_t i) const {
    auto p = (*this)[i];
    return {p.begin(), p.end()};
  }

  const std::vector<double>& coords() const noexcept { return coords_; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

// Axis-aligned box prod [lower_i, upper_i] with lower_i < upper_i.
class Box {
 public:
  Box(point lower, point upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    require(!lower_.empty(), errc::invalid_argument, "box dimension must be >= 1");
    require(lower_.size() == upper_.size(), errc::invalid_argument,
            "box bounds have different dimensions");
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i]))
        fail(errc::invalid_argument, "box bounds must be finite");
      if (!(lower_[i] < upper_[i]))
        fail(errc::degenerate_box, "box side " + std::to_string(i) + " has lower >= upper");
    }
  }

  static Box unit(std::size_t dim) { return {point(dim, 0.0), point(dim, 1.0)}; }

  std::size_t dim() const noexcept { return lower_.size(); }
  const point& lower() const noexcept { return lower_; }
  const point& upper() const noexcept { return upper_; }
  double width(std::size_t i) const { return upper_[i] - lower_[i]; }

  double volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < dim(); ++i) v *= width(i);
    return v;
  }

  double diameter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += width(i) * width(i);
    return std::sqrt(s);
  }

  bool contains(std::span<const double> p) const {
    if (p.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
      if (p[i] < lower_[i] || p[i] > upper_[i]) return false;
    return true;
  }

  bool contains(const Box& other) const {
    if (other.dim() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
      if (other.lower_[i] < lower_[i] || other.upper_[i] > upper_[i]) return false;
    return true;
  }

  // Affine image of a unit-cube coordinate in dimension i.
  double map(std::size_t i, double u) const {
    const double v = lower_[i] + u * width(i);
    return std::clamp(v, lower_[i], upper_[i]);
  }

  friend bool operator==(const Box&, const Box&) = default;

 private:
  point lower_;
  point upper_;
};

}  // namespace svmcs
