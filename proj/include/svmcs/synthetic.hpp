#pragma once

// Two-component planar test region: a disc, plus an ellipse with two
// diamond-shaped holes. Membership is expressed through a level function
// g(theta) that is negative exactly inside the region.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "svmcs/error.hpp"
#include "svmcs/geometry.hpp"

namespace svmcs {

struct SyntheticRegion {
  struct Circle {
    double cx, cy, r;
  };
  struct Ellipse {
    double cx, cy, a, b;
  };
  struct Diamond {
    double cx, cy, hx, hy;  // half-diagonals along x and y
  };

  Circle circle{2.5, 7.0, 1.5};
  Ellipse ellipse{6.5, 3.5, 2.8, 1.8};
  std::array<Diamond, 2> diamonds{{{5.4, 3.5, 0.6, 0.8}, {7.6, 3.5, 0.6, 0.8}}};

  // Sampling domain used by the synthetic experiment.
  static Box domain() { return {{0.0, 0.0}, {10.0, 10.0}}; }

  static double circle_level(const Circle& c, double x, double y) {
    const double dx = x - c.cx, dy = y - c.cy;
    return (dx * dx + dy * dy) / (c.r * c.r) - 1.0;
  }
  static double ellipse_level(const Ellipse& e, double x, double y) {
    const double u = (x - e.cx) / e.a, v = (y - e.cy) / e.b;
    return u * u + v * v - 1.0;
  }
  static double diamond_level(const Diamond& d, double x, double y) {
    return std::abs(x - d.cx) / d.hx + std::abs(y - d.cy) / d.hy - 1.0;
  }

  // Level of the ellipse-minus-diamonds component alone.
  double holed_ellipse_level(double x, double y) const {
    double g = ellipse_level(ellipse, x, y);
    for (const auto& d : diamonds) g = std::max(g, -diamond_level(d, x, y));
    return g;
  }

  double level(double x, double y) const {
    return std::min(circle_level(circle, x, y), holed_ellipse_level(x, y));
  }

  bool contains(double x, double y) const { return level(x, y) < 0.0; }

  // Which connected component a point belongs to: 0 = disc, 1 = holed
  // ellipse, -1 = outside.
  int component(double x, double y) const {
    if (circle_level(circle, x, y) < 0.0) return 0;
    if (holed_ellipse_level(x, y) < 0.0) return 1;
    return -1;
  }

  // Dense samples of the region boundary: points on the component curves
  // where the composite level is zero.
  std::vector<point> boundary_samples(std::size_t per_curve = 20000) const {
    std::vector<point> out;
    auto keep = [&](double x, double y) {
      if (std::abs(level(x, y)) <= 1e-9) out.push_back({x, y});
    };
    for (std::size_t i = 0; i < per_curve; ++i) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / per_curve;
      keep(circle.cx + circle.r * std::cos(t), circle.cy + circle.r * std::sin(t));
      keep(ellipse.cx + ellipse.a * std::cos(t), ellipse.cy + ellipse.b * std::sin(t));
      for (const auto& d : diamonds) {
        // Perimeter parameterized by arc fraction over the four edges.
        const double s = 4.0 * static_cast<double>(i) / per_curve;
        const int edge = static_cast<int>(s);
        const double f = s - edge;
        const double sx[] = {1, 0, -1, 0, 1};
        const double sy[] = {0, 1, 0, -1, 0};
        const double x = d.cx + d.hx * (sx[edge] + f * (sx[edge + 1] - sx[edge]));
        const double y = d.cy + d.hy * (sy[edge] + f * (sy[edge + 1] - sy[edge]));
        keep(x, y);
      }
    }
    return out;
  }

  double diameter() const {
    const auto pts = boundary_samples(720);
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        best = std::max(best, distance(pts[i], pts[j]));
    return best;
  }

  // Copy with every geometric parameter shifted by scale * N(0,1).
  SyntheticRegion perturbed(double scale, std::uint64_t seed) const {
    SyntheticRegion r = *this;
    if (scale == 0.0) return r;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    auto jitter = [&](double& v, bool positive) {
      const double orig = v;
      v += scale * z(rng);
      if (positive) v = std::max(v, 0.1 * orig);
    };
    jitter(r.circle.cx, false);
    jitter(r.circle.cy, false);
    jitter(r.circle.r, true);
    jitter(r.ellipse.cx, false);
    jitter(r.ellipse.cy, false);
    jitter(r.ellipse.a, true);
    jitter(r.ellipse.b, true);
    for (auto& d : r.diamonds) {
      jitter(d.cx, false);
      jitter(d.cy, false);
      jitter(d.hx, true);
      jitter(d.hy, true);
    }
    return r;
  }
};

// Distance from points to a sampled boundary, by brute force over samples.
class BoundaryDistance {
 public:
  explicit BoundaryDistance(std::vector<point> samples) : samples_(std::move(samples)) {
    require(!samples_.empty(), errc::invalid_argument, "boundary has no samples");
  }
  double operator()(std::span<const double> p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : samples_) best = std::min(best, squared_distance(p, s));
    return std::sqrt(best);
  }

 private:
  std::vector<point> samples_;
};

// Labels points by a noisy estimate of the true region; the noise scale is
// c / sqrt(n) with c = 0.2 * region diameter, so it vanishes as n grows.
class SyntheticCriterion {
 public:
  SyntheticCriterion(SyntheticRegion truth, double noise_scale, std::uint64_t seed)
      : truth_(truth), estimate_(truth.perturbed(noise_scale, seed)), noise_scale_(noise_scale) {
    require(noise_scale >= 0.0, errc::invalid_argument, "noise scale must be nonnegative");
  }

  static double noise_scale_for(const SyntheticRegion& truth, double n) {
    require(n >= 1.0, errc::invalid_argument, "sample size must be >= 1");
    return 0.2 * truth.diameter() / std::sqrt(n);
  }

  double statistic(std::span<const double> theta) const {
    return estimate_.level(theta[0], theta[1]);
  }
  double threshold() const noexcept { return 0.0; }
  std::size_t dim() const noexcept { return 2; }

  bool truly_inside(std::span<const double> theta) const {
    return truth_.contains(theta[0], theta[1]);
  }

  const SyntheticRegion& truth() const noexcept { return truth_; }
  const SyntheticRegion& estimate() const noexcept { return estimate_; }
  double noise_scale() const noexcept { return noise_scale_; }

 private:
  SyntheticRegion truth_;
  SyntheticRegion estimate_;
  double noise_scale_;
};

}  // namespace svmcs
