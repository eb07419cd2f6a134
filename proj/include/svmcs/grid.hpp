#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>

#include "svmcs/error.hpp"
#include "svmcs/geometry.hpp"
#include "svmcs/sequences.hpp"

namespace svmcs {

enum class SequenceType { monte_carlo, sobol, weyl, baker };

struct SequenceKind {
  SequenceType type = SequenceType::sobol;
  std::uint64_t seed = 0;  // only meaningful for monte_carlo

  static SequenceKind monte_carlo(std::uint64_t seed) { return {SequenceType::monte_carlo, seed}; }
  static SequenceKind sobol() { return {SequenceType::sobol, 0}; }
  static SequenceKind weyl() { return {SequenceType::weyl, 0}; }
  static SequenceKind baker() { return {SequenceType::baker, 0}; }

  bool stochastic() const noexcept { return type == SequenceType::monte_carlo; }

  friend bool operator==(const SequenceKind& a, const SequenceKind& b) {
    return a.type == b.type && (a.type != SequenceType::monte_carlo || a.seed == b.seed);
  }
};

inline std::string to_string(SequenceKind kind) {
  switch (kind.type) {
    case SequenceType::monte_carlo: return "montecarlo:" + std::to_string(kind.seed);
    case SequenceType::sobol: return "sobol";
    case SequenceType::weyl: return "weyl";
    case SequenceType::baker: return "baker";
  }
  return "unknown";
}

// Accepts "sobol", "weyl", "baker", "montecarlo" or "montecarlo:<seed>".
inline SequenceKind parse_sequence_kind(std::string_view text, std::uint64_t default_seed = 0) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "sobol") return SequenceKind::sobol();
  if (s == "weyl") return SequenceKind::weyl();
  if (s == "baker") return SequenceKind::baker();
  if (s == "montecarlo" || s == "mc") return SequenceKind::monte_carlo(default_seed);
  for (std::string_view prefix : {"montecarlo:", "mc:"}) {
    if (s.starts_with(prefix)) {
      try {
        return SequenceKind::monte_carlo(std::stoull(s.substr(prefix.size())));
      } catch (const std::exception&) {
        fail(errc::invalid_argument, "bad Monte Carlo seed in '" + std::string(text) + "'");
      }
    }
  }
  fail(errc::invalid_argument, "unknown sequence kind '" + std::string(text) + "'");
}

// Unit-cube coordinate of term n >= 1.
inline double sequence_term(SequenceKind kind, std::uint64_t n, std::size_t coord) {
  switch (kind.type) {
    case SequenceType::monte_carlo: return seq::monte_carlo(kind.seed, n, coord);
    case SequenceType::sobol: return seq::sobol(n, coord);
    case SequenceType::weyl: return seq::weyl(n, coord);
    case SequenceType::baker: return seq::baker(n, coord);
  }
  return 0.0;
}

inline std::size_t max_dimension(SequenceKind kind) {
  switch (kind.type) {
    case SequenceType::sobol: return seq::max_sobol_dim;
    case SequenceType::weyl: return seq::max_weyl_dim;
    default: return std::numeric_limits<std::size_t>::max();
  }
}

// First `count` terms of an equidistributed sequence mapped into a box.
class Grid {
 public:
  Grid(Box box, SequenceKind kind, PointSet points)
      : box_(std::move(box)), kind_(kind), points_(std::move(points)) {}

  const Box& box() const noexcept { return box_; }
  SequenceKind kind() const noexcept { return kind_; }
  const PointSet& points() const noexcept { return points_; }
  std::size_t count() const noexcept { return points_.size(); }
  std::size_t dim() const noexcept { return box_.dim(); }

 private:
  Box box_;
  SequenceKind kind_;
  PointSet points_;
};

namespace detail {

inline void append_terms(PointSet& pts, const Box& box, SequenceKind kind, std::size_t from,
                         std::size_t to) {
  const std::size_t d = box.dim();
  point p(d);
  pts.reserve(to);
  for (std::size_t i = from; i < to; ++i) {
    for (std::size_t k = 0; k < d; ++k) p[k] = box.map(k, sequence_term(kind, i + 1, k));
    pts.push_back(p);
  }
}

}  // namespace detail

inline Grid generate(SequenceKind kind, const Box& box, std::size_t count) {
  require(count >= 1, errc::invalid_argument, "grid count must be >= 1");
  if (box.dim() > max_dimension(kind))
    fail(errc::unsupported_dimension, "dimension " + std::to_string(box.dim()) +
                                          " exceeds the limit for " + to_string(kind));
  PointSet pts(box.dim());
  detail::append_terms(pts, box, kind, 0, count);
  return {box, kind, std::move(pts)};
}

// Longer prefix of the same sequence; the existing points are kept as-is.
inline Grid extend(const Grid& grid, std::size_t new_count) {
  require(new_count >= grid.count(), errc::invalid_argument,
          "extend cannot shrink a grid");
  PointSet pts = grid.points();
  detail::append_terms(pts, grid.box(), grid.kind(), grid.count(), new_count);
  return {grid.box(), grid.kind(), std::move(pts)};
}

inline double equidistribution_fraction(const Grid& grid, const Box& subbox) {
  require(grid.box().contains(subbox), errc::invalid_argument,
          "sub-box is not contained in the grid box");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < grid.count(); ++i) hits += subbox.contains(grid.points()[i]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(grid.count());
}

// Exact minimum over all pairs using a sweep along coordinate 0.
inline double min_pairwise_distance(const PointSet& pts) {
  require(pts.size() >= 2, errc::invalid_argument, "need at least two points");
  std::vector<std::size_t> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pts[a][0] < pts[b][0];
  });
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < order.size(); ++a) {
    const auto p = pts[order[a]];
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const auto q = pts[order[b]];
      const double dx = q[0] - p[0];
      if (dx * dx >= best) break;
      const double d2 = squared_distance(p, q);
      if (d2 == 0.0)
        fail(errc::duplicate_point, "points " + std::to_string(std::min(order[a], order[b])) +
                                        " and " + std::to_string(std::max(order[a], order[b])) +
                                        " are identical");
      best = std::min(best, d2);
    }
  }
  return std::sqrt(best);
}

inline Box smallest_enclosing_box(const PointSet& pts) {
  require(!pts.empty(), errc::invalid_argument, "cannot bound an empty point set");
  const std::size_t d = pts.dim();
  point lo(pts[0].begin(), pts[0].end());
  point hi = lo;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], pts[i][k]);
      hi[k] = std::max(hi[k], pts[i][k]);
    }
  }
  for (std::size_t k = 0; k < d; ++k)
    if (!(lo[k] < hi[k]))
      fail(errc::degenerate_box, "points share coordinate " + std::to_string(k));
  return {std::move(lo), std::move(hi)};
}

// Typical spacing of n points spread over a box: (vol / n)^(1/d).
inline double typical_spacing(const Box& box, std::size_t n) {
  require(n >= 1, errc::invalid_argument, "spacing needs n >= 1");
  return std::pow(box.volume() / static_cast<double>(n), 1.0 / static_cast<double>(box.dim()));
}

}  // namespace svmcs
