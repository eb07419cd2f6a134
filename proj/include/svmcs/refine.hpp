#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <utility>
#include <vector>

#include "svmcs/criterion.hpp"
#include "svmcs/error.hpp"
#include "svmcs/geometry.hpp"
#include "svmcs/parallel.hpp"
#include "svmcs/sequences.hpp"

namespace svmcs {

// Uniform hash grid with cell side `cell`; radius queries up to `cell` are
// exact by scanning the 3^d surrounding cells.
class SpatialHash {
 public:
  SpatialHash(std::size_t dim, double cell) : dim_(dim), cell_(cell) {
    require(cell > 0.0 && std::isfinite(cell), errc::invalid_argument,
            "hash cell size must be positive");
  }

  void insert(std::size_t id, std::span<const double> p) { cells_[key(p)].push_back(id); }

  // Calls fn(id) for every stored id in the neighbouring cells of p.
  template <class Fn>
  void for_each_candidate(std::span<const double> p, Fn&& fn) const {
    std::vector<std::int64_t> base(dim_), cur(dim_);
    for (std::size_t k = 0; k < dim_; ++k) base[k] = coord(p[k]);
    std::size_t combos = 1;
    for (std::size_t k = 0; k < dim_; ++k) combos *= 3;
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t r = c;
      for (std::size_t k = 0; k < dim_; ++k) {
        cur[k] = base[k] + static_cast<std::int64_t>(r % 3) - 1;
        r /= 3;
      }
      auto it = cells_.find(hash(cur));
      if (it == cells_.end()) continue;
      for (std::size_t id : it->second) fn(id);
    }
  }

 private:
  std::int64_t coord(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }

  std::uint64_t hash(const std::vector<std::int64_t>& c) const {
    std::uint64_t h = 0x2545f4914f6cdd1dull;
    for (auto v : c) h = seq::mix64(h ^ static_cast<std::uint64_t>(v));
    return h;
  }

  std::uint64_t key(std::span<const double> p) const {
    std::vector<std::int64_t> c(dim_);
    for (std::size_t k = 0; k < dim_; ++k) c[k] = coord(p[k]);
    return hash(c);
  }

  std::size_t dim_;
  double cell_;
  // Hash collisions between distinct cells only add candidates; callers
  // always re-check the true distance.
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

// Unordered pairs (i < j) within `radius` whose labels differ, sorted.
inline std::vector<std::pair<std::size_t, std::size_t>> boundary_pairs(const LabeledGrid& data,
                                                                       double radius,
                                                                       std::size_t threads = 1) {
  require(radius > 0.0 && std::isfinite(radius), errc::invalid_argument,
          "radius must be positive");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (data.size() < 2) return out;
  const auto& pts = data.points();
  SpatialHash hash(pts.dim(), radius);
  for (std::size_t i = 0; i < pts.size(); ++i) hash.insert(i, pts[i]);

  const double r2 = radius * radius;
  std::vector<std::vector<std::size_t>> partners(pts.size());
  parallel_for(
      pts.size(),
      [&](std::size_t i) {
        hash.for_each_candidate(pts[i], [&](std::size_t j) {
          if (j > i && data.labels()[j] != data.labels()[i] &&
              squared_distance(pts[i], pts[j]) <= r2)
            partners[i].push_back(j);
        });
        std::sort(partners[i].begin(), partners[i].end());
        partners[i].erase(std::unique(partners[i].begin(), partners[i].end()), partners[i].end());
      },
      threads);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j : partners[i]) out.emplace_back(i, j);
  return out;
}

struct RefineConfig {
  double radius = 0.0;
  std::size_t max_iterations = 5;
  std::size_t point_budget = 100000;  // cap on total output points
  double min_insert_distance = 0.0;   // 0 selects 1e-3 * radius
  std::size_t threads = 1;            // neighbour search workers

  double insert_distance() const {
    return min_insert_distance > 0.0 ? min_insert_distance : 1e-3 * radius;
  }

  void validate() const {
    require(radius > 0.0 && std::isfinite(radius), errc::invalid_argument,
            "refine radius must be positive");
    require(max_iterations >= 1, errc::invalid_argument, "max_iterations must be >= 1");
    require(point_budget >= 1, errc::invalid_argument, "point_budget must be >= 1");
    require(min_insert_distance >= 0.0, errc::invalid_argument,
            "min_insert_distance must be nonnegative");
    require(insert_distance() <= radius, errc::invalid_argument,
            "min_insert_distance must not exceed the radius");
  }
};

struct RefineResult {
  LabeledGrid data;
  bool truncated = false;     // stopped by the point budget
  bool converged = false;     // an iteration inserted nothing
  std::size_t iterations = 0;
  std::size_t inserted = 0;
};

// Throws isolated-point if some point has no other point within radius.
inline void check_no_isolated_points(const PointSet& pts, double radius) {
  if (pts.size() < 2) fail(errc::isolated_point, "a single point has no neighbours");
  SpatialHash hash(pts.dim(), radius);
  for (std::size_t i = 0; i < pts.size(); ++i) hash.insert(i, pts[i]);
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool found = false;
    hash.for_each_candidate(pts[i], [&](std::size_t j) {
      if (!found && j != i && squared_distance(pts[i], pts[j]) <= r2) found = true;
    });
    if (!found)
      fail(errc::isolated_point, "point " + std::to_string(i) + " has no neighbour within radius");
  }
}

// Inserts labeled midpoints between nearby opposite-label points. New points
// take part in neighbour search from the next iteration on.
template <Criterion C>
RefineResult refine(const LabeledGrid& data, const C& criterion, const RefineConfig& config) {
  config.validate();
  check_no_isolated_points(data.points(), config.radius);
  if (!data.both_classes()) {
    RefineResult res;
    res.data = data;
    res.converged = true;
    return res;
  }

  PointSet pts = data.points();
  std::vector<Label> labels = data.labels();
  const double min_d = config.insert_distance();
  const double min_d2 = min_d * min_d;
  SpatialHash occupied(pts.dim(), config.radius);
  for (std::size_t i = 0; i < pts.size(); ++i) occupied.insert(i, pts[i]);

  RefineResult res;
  if (pts.size() >= config.point_budget) {
    res.truncated = true;
    res.data = data;
    return res;
  }

  point mid(pts.dim());
  for (std::size_t iter = 0; iter < config.max_iterations && !res.truncated; ++iter) {
    const LabeledGrid snapshot(pts, labels);
    const auto pairs = boundary_pairs(snapshot, config.radius, config.threads);
    ++res.iterations;
    std::size_t added = 0;
    for (const auto& [i, j] : pairs) {
      for (std::size_t k = 0; k < pts.dim(); ++k) mid[k] = 0.5 * (pts[i][k] + pts[j][k]);
      bool too_close = false;
      occupied.for_each_candidate(mid, [&](std::size_t id) {
        if (!too_close && squared_distance(mid, pts[id]) <= min_d2) too_close = true;
      });
      if (too_close) continue;
      if (pts.size() >= config.point_budget) {
        res.truncated = true;
        break;
      }
      labels.push_back(label(criterion, mid));
      pts.push_back(mid);
      occupied.insert(pts.size() - 1, pts[pts.size() - 1]);
      ++added;
    }
    res.inserted += added;
    if (added == 0 && !res.truncated) {
      res.converged = true;
      break;
    }
  }
  res.data = LabeledGrid(std::move(pts), std::move(labels));
  return res;
}

}  // namespace svmcs
