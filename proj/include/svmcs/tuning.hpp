#pragma once

// Tuning rules for the RBF classifier.
//
// Perfect-fit regime: with C above l0/(l0+l1) and sigma far below the
// smallest inter-point distance, the trained classifier reproduces every
// training label.
//
// Dominance bounds: for a point theta inside the set, the simplified
// decision sign(sum y_i K(s_i, theta)) is +1 whenever the nearest interior
// point outweighs all exterior points at once, which holds for
//   0 < 2 sigma^2 < (||E - theta||^2 - ||I - theta||^2) / ln |S_exterior|
// and symmetrically, with roles swapped, for points outside the set.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "svmcs/criterion.hpp"
#include "svmcs/error.hpp"
#include "svmcs/grid.hpp"
#include "svmcs/log.hpp"
#include "svmcs/svm.hpp"

namespace svmcs {

// l0 > l1 + 1 > 2
inline bool class_balance_assumption_holds(std::size_t l0, std::size_t l1) {
  return l0 > l1 + 1 && l1 + 1 > 2;
}

inline double c_lower_bound(std::size_t l0, std::size_t l1) {
  require(l0 >= 1 && l1 >= 1, errc::invalid_argument, "both class counts must be >= 1");
  if (!class_balance_assumption_holds(l0, l1))
    warn("class counts l0=" + std::to_string(l0) + ", l1=" + std::to_string(l1) +
         " violate l0 > l1 + 1 > 2");
  return static_cast<double>(l0) / static_cast<double>(l0 + l1);
}

inline constexpr double auto_sigma_fraction = 0.1;
inline constexpr double auto_c_floor = 10.0;

// sigma = 0.1 * min pairwise distance, C = max(10, 2 * l0/(l0+l1)).
inline KernelParams auto_sigma(const LabeledGrid& data) {
  require(data.size() >= 2, errc::invalid_argument, "auto_sigma needs at least two points");
  if (!data.both_classes())
    fail(errc::degenerate_training, "auto_sigma needs both labels present");
  const double sigma = auto_sigma_fraction * min_pairwise_distance(data.points());
  const double c = std::max(auto_c_floor, 2.0 * c_lower_bound(data.l0(), data.l1()));
  return {sigma * sigma, c};
}

// sigma = factor * (vol(box)/n)^(1/d); a bandwidth tied to grid density.
inline KernelParams spacing_sigma(const Box& box, std::size_t n, double factor, double c) {
  require(factor > 0.0, errc::invalid_argument, "spacing factor must be positive");
  const double sigma = factor * typical_spacing(box, n);
  KernelParams p{sigma * sigma, c};
  p.validate();
  return p;
}

struct NearestPair {
  double interior_dist = 0.0;  // to the closest +1 point
  double exterior_dist = 0.0;  // to the closest -1 point
  std::size_t n_interior = 0;
  std::size_t n_exterior = 0;
};

inline NearestPair nearest_pair(std::span<const double> theta, const LabeledGrid& data) {
  if (!data.both_classes()) fail(errc::degenerate_training, "nearest_pair needs both labels");
  require(theta.size() == data.dim(), errc::invalid_argument, "theta dimension mismatch");
  double best_in = std::numeric_limits<double>::infinity();
  double best_out = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double d2 = squared_distance(theta, data.points()[i]);
    if (data.labels()[i] == Label::inside)
      best_in = std::min(best_in, d2);
    else
      best_out = std::min(best_out, d2);
  }
  return {std::sqrt(best_in), std::sqrt(best_out), data.l1(), data.l0()};
}

enum class BoundSource { interior, exterior };

struct SigmaBound {
  double upper_2sigma2 = std::numeric_limits<double>::infinity();  // strict upper bound on 2 sigma^2
  BoundSource source = BoundSource::interior;

  bool unbounded() const noexcept { return std::isinf(upper_2sigma2); }
};

namespace detail {

inline SigmaBound dominance_bound(double near, double far, std::size_t n_far, BoundSource src) {
  require(n_far >= 1, errc::invalid_argument, "opposite class must be nonempty");
  const double gap = far * far - near * near;
  if (!(gap > 0.0))
    fail(errc::empty_interval, "nearest opposite-label point is not farther than the nearest "
                               "same-label point; no sigma achieves dominance");
  if (n_far == 1) return {std::numeric_limits<double>::infinity(), src};
  return {gap / std::log(static_cast<double>(n_far)), src};
}

}  // namespace detail

// Bound for a point believed inside: its nearest +1 neighbour must dominate
// every -1 point.
inline SigmaBound sigma_bound_interior(const NearestPair& pair) {
  return detail::dominance_bound(pair.interior_dist, pair.exterior_dist, pair.n_exterior,
                                 BoundSource::interior);
}

// Bound for a point believed outside: roles of the classes swapped.
inline SigmaBound sigma_bound_exterior(const NearestPair& pair) {
  return detail::dominance_bound(pair.exterior_dist, pair.interior_dist, pair.n_interior,
                                 BoundSource::exterior);
}

// Error raised when one probe admits no bandwidth.
class probe_error : public error {
 public:
  probe_error(std::size_t probe, const std::string& what)
      : error(errc::empty_interval, "probe " + std::to_string(probe) + ": " + what),
        probe_(probe) {}
  std::size_t probe() const noexcept { return probe_; }

 private:
  std::size_t probe_;
};

inline constexpr double admissible_safety_factor = 0.5;

// sigma^2 such that the simplified decision labels every probe with its
// known label: the intersection (minimum) of the per-probe bounds on
// 2 sigma^2, halved. Returns +inf when no probe constrains sigma.
inline double admissible_sigma2(const LabeledGrid& data, const PointSet& probes,
                                std::span<const Label> probe_labels) {
  require(!probes.empty(), errc::invalid_argument, "need at least one probe");
  require(probes.size() == probe_labels.size(), errc::invalid_argument,
          "probe labels do not match probes");
  if (!data.both_classes()) fail(errc::degenerate_training, "grid must contain both labels");
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const NearestPair pair = nearest_pair(probes[i], data);
    try {
      const SigmaBound b = probe_labels[i] == Label::inside ? sigma_bound_interior(pair)
                                                            : sigma_bound_exterior(pair);
      bound = std::min(bound, b.upper_2sigma2);
    } catch (const error& e) {
      throw probe_error(i, e.what());
    }
  }
  return 0.5 * admissible_safety_factor * bound;
}

// Probes default to the labeled grid itself.
inline double admissible_sigma2(const LabeledGrid& data) {
  return admissible_sigma2(data, data.points(), data.labels());
}

}  // namespace svmcs
