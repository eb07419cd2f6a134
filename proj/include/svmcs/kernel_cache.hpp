#pragma once

#include <cstddef>
#include <list>
#include <vector>

#include "svmcs/geometry.hpp"
#include "svmcs/kernel.hpp"

namespace svmcs {

// LRU cache of full Gram-matrix rows K(x_i, .).
template <Kernel K>
class KernelRowCache {
 public:
  KernelRowCache(const PointSet& pts, K kernel, std::size_t budget_bytes)
      : pts_(pts), kernel_(kernel), slot_(pts.size(), lru_.end()) {
    const std::size_t row_bytes = std::max<std::size_t>(1, pts.size() * sizeof(double));
    capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
    diag_.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) diag_[i] = kernel_(pts[i], pts[i]);
  }

  double diag(std::size_t i) const { return diag_[i]; }

  // The returned row stays valid until evicted; with capacity >= 2 the most
  // recently returned row always survives one further call.
  const std::vector<double>& row(std::size_t i) {
    auto it = slot_[i];
    if (it != lru_.end()) {
      lru_.splice(lru_.begin(), lru_, it);
      ++hits_;
      return it->values;
    }
    ++misses_;
    if (lru_.size() >= capacity_) {
      auto& victim = lru_.back();
      slot_[victim.index] = lru_.end();
      victim.index = i;
      lru_.splice(lru_.begin(), lru_, std::prev(lru_.end()));
    } else {
      lru_.push_front(Entry{i, std::vector<double>(pts_.size())});
    }
    slot_[i] = lru_.begin();
    fill(i, lru_.front().values);
    return lru_.front().values;
  }

  std::size_t hits() const noexcept { return hits_; }
  std::size_t misses() const noexcept { return misses_; }
  std::size_t capacity_rows() const noexcept { return capacity_; }

 private:
  struct Entry {
    std::size_t index;
    std::vector<double> values;
  };

  void fill(std::size_t i, std::vector<double>& out) const {
    const auto xi = pts_[i];
    for (std::size_t t = 0; t < pts_.size(); ++t) out[t] = kernel_(xi, pts_[t]);
  }

  const PointSet& pts_;
  K kernel_;
  std::list<Entry> lru_;
  std::vector<typename std::list<Entry>::iterator> slot_;
  std::vector<double> diag_;
  std::size_t capacity_ = 0;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

}  // namespace svmcs
