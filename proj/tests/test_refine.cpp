#include <catch_amalgamated.hpp>

#include <random>

#include "oracles.hpp"
#include "support.hpp"
#include "svmcs/refine.hpp"

using namespace svmcs;
using testing::error_code;

namespace {

struct Cut {
  double at;
  double statistic(std::span<const double> t) const { return t[0]; }
  double threshold() const { return at; }
  std::size_t dim() const { return 1; }
};

struct Disc {
  double r;
  double statistic(std::span<const double> t) const { return t[0] * t[0] + t[1] * t[1]; }
  double threshold() const { return r * r; }
  std::size_t dim() const { return 2; }
};

bool is_midpoint_of_some_pair(std::span<const double> p, const LabeledGrid& before, double radius) {
  for (const auto& [i, j] : oracle::boundary_pairs_bruteforce(before, radius)) {
    bool same = true;
    for (std::size_t k = 0; k < p.size(); ++k)
      same = same && p[k] == 0.5 * (before.points()[i][k] + before.points()[j][k]);
    if (same) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("boundary pairs", "[refine]") {
  const LabeledGrid same(PointSet{{0.0}, {0.5}, {1.0}}, {Label::inside, Label::inside, Label::inside});
  CHECK(boundary_pairs(same, 2.0).empty());
  const LabeledGrid far(PointSet{{0.0}, {3.0}}, {Label::inside, Label::outside});
  CHECK(boundary_pairs(far, 2.0).empty());
  CHECK(boundary_pairs(far, 3.0).size() == 1);
  CHECK(error_code([&] { boundary_pairs(far, 0.0); }) == errc::invalid_argument);
}

TEST_CASE("boundary pairs match a brute-force scan", "[refine]") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t d = 1; d <= 3; ++d) {
    for (int t = 0; t < 5; ++t) {
      PointSet pts(d);
      std::vector<Label> lab;
      for (int i = 0; i < 400; ++i) {
        point p(d);
        for (auto& v : p) v = u(rng);
        pts.push_back(p);
        lab.push_back(u(rng) > 0.0 ? Label::inside : Label::outside);
      }
      const LabeledGrid data(pts, lab);
      const double radius = 0.05 + 0.1 * t;
      CHECK(boundary_pairs(data, radius) == oracle::boundary_pairs_bruteforce(data, radius));
      CHECK(boundary_pairs(data, radius, 4) == boundary_pairs(data, radius, 1));
    }
  }
}

TEST_CASE("refine inserts a labeled midpoint", "[refine]") {
  const LabeledGrid data(PointSet{{0.0}, {1.0}}, {Label::inside, Label::outside});
  RefineConfig cfg;
  cfg.radius = 1.5;
  cfg.max_iterations = 1;
  const auto r = refine(data, Cut{0.7}, cfg);
  REQUIRE(r.data.size() == 3);
  CHECK(r.data.points()[2][0] == 0.5);
  CHECK(r.data.labels()[2] == Label::inside);
  CHECK(r.inserted == 1);
  CHECK_FALSE(r.truncated);
}

TEST_CASE("refine leaves homogeneous grids unchanged", "[refine]") {
  const LabeledGrid data(PointSet{{0.0}, {1.0}, {2.0}}, {Label::outside, Label::outside, Label::outside});
  RefineConfig cfg;
  cfg.radius = 1.5;
  const auto r = refine(data, Cut{-5.0}, cfg);
  CHECK(r.data.points() == data.points());
  CHECK(r.data.labels() == data.labels());
  CHECK(r.inserted == 0);
}

TEST_CASE("refine with no spare budget is flagged truncated", "[refine]") {
  const LabeledGrid data(PointSet{{0.0}, {1.0}}, {Label::inside, Label::outside});
  RefineConfig cfg;
  cfg.radius = 1.5;
  cfg.point_budget = 2;
  const auto r = refine(data, Cut{0.7}, cfg);
  CHECK(r.truncated);
  CHECK(r.data.size() == 2);
  CHECK(r.data.points() == data.points());
}

TEST_CASE("refine rejects isolated points and bad configs", "[refine]") {
  const LabeledGrid data(PointSet{{0.0}, {1.0}, {5.0}}, {Label::inside, Label::outside, Label::outside});
  RefineConfig cfg;
  cfg.radius = 1.5;
  CHECK(error_code([&] { refine(data, Cut{0.7}, cfg); }) == errc::isolated_point);
  cfg.radius = 0.0;
  CHECK(error_code([&] { refine(data, Cut{0.7}, cfg); }) == errc::invalid_argument);
  cfg.radius = 5.0;
  cfg.min_insert_distance = 6.0;
  CHECK(error_code([&] { refine(data, Cut{0.7}, cfg); }) == errc::invalid_argument);
}

TEST_CASE("refine invariants on a disc", "[refine]") {
  const auto g = generate(SequenceKind::sobol(), Box({-1.0, -1.0}, {1.0, 1.0}), 400);
  const Disc disc{0.6};
  const auto data = label_grid(disc, g);
  RefineConfig cfg;
  cfg.radius = 0.25;
  cfg.max_iterations = 3;
  cfg.point_budget = 5000;
  const auto r = refine(data, disc, cfg);

  REQUIRE(r.data.size() >= data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    REQUIRE(r.data.labels()[i] == data.labels()[i]);
    for (std::size_t k = 0; k < 2; ++k) REQUIRE(r.data.points()[i][k] == data.points()[i][k]);
  }
  for (std::size_t i = data.size(); i < r.data.size(); ++i)
    REQUIRE(r.data.labels()[i] == label(disc, r.data.points()[i]));
  CHECK(min_pairwise_distance(r.data.points()) >=
        std::min(cfg.insert_distance(), min_pairwise_distance(data.points())));
}

TEST_CASE("every inserted point is a midpoint of an earlier pair", "[refine]") {
  const auto g = generate(SequenceKind::weyl(), Box({-1.0, -1.0}, {1.0, 1.0}), 150);
  const Disc disc{0.5};
  LabeledGrid current = label_grid(disc, g);
  RefineConfig cfg;
  cfg.radius = 0.3;
  cfg.max_iterations = 1;
  for (int iter = 0; iter < 3; ++iter) {
    const auto r = refine(current, disc, cfg);
    for (std::size_t i = current.size(); i < r.data.size(); ++i)
      REQUIRE(is_midpoint_of_some_pair(r.data.points()[i], current, cfg.radius));
    current = r.data;
  }
}

TEST_CASE("refine is idempotent at its fixpoint", "[refine]") {
  const LabeledGrid data(PointSet{{0.0}, {1.0}}, {Label::inside, Label::outside});
  RefineConfig cfg;
  cfg.radius = 1.5;
  cfg.max_iterations = 200;
  cfg.min_insert_distance = 0.01;
  const auto r = refine(data, Cut{0.3}, cfg);
  REQUIRE(r.converged);
  const auto again = refine(r.data, Cut{0.3}, cfg);
  CHECK(again.inserted == 0);
  CHECK(again.data.points() == r.data.points());
}

TEST_CASE("refine stops at the point budget", "[refine]") {
  const auto g = generate(SequenceKind::sobol(), Box({-1.0, -1.0}, {1.0, 1.0}), 300);
  const Disc disc{0.6};
  const auto data = label_grid(disc, g);
  RefineConfig cfg;
  cfg.radius = 0.2;
  cfg.max_iterations = 10;
  cfg.point_budget = 350;
  const auto r = refine(data, disc, cfg);
  CHECK(r.truncated);
  CHECK(r.data.size() == 350);
}
