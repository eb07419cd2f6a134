#include <catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "support.hpp"
#include "svmcs/grid.hpp"
#include "svmcs/log.hpp"
#include "svmcs/tuning.hpp"

using namespace svmcs;
using Catch::Approx;
using testing::error_code;

namespace {

struct CaptureWarnings {
  std::vector<std::string> seen;
  WarningHandler previous;
  CaptureWarnings() {
    previous = set_warning_handler([this](std::string_view m) { seen.emplace_back(m); });
  }
  ~CaptureWarnings() { set_warning_handler(previous); }
};

LabeledGrid labeled_by_disc(const PointSet& pts, double cx, double cy, double r) {
  std::vector<Label> lab;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dx = pts[i][0] - cx, dy = pts[i][1] - cy;
    lab.push_back(dx * dx + dy * dy < r * r ? Label::inside : Label::outside);
  }
  return {pts, lab};
}

LabeledGrid swap_labels(const LabeledGrid& g) {
  std::vector<Label> lab;
  for (Label l : g.labels()) lab.push_back(l == Label::inside ? Label::outside : Label::inside);
  return {g.points(), lab};
}

}  // namespace

TEST_CASE("C lower bound", "[tuning]") {
  CaptureWarnings w;
  CHECK(c_lower_bound(6, 3) == Approx(2.0 / 3.0));
  CHECK(w.seen.empty());
  CHECK(c_lower_bound(5, 5) == 0.5);
  CHECK(w.seen.size() == 1);
  CHECK(c_lower_bound(1000, 1) == Approx(1000.0 / 1001.0));
  CHECK(w.seen.size() == 2);  // l1 + 1 > 2 fails
  CHECK(error_code([] { c_lower_bound(0, 3); }) == errc::invalid_argument);
  CHECK(error_code([] { c_lower_bound(3, 0); }) == errc::invalid_argument);
}

TEST_CASE("auto sigma rule", "[tuning]") {
  CaptureWarnings w;
  const LabeledGrid two(PointSet{{0.0}, {1.0}}, {Label::inside, Label::outside});
  const auto p = auto_sigma(two);
  CHECK(p.sigma2 == Approx(0.01));
  CHECK(p.c == 10.0);
  const LabeledGrid close(PointSet{{0.0}, {0.05}, {1.0}}, {Label::inside, Label::outside, Label::outside});
  CHECK(std::sqrt(auto_sigma(close).sigma2) == Approx(0.005));
  CHECK(error_code([] {
          auto_sigma(LabeledGrid(PointSet{{0.0}, {1.0}}, {Label::inside, Label::inside}));
        }) == errc::degenerate_training);
}

TEST_CASE("auto sigma fits a random grid exactly", "[tuning]") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointSet pts(2);
  for (int i = 0; i < 100; ++i) pts.push_back(point{u(rng), u(rng)});
  const auto data = labeled_by_disc(pts, 0.5, 0.5, 0.3);
  const auto p = auto_sigma(data);
  CHECK(std::sqrt(p.sigma2) < min_pairwise_distance(pts));
  CHECK(p.c > c_lower_bound(data.l0(), data.l1()));
  CHECK(training_accuracy(train(data, p), data) == 1.0);
}

TEST_CASE("nearest pair", "[tuning]") {
  const LabeledGrid g(PointSet{{0.0}, {1.0}}, {Label::inside, Label::outside});
  const auto np = nearest_pair(std::vector<double>{0.25}, g);
  CHECK(np.interior_dist == 0.25);
  CHECK(np.exterior_dist == 0.75);
  CHECK(np.n_interior == 1);
  CHECK(np.n_exterior == 1);
  CHECK(nearest_pair(std::vector<double>{0.0}, g).interior_dist == 0.0);
  CHECK(error_code([] {
          nearest_pair(std::vector<double>{0.0},
                       LabeledGrid(PointSet{{0.0}, {1.0}}, {Label::inside, Label::inside}));
        }) == errc::degenerate_training);

  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0.0, 1.0);
  PointSet pts(3);
  for (int i = 0; i < 300; ++i) pts.push_back(point{z(rng), z(rng), z(rng)});
  std::vector<Label> lab;
  for (int i = 0; i < 300; ++i) lab.push_back(i % 3 == 0 ? Label::inside : Label::outside);
  const LabeledGrid data(pts, lab);
  for (int t = 0; t < 20; ++t) {
    const point theta{z(rng), z(rng), z(rng)};
    double bi = 1e300, be = 1e300;
    for (int i = 0; i < 300; ++i) {
      double& best = lab[i] == Label::inside ? bi : be;
      best = std::min(best, distance(theta, pts[i]));
    }
    const auto np2 = nearest_pair(theta, data);
    CHECK(np2.interior_dist == Approx(bi).epsilon(1e-14));
    CHECK(np2.exterior_dist == Approx(be).epsilon(1e-14));
    CHECK(np2.n_interior == 100);
    CHECK(np2.n_exterior == 200);
  }
}

TEST_CASE("interior and exterior sigma bounds", "[tuning]") {
  NearestPair a{0.5, 1.0, 4, 10};
  const auto bi = sigma_bound_interior(a);
  CHECK(bi.upper_2sigma2 == Approx(0.75 / std::log(10.0)));
  CHECK(bi.upper_2sigma2 == Approx(0.32572).margin(1e-5));
  CHECK(bi.source == BoundSource::interior);
  CHECK(sigma_bound_interior({0.5, 1.0, 4, 1}).unbounded());
  CHECK(error_code([] { sigma_bound_interior({1.0, 1.0, 4, 10}); }) == errc::empty_interval);

  const auto be = sigma_bound_exterior({1.0, 0.0, 3, 7});
  CHECK(be.upper_2sigma2 == Approx(1.0 / std::log(3.0)));
  CHECK(be.upper_2sigma2 == Approx(0.91024).margin(1e-5));
  CHECK(be.source == BoundSource::exterior);
  CHECK(sigma_bound_exterior({1.0, 0.0, 1, 7}).unbounded());
  CHECK(error_code([] { sigma_bound_exterior({1.0, 1.0, 3, 7}); }) == errc::empty_interval);
}

TEST_CASE("bounds are exchanged when labels are swapped", "[tuning]") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointSet pts(2);
  for (int i = 0; i < 200; ++i) pts.push_back(point{u(rng), u(rng)});
  const auto data = labeled_by_disc(pts, 0.4, 0.6, 0.3);
  const auto swapped = swap_labels(data);
  for (int t = 0; t < 50; ++t) {
    const point theta{u(rng), u(rng)};
    const auto a = nearest_pair(theta, data);
    const auto b = nearest_pair(theta, swapped);
    const auto ia = error_code([&] { sigma_bound_interior(a); });
    const auto eb = error_code([&] { sigma_bound_exterior(b); });
    CHECK(ia == eb);
    if (!ia) CHECK(sigma_bound_interior(a).upper_2sigma2 == sigma_bound_exterior(b).upper_2sigma2);
  }
}

TEST_CASE("sigma inside the interior bound gives dominance", "[tuning]") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(2, 500);
  int checked = 0;
  while (checked < 200) {
    NearestPair np{u(rng), u(rng) + 0.01, 1, static_cast<std::size_t>(count(rng))};
    if (np.exterior_dist <= np.interior_dist) continue;
    const double b = sigma_bound_interior(np).upper_2sigma2;
    for (double f : {0.1, 0.5, 0.9, 0.99}) {
      const double two_s2 = f * b;
      // log form of exp(-dI^2 / 2s^2) > nE exp(-dE^2 / 2s^2); both sides underflow otherwise
      const double lhs = -np.interior_dist * np.interior_dist / two_s2;
      const double rhs = std::log(static_cast<double>(np.n_exterior)) -
                         np.exterior_dist * np.exterior_dist / two_s2;
      REQUIRE(lhs > rhs);
    }
    ++checked;
  }
}

TEST_CASE("admissible sigma", "[tuning]") {
  // Interior probe at distance 0 from a +1 point, exterior points at 1.
  PointSet pts{{0.0, 0.0}};
  std::vector<Label> lab{Label::inside};
  for (int i = 0; i < 10; ++i) {
    const double a = 2.0 * 3.141592653589793 * i / 10.0;
    pts.push_back(point{std::cos(a), std::sin(a)});
    lab.push_back(Label::outside);
  }
  const LabeledGrid data(pts, lab);
  const PointSet probe{{0.0, 0.0}};
  const std::vector<Label> probe_label{Label::inside};
  const double s2 = admissible_sigma2(data, probe, probe_label);
  CHECK(2.0 * s2 == Approx(0.5 / std::log(10.0)));

  const PointSet mid{{0.5}};
  const LabeledGrid line(PointSet{{0.0}, {1.0}}, {Label::inside, Label::outside});
  try {
    admissible_sigma2(line, mid, std::vector<Label>{Label::inside});
    FAIL("expected empty interval");
  } catch (const probe_error& e) {
    CHECK(e.code() == errc::empty_interval);
    CHECK(e.probe() == 0);
  }
}

TEST_CASE("admissible sigma labels 1-D probes correctly", "[tuning]") {
  PointSet pts(1);
  std::vector<Label> lab;
  for (int i = 0; i <= 40; ++i) {
    pts.push_back(point{i / 40.0});
    lab.push_back(i / 40.0 < 0.5 ? Label::inside : Label::outside);
  }
  const LabeledGrid data(pts, lab);
  PointSet probes(1);
  std::vector<Label> truth;
  for (double x : {0.05, 0.2, 0.3, 0.44, 0.52, 0.6, 0.8, 0.97}) {
    probes.push_back(point{x});
    truth.push_back(x < 0.5 ? Label::inside : Label::outside);
  }
  const double s2 = admissible_sigma2(data, probes, truth);
  for (std::size_t i = 0; i < probes.size(); ++i)
    CHECK(simplified_decision(data, s2, probes[i]) == truth[i]);

  // The grid as its own probe set.
  const double self = admissible_sigma2(data);
  for (std::size_t i = 0; i < data.size(); ++i)
    CHECK(simplified_decision(data, self, data.points()[i]) == data.labels()[i]);
}

TEST_CASE("nearest interior distance shrinks along nested grids", "[tuning]") {
  const Box box({-1.0, -1.0}, {1.0, 1.0});
  const double r = 0.55;
  const point theta{0.1, -0.05};  // inside the disc, away from the boundary
  double prev = 1e300;
  for (std::size_t n : {250u, 500u, 1000u, 2000u, 4000u, 8000u}) {
    const auto g = generate(SequenceKind::sobol(), box, n);
    const auto data = labeled_by_disc(g.points(), 0.1, -0.05, r);
    const auto np = nearest_pair(theta, data);
    CHECK(np.interior_dist <= prev);
    prev = np.interior_dist;
    // Exterior points lie outside the disc, so at least r away from the center.
    CHECK(np.exterior_dist >= r);
  }
}
