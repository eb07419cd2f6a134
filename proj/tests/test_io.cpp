#include <catch_amalgamated.hpp>

#include <sstream>

#include "support.hpp"
#include "svmcs/config.hpp"
#include "svmcs/io.hpp"

using namespace svmcs;
using testing::error_code;

TEST_CASE("grid csv round trip is bit exact", "[io]") {
  for (const auto& kind : {SequenceKind::sobol(), SequenceKind::weyl(), SequenceKind::baker(),
                           SequenceKind::monte_carlo(5)}) {
    const Box box({-1.5, 0.1, 2.0}, {0.25, 3.3, 7.0});
    const auto g = generate(kind, box, 257);
    std::stringstream s;
    write_grid_csv(s, g);
    const auto csv = read_points_csv(s);
    CHECK_FALSE(csv.has_labels);
    const Grid back = to_grid(csv);
    CHECK(back.points() == g.points());
    CHECK(back.kind() == g.kind());
    CHECK(back.box().lower() == box.lower());
    CHECK(back.box().upper() == box.upper());
  }
}

TEST_CASE("grid csv header", "[io]") {
  const auto g = generate(SequenceKind::sobol(), Box::unit(2), 2);
  std::stringstream s;
  write_grid_csv(s, g);
  std::string first, second;
  std::getline(s, first);
  std::getline(s, second);
  CHECK(first == "dim,kind,count");
  CHECK(second == "2,sobol,2");
}

TEST_CASE("labeled csv round trip", "[io]") {
  const LabeledGrid data(PointSet{{0.1, 1.0 / 3.0}, {2.0, -7.25}, {1e-300, 5e10}},
                         {Label::inside, Label::outside, Label::inside});
  std::stringstream s;
  write_labeled_csv(s, data);
  const auto csv = read_points_csv(s);
  REQUIRE(csv.has_labels);
  const LabeledGrid back = to_labeled(csv);
  CHECK(back.points() == data.points());
  CHECK(back.labels() == data.labels());
  CHECK(csv.kind == "none");
}

TEST_CASE("malformed csv is rejected", "[io]") {
  auto code = [](const std::string& text) {
    return error_code([&] {
      std::istringstream in(text);
      read_points_csv(in);
    });
  };
  CHECK(code("") == errc::format_error);
  CHECK(code("x,y\n") == errc::format_error);
  CHECK(code("dim,kind,count\n2,sobol,1\nx0,x1\n0.5\n") == errc::format_error);
  CHECK(code("dim,kind,count\n2,sobol,2\nx0,x1\n0.5,0.5\n") == errc::format_error);
  CHECK(code("dim,kind,count\n1,none,1\nx0,label\n0.5,0\n") == errc::format_error);
  CHECK(code("dim,kind,count\n1,none,1\nx0\nabc\n") == errc::format_error);
  CHECK_FALSE(code("dim,kind,count\n1,none,1\nx0,label\n0.5,-1\n"));

  std::istringstream unlabeled("dim,kind,count\n1,none,1\nx0\n0.5\n");
  const auto csv = read_points_csv(unlabeled);
  CHECK(error_code([&] { to_labeled(csv); }) == errc::format_error);
}

TEST_CASE("key value config", "[io]") {
  const auto cfg = KeyValueConfig::parse(
      "# comment\n"
      "experiment = ols\n"
      "n=500   # trailing comment\n"
      "\n"
      "splits = 0.05, 0.2,0.5\n"
      "alpha = 0.05\n");
  CHECK(cfg.get("experiment") == "ols");
  CHECK(cfg.get_count("n") == 500u);
  CHECK(cfg.get_list("splits") == std::vector<double>{0.05, 0.2, 0.5});
  CHECK(cfg.get_double("alpha") == 0.05);
  CHECK_FALSE(cfg.get("missing"));
  CHECK(cfg.unused_keys().empty());

  CHECK(error_code([] { KeyValueConfig::parse("novalue\n"); }) == errc::format_error);
  CHECK(error_code([] { KeyValueConfig::parse("a=1\na=2\n"); }) == errc::format_error);
  const auto bad = KeyValueConfig::parse("n = -3\nx = abc\n");
  CHECK(error_code([&] { bad.get_count("n"); }) == errc::invalid_argument);
  CHECK(error_code([&] { bad.get_double("x"); }) == errc::invalid_argument);
}
