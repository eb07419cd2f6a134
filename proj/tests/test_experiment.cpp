#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "support.hpp"
#include "svmcs/experiment.hpp"
#include "svmcs/serialize.hpp"

using namespace svmcs;
using Catch::Approx;
using testing::error_code;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

ExperimentConfig small_synthetic() {
  auto cfg = default_config(ExperimentKind::synthetic);
  cfg.n = 200;
  cfg.eval_count = 2000;
  cfg.tuning = TuningMode::spacing;
  cfg.spacing_factor = 1.0;
  cfg.c = 1000.0;
  cfg.threads = 2;
  return cfg;
}

// Drops the timing rows of a key,value report.
std::string without_timing(const std::string& report) {
  std::istringstream in(report);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("seconds") == std::string::npos) out += line + '\n';
  return out;
}

}  // namespace

TEST_CASE("grid size rules", "[experiment]") {
  CHECK(grid_size_rule(GridSizeRule::log_linear, 50) == 1956);
  CHECK(grid_size_rule(GridSizeRule::log_linear, 5000) == 4259);
  CHECK(grid_size_rule(GridSizeRule::log_exponential, 500) == 68534);
  CHECK(error_code([] { grid_size_rule(GridSizeRule::log_linear, 1); }) == errc::invalid_argument);
  CHECK(parse_grid_size_rule("log-exponential") == GridSizeRule::log_exponential);
}

TEST_CASE("config validation", "[experiment]") {
  auto cfg = default_config(ExperimentKind::ols);
  CHECK_FALSE(error_code([&] { cfg.validate(); }));
  cfg.splits = {0.0};
  CHECK(error_code([&] { cfg.validate(); }) == errc::invalid_argument);
  cfg.splits = {1.0};
  CHECK(error_code([&] { cfg.validate(); }) == errc::invalid_argument);
  cfg = default_config(ExperimentKind::ols);
  cfg.iterations = 0;
  CHECK(error_code([&] { cfg.validate(); }) == errc::invalid_argument);

  auto kv = KeyValueConfig::parse("experiment = ols\nsplits = 0.3,0.6\niterations = 3\nkind = weyl\n");
  cfg = default_config(ExperimentKind::synthetic);
  apply_config(cfg, kv);
  CHECK(cfg.experiment == ExperimentKind::ols);
  CHECK(cfg.splits == std::vector<double>{0.3, 0.6});
  CHECK(cfg.iterations == 3);
  CHECK(cfg.kind == SequenceKind::weyl());
  auto unknown = KeyValueConfig::parse("colour = blue\n");
  CHECK(error_code([&] { apply_config(cfg, unknown); }) == errc::invalid_argument);
}

TEST_CASE("error classes partition test points", "[experiment]") {
  CHECK(classify_error(Label::inside, Label::inside) == ErrorClass::inside_correct);
  CHECK(classify_error(Label::outside, Label::outside) == ErrorClass::outside_correct);
  CHECK(classify_error(Label::outside, Label::inside) == ErrorClass::red_cross);
  CHECK(classify_error(Label::inside, Label::outside) == ErrorClass::blue_cross);
}

TEST_CASE("synthetic run without noise fits the grid exactly", "[experiment]") {
  auto cfg = default_config(ExperimentKind::synthetic);
  cfg.n = 100;
  cfg.noise_scale = 0.0;
  cfg.eval_count = 500;
  cfg.tuning = TuningMode::auto_sigma;
  const auto run = run_synthetic(cfg);
  CHECK(run.report.train_accuracy_estimate == 1.0);
  CHECK(run.report.train_accuracy_truth == 1.0);
  CHECK(run.report.grid_size == grid_size_rule(GridSizeRule::log_linear, 100));
}

TEST_CASE("synthetic report agrees with its point records", "[experiment]") {
  const auto cfg = small_synthetic();
  const auto run = run_synthetic(cfg);
  std::ostringstream pts;
  write_synthetic_points(pts, run.points);
  const auto rows = parse_csv(pts.str());
  REQUIRE(rows[0] == std::vector<std::string>{"set", "x0", "x1", "estimated", "true", "predicted",
                                               "class_vs_estimate", "class_vs_true"});
  std::size_t test = 0, ok_est = 0, ok_true = 0, train = 0, train_ok = 0;
  std::map<std::string, std::size_t> classes;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row[0] == "test") {
      ++test;
      ok_est += row[3] == row[5] ? 1 : 0;
      ok_true += row[4] == row[5] ? 1 : 0;
      ++classes[row[7]];
    } else {
      ++train;
      train_ok += row[3] == row[5] ? 1 : 0;
    }
  }
  CHECK(test == run.report.test_size);
  CHECK(train == run.report.train_size);
  CHECK(static_cast<double>(ok_est) / test == Approx(run.report.test_accuracy_estimate).epsilon(1e-15));
  CHECK(static_cast<double>(ok_true) / test == Approx(run.report.test_accuracy_truth).epsilon(1e-15));
  CHECK(static_cast<double>(train_ok) / train ==
        Approx(run.report.train_accuracy_estimate).epsilon(1e-15));
  std::size_t total = 0;
  for (const auto& [k, v] : classes) {
    CHECK((k == "inside-correct" || k == "outside-correct" || k == "red-cross" || k == "blue-cross"));
    total += v;
  }
  CHECK(total == test);
  CHECK(classes["red-cross"] + classes["blue-cross"] == test - ok_true);
}

TEST_CASE("synthetic runs are reproducible", "[experiment]") {
  const auto cfg = small_synthetic();
  std::ostringstream a, b, pa, pb;
  const auto r1 = run_synthetic(cfg);
  const auto r2 = run_synthetic(cfg);
  write_synthetic_report(a, r1.report);
  write_synthetic_report(b, r2.report);
  write_synthetic_points(pa, r1.points);
  write_synthetic_points(pb, r2.points);
  CHECK(without_timing(a.str()) == without_timing(b.str()));
  CHECK(pa.str() == pb.str());
}

TEST_CASE("synthetic outputs are written", "[experiment]") {
  auto cfg = small_synthetic();
  cfg.out_dir = (std::filesystem::temp_directory_path() / "svmcs_synth_test").string();
  std::filesystem::remove_all(cfg.out_dir);
  write_synthetic_outputs(run_synthetic(cfg), cfg);
  for (const char* f : {"synthetic_points.csv", "synthetic_report.csv", "synthetic.svg"})
    CHECK(std::filesystem::exists(std::filesystem::path(cfg.out_dir) / f));
  std::ifstream svg(std::filesystem::path(cfg.out_dir) / "synthetic.svg");
  std::string head;
  std::getline(svg, head);
  CHECK(head.rfind("<svg", 0) == 0);
  std::filesystem::remove_all(cfg.out_dir);
}

TEST_CASE("single-class grids surface the configuration", "[experiment]") {
  auto cfg = default_config(ExperimentKind::synthetic);
  cfg.grid_size = 1;
  cfg.eval_count = 10;
  try {
    run_synthetic(cfg);
    FAIL("expected degenerate training");
  } catch (const error& e) {
    CHECK(e.code() == errc::degenerate_training);
    CHECK(std::string(e.what()).find("grid_size = 1") != std::string::npos);
  }
}

TEST_CASE("ols study is deterministic and thread independent", "[experiment]") {
  auto cfg = default_config(ExperimentKind::ols);
  cfg.iterations = 3;
  cfg.grid_size = 1500;
  cfg.splits = {0.2, 0.8};
  cfg.threads = 1;
  const auto a = run_ols(cfg);
  cfg.threads = 3;
  const auto b = run_ols(cfg);
  REQUIRE(a.splits.size() == 2);
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK(a.splits[s].test_accuracy == b.splits[s].test_accuracy);
    CHECK(a.splits[s].capture_rate == b.splits[s].capture_rate);
    CHECK(a.splits[s].train_size + a.splits[s].test_size == 1500);
  }
  CHECK(a.threshold == Approx(11.0705).margin(1e-4));
  CHECK(a.splits[1].test_accuracy >= 0.9);
  std::ostringstream table;
  write_ols_table(table, a, cfg.iterations);
  const auto rows = parse_csv(table.str());
  CHECK(rows.size() == 3);
  CHECK(rows[0][0] == "split");
}

TEST_CASE("dense classification reports box and extrapolation", "[experiment]") {
  const auto g = generate(SequenceKind::sobol(), Box({-1.0, -1.0}, {1.0, 1.0}), 400);
  std::vector<Label> lab;
  for (std::size_t i = 0; i < g.count(); ++i) {
    const auto p = g.points()[i];
    lab.push_back(p[0] * p[0] + p[1] * p[1] < 0.36 ? Label::inside : Label::outside);
  }
  const LabeledGrid data(g.points(), lab);
  const auto clf = train(data, auto_sigma(data));

  const auto same = classify_dense(clf, data.points(), clf.domain(), 2);
  CHECK(same.labels == data.labels());
  CHECK(same.extrapolated == 0);
  REQUIRE(same.inside_box);
  CHECK(same.inside_box->lower()[0] > -0.6);
  CHECK(same.inside_box->upper()[0] < 0.6);

  std::vector<std::string> warnings;
  const auto prev = set_warning_handler([&](std::string_view m) { warnings.emplace_back(m); });
  const auto far = generate(SequenceKind::sobol(), Box({5.0, 5.0}, {6.0, 6.0}), 100);
  const auto out = classify_dense(clf, far.points(), clf.domain(), 1);
  set_warning_handler(prev);
  CHECK(out.extrapolated == 100);
  CHECK(warnings.size() == 1);
  for (Label l : out.labels) CHECK(l == sign_label(clf.bias()));
}
