#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "svmcs/io.hpp"
#include "svmcs/serialize.hpp"

using namespace svmcs;
namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "svmcs_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(SVMCS_CLI_PATH) + " " + args + " > " +
                          (work / "stdout.txt").string() + " 2> " + (work / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string path(const char* name) { return (work / name).string(); }

struct Workspace {
  Workspace() {
    fs::remove_all(work);
    fs::create_directories(work);
  }
  ~Workspace() { fs::remove_all(work); }
};

}  // namespace

TEST_CASE("generate, label, train and predict round trip", "[cli]") {
  Workspace ws;
  REQUIRE(run("generate --kind sobol --box=-1:1,-1:1 --count 400 --out " + path("grid.csv")) == 0);
  const auto grid = load_points_csv(path("grid.csv"));
  CHECK(grid.points.size() == 400);
  CHECK(grid.kind == "sobol");
  CHECK(to_grid(grid).points() == generate(SequenceKind::sobol(), Box({-1, -1}, {1, 1}), 400).points());

  REQUIRE(run("label --in " + path("grid.csv") + " --criterion-config " +
              std::string(SVMCS_CONFIG_DIR) + "/disc.criterion --out " + path("labeled.csv")) == 0);
  const LabeledGrid data = to_labeled(load_points_csv(path("labeled.csv")));
  CHECK(data.l0() > 0);
  CHECK(data.l1() > 0);

  REQUIRE(run("train --in " + path("labeled.csv") + " --auto-tune --out " + path("model.json")) == 0);
  CHECK(slurp(work / "stdout.txt").find("training_accuracy,1\n") != std::string::npos);
  const auto clf = load_classifier(path("model.json"));
  REQUIRE(clf.domain());

  REQUIRE(run("predict --model " + path("model.json") + " --in " + path("labeled.csv") + " --out " +
              path("pred.csv")) == 0);
  const LabeledGrid pred = to_labeled(load_points_csv(path("pred.csv")));
  CHECK(pred.labels() == data.labels());
  const std::string summary = slurp(work / "stdout.txt");
  CHECK(summary.find("points,400\n") != std::string::npos);
  CHECK(summary.find("inside_box,") != std::string::npos);

  REQUIRE(run("predict --model " + path("model.json") + " --count 1000 --out " + path("dense.csv")) ==
          0);
  CHECK(load_points_csv(path("dense.csv")).points.size() == 1000);
}

TEST_CASE("refine adds labeled points", "[cli]") {
  Workspace ws;
  REQUIRE(run("generate --box=-1:1,-1:1 --count 300 --out " + path("grid.csv")) == 0);
  REQUIRE(run("label --in " + path("grid.csv") +
              " --criterion ball --center=0.1,-0.05 --radius 0.55 --out " + path("labeled.csv")) == 0);
  REQUIRE(run("refine --in " + path("labeled.csv") +
              " --criterion ball --center=0.1,-0.05 --ball-radius 0.55 --radius 0.25 --iters 2 --out " +
              path("refined.csv")) == 0);
  const auto before = to_labeled(load_points_csv(path("labeled.csv")));
  const auto after = to_labeled(load_points_csv(path("refined.csv")));
  CHECK(after.size() > before.size());
}

TEST_CASE("invalid input exits with code 2", "[cli]") {
  Workspace ws;
  CHECK(run("generate --box=1:0 --count 5") == 2);
  CHECK(run("generate --box=0:1 --count 0") == 2);
  CHECK(run("no-such-verb") == 2);
  CHECK(run("train --in " + path("missing.csv") + " --auto-tune") == 2);
  CHECK(run("experiment ols --split 1.5") == 2);
  CHECK(run("experiment ols --iters 0") == 2);
  CHECK(run("experiment synthetic --config " + std::string(SVMCS_CONFIG_DIR) + "/ols.cfg") == 2);
  {
    std::ofstream bad(path("bad.json"));
    bad << R"({"format":"svmcs-classifier","version":99})";
  }
  CHECK(run("predict --model " + path("bad.json") + " --count 10 --box=0:1") == 2);
  CHECK(slurp(work / "stderr.txt").find("format-error") != std::string::npos);
}

TEST_CASE("solver failure exits with code 3", "[cli]") {
  Workspace ws;
  REQUIRE(run("generate --box=-1:1,-1:1 --count 200 --out " + path("grid.csv")) == 0);
  REQUIRE(run("label --in " + path("grid.csv") +
              " --criterion ball --center=0,0 --radius 0.5 --out " + path("labeled.csv")) == 0);
  CHECK(run("train --in " + path("labeled.csv") + " --sigma2 0.5 --c 1000 --max-iterations 1") == 3);
}

TEST_CASE("small experiments write their reports", "[cli]") {
  Workspace ws;
  REQUIRE(run("experiment synthetic --n 60 --threads 2 --out " + path("syn")) == 0);
  for (const char* f : {"synthetic_points.csv", "synthetic_report.csv", "synthetic.svg"})
    CHECK(fs::exists(work / "syn" / f));

  REQUIRE(run("experiment ols --config " + std::string(SVMCS_CONFIG_DIR) +
              "/ols.cfg --iters 2 --grid-size 800 --split 0.2,0.8 --out " + path("ols")) == 0);
  const std::string table = slurp(work / "ols" / "ols_table.csv");
  CHECK(table.rfind("split,train_size,test_size", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);
  CHECK(fs::exists(work / "ols" / "ols_iterations.csv"));
}
