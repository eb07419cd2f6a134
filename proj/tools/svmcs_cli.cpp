// svmcs: grids, criteria, SVM training and the two simulation studies.
//
// Exit codes: 0 success, 2 invalid configuration or input, 3 solver failure.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "svmcs/svmcs.hpp"

namespace {

using namespace svmcs;

constexpr int exit_ok = 0;
constexpr int exit_invalid = 2;
constexpr int exit_solver = 3;

int exit_code_for(errc code) {
  switch (code) {
    case errc::solver_failure:
    case errc::numerical_conditioning: return exit_solver;
    default: return exit_invalid;
  }
}

// "lo:hi,lo:hi,..." one pair per dimension.
Box parse_box(const std::string& text) {
  point lo, hi;
  std::istringstream in(text);
  std::string pair;
  while (std::getline(in, pair, ',')) {
    const auto colon = pair.find(':');
    require(colon != std::string::npos, errc::invalid_argument,
            "box must be written lo:hi,lo:hi,...");
    try {
      lo.push_back(std::stod(pair.substr(0, colon)));
      hi.push_back(std::stod(pair.substr(colon + 1)));
    } catch (const std::exception&) {
      fail(errc::invalid_argument, "bad box bound '" + pair + "'");
    }
  }
  require(!lo.empty(), errc::invalid_argument, "box is empty");
  return {lo, hi};
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  KeyValueConfig kv;
  kv.set(key, text);
  return *kv.get_list(key);
}

std::string full_precision(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Runs `write` against stdout for "-" or a file otherwise.
template <class F>
void with_output(const std::string& path, F write) {
  if (path == "-") {
    write(std::cout);
    return;
  }
  if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty())
    std::filesystem::create_directories(dir);
  auto out = open_output(path);
  write(out);
}

CsvPoints read_points(const std::string& path) {
  if (path == "-") return read_points_csv(std::cin);
  return load_points_csv(path);
}

// Criterion description shared by `label` and `refine`; flags override the file.
struct CriterionOptions {
  std::string config;
  std::string type;
  std::string center;
  double radius = 0.0;
  std::string precision;
  double threshold = 0.0;
  double alpha = 0.0;
  double noise = -1.0;
  std::uint64_t seed = 1;
  std::size_t n = 0;
  std::string theta0;
  std::size_t moments = 0;
  double width = 0.0;

  // `radius_flag` lets `refine` keep --radius for its own neighbour radius.
  void add_to(CLI::App* app, const std::string& radius_flag = "--radius") {
    radius_flag_ = radius_flag;
    app->add_option("--criterion-config", config, "criterion key=value file");
    app->add_option("--criterion", type, "ball, ellipsoid, synthetic or interval");
    app->add_option("--center", center, "comma list");
    app->add_option(radius_flag, radius, "ball radius");
    app->add_option("--precision", precision, "ellipsoid precision, row-major comma list");
    app->add_option("--threshold", threshold, "ellipsoid threshold");
    app->add_option("--alpha", alpha, "level; ellipsoid threshold becomes chi2_d(1-alpha)");
    app->add_option("--noise", noise, "synthetic noise scale (default 0)");
    app->add_option("--seed", seed, "synthetic or interval data seed");
    app->add_option("--n", n, "interval data sample size");
    app->add_option("--theta0", theta0, "interval data true parameter, comma list");
    app->add_option("--moments", moments, "interval data moment count");
    app->add_option("--width", width, "interval data bracket width");
  }

  KeyValueConfig merged(const CLI::App* app) const {
    KeyValueConfig kv;
    if (!config.empty()) {
      auto in = open_input(config);
      kv = KeyValueConfig::parse(in);
    }
    auto put = [&](const char* flag, const char* key, const std::string& value) {
      if (app->count(flag) > 0) kv.set(key, value);
    };
    put("--criterion", "criterion", type);
    put("--center", "center", center);
    put(radius_flag_.c_str(), "radius", full_precision(radius));
    put("--precision", "precision", precision);
    put("--threshold", "threshold", full_precision(threshold));
    put("--alpha", "alpha", full_precision(alpha));
    put("--noise", "noise_scale", full_precision(noise));
    put("--seed", "seed", std::to_string(seed));
    put("--n", "n", std::to_string(n));
    put("--theta0", "theta0", theta0);
    put("--moments", "moments", std::to_string(moments));
    put("--width", "width", full_precision(width));
    return kv;
  }

 private:
  std::string radius_flag_ = "--radius";
};

AnyCriterion build_criterion(const KeyValueConfig& kv) {
  const auto type = kv.get("criterion");
  require(type.has_value(), errc::invalid_argument, "no criterion given (--criterion)");
  auto need_list = [&](const char* key) {
    const auto v = kv.get_list(key);
    if (!v) fail(errc::invalid_argument, std::string("criterion needs '") + key + "'");
    return *v;
  };
  AnyCriterion crit = [&]() -> AnyCriterion {
    if (*type == "ball") {
      const auto r = kv.get_double("radius");
      require(r && *r > 0.0, errc::invalid_argument, "ball needs radius > 0");
      return EllipsoidCriterion::ball(to_vector(need_list("center")), *r);
    }
    if (*type == "ellipsoid") {
      const auto c = need_list("center");
      const auto p = need_list("precision");
      const auto d = static_cast<Eigen::Index>(c.size());
      require(p.size() == c.size() * c.size(), errc::invalid_argument,
              "precision must have d*d entries");
      Eigen::MatrixXd P(d, d);
      for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) P(i, j) = p[static_cast<std::size_t>(i * d + j)];
      double threshold = kv.get_double("threshold").value_or(0.0);
      if (const auto a = kv.get_double("alpha"))
        threshold = stats::chi2_quantile(static_cast<int>(d), 1.0 - *a);
      return EllipsoidCriterion(to_vector(c), P, threshold);
    }
    if (*type == "synthetic") {
      return SyntheticCriterion(SyntheticRegion{}, kv.get_double("noise_scale").value_or(0.0),
                                kv.get_count("seed").value_or(1));
    }
    if (*type == "interval") {
      const auto theta0 = need_list("theta0");
      const auto n = kv.get_count("n").value_or(1000);
      const auto p = kv.get_count("moments").value_or(2 * theta0.size());
      auto data = std::make_shared<const IntervalRegressionData>(simulate_interval_data(
          n, to_vector(theta0), static_cast<int>(p), kv.get_double("width").value_or(1.0),
          kv.get_count("seed").value_or(1)));
      return make_moment_criterion(data, kv.get_double("alpha").value_or(0.05));
    }
    fail(errc::invalid_argument, "unknown criterion '" + *type + "'");
  }();
  // Keys that belong to other criterion types are tolerated; unknown ones are not.
  static const std::vector<std::string> known{"criterion", "center", "radius", "precision",
                                              "threshold", "alpha", "noise_scale", "seed",
                                              "n", "theta0", "moments", "width"};
  for (const auto& [k, v] : kv.values())
    if (std::find(known.begin(), known.end(), k) == known.end())
      fail(errc::invalid_argument, "unknown criterion key '" + k + "'");
  return crit;
}

void print_box(std::ostream& out, const char* name, const std::optional<Box>& box) {
  out << name << ',' << box_string(box) << '\n';
}

// ---------------------------------------------------------------------------

struct GenerateCmd {
  std::string kind = "sobol";
  std::string box;
  std::size_t count = 0;
  std::uint64_t seed = 1;
  std::string out = "-";

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("generate", "first terms of an equidistributed sequence");
    sub->add_option("--kind", kind, "sobol, weyl, baker or montecarlo[:seed]");
    sub->add_option("--box", box, "lo:hi,lo:hi,...")->required();
    sub->add_option("--count", count, "number of points")->required();
    sub->add_option("--seed", seed, "montecarlo seed");
    sub->add_option("--out", out, "output CSV, - for stdout");
    sub->callback([this] { run(); });
  }

  void run() const {
    const Grid g = generate(parse_sequence_kind(kind, seed), parse_box(box), count);
    with_output(out, [&](std::ostream& o) { write_grid_csv(o, g); });
  }
};

struct LabelCmd {
  std::string in;
  std::string out = "-";
  std::size_t threads = 0;
  CriterionOptions crit;
  CLI::App* sub = nullptr;

  void add(CLI::App& app) {
    sub = app.add_subcommand("label", "label grid points with a criterion");
    sub->add_option("--in", in, "grid CSV, - for stdin")->required();
    sub->add_option("--out", out, "labeled CSV, - for stdout");
    sub->add_option("--threads", threads, "worker threads, 0 for all cores");
    crit.add_to(sub);
    sub->callback([this] { run(); });
  }

  void run() const {
    const auto csv = read_points(in);
    const AnyCriterion c = build_criterion(crit.merged(sub));
    const LabeledGrid data = label_points(c, csv.points, threads);
    with_output(out, [&](std::ostream& o) { write_labeled_csv(o, data, csv.kind, csv.box); });
    std::cerr << "labeled " << data.size() << " points: " << data.l1() << " inside, " << data.l0()
              << " outside\n";
  }
};

struct TuningFlags {
  bool auto_tune = false;
  double sigma2 = 0.0;
  double c = 0.0;
  double spacing_factor = 0.0;

  void add_to(CLI::App* sub) {
    sub->add_flag("--auto-tune", auto_tune, "sigma = 0.1 * min distance, C above the floor");
    sub->add_option("--sigma2", sigma2, "fixed sigma^2");
    sub->add_option("--c", c, "box constraint C");
    sub->add_option("--spacing-factor", spacing_factor, "sigma = factor * grid spacing");
  }
};

struct TrainCmd {
  std::string in;
  std::string out = "classifier.json";
  TuningFlags tuning;
  std::size_t max_iterations = 0;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("train", "train an RBF classifier on a labeled grid");
    sub->add_option("--in", in, "labeled CSV, - for stdin")->required();
    sub->add_option("--out", out, "classifier JSON");
    sub->add_option("--max-iterations", max_iterations, "SMO iteration cap, 0 for default");
    tuning.add_to(sub);
    sub->callback([this] { run(); });
  }

  void run() const {
    const auto csv = read_points(in);
    const LabeledGrid data = to_labeled(csv);
    const Box domain = csv.box ? *csv.box : smallest_enclosing_box(data.points());
    KernelParams params;
    if (tuning.auto_tune) {
      params = auto_sigma(data);
      if (tuning.c > 0.0) params.c = tuning.c;
    } else if (tuning.sigma2 > 0.0) {
      params = {tuning.sigma2, tuning.c > 0.0 ? tuning.c : 10.0};
    } else if (tuning.spacing_factor > 0.0) {
      params = spacing_sigma(domain, data.size(), tuning.spacing_factor,
                             tuning.c > 0.0 ? tuning.c : 10.0);
    } else {
      fail(errc::invalid_argument, "choose --auto-tune, --sigma2 or --spacing-factor");
    }
    SmoOptions opt;
    if (max_iterations > 0) opt.max_iterations = max_iterations;
    const auto t0 = Clock::now();
    TrainedClassifier clf = train(data, params, opt);
    const double secs = seconds_since(t0);
    clf.set_domain(domain);
    save_classifier(clf, out);
    std::cout << std::setprecision(17) << "sigma2," << params.sigma2 << "\nc," << params.c
              << "\nl0," << data.l0() << "\nl1," << data.l1() << "\nsupport_vectors,"
              << clf.support_vectors().size() << "\ntraining_accuracy,"
              << training_accuracy(clf, data) << "\ntrain_seconds," << secs << '\n';
  }
};

struct PredictCmd {
  std::string model;
  std::string in;
  std::string kind = "sobol";
  std::string box;
  std::size_t count = 0;
  std::uint64_t seed = 1;
  std::string out = "-";
  std::size_t threads = 0;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("predict", "classify a dense grid with a trained classifier");
    sub->add_option("--model", model, "classifier JSON")->required();
    sub->add_option("--in", in, "grid CSV; otherwise --box and --count generate one");
    sub->add_option("--kind", kind, "sequence for a generated grid");
    sub->add_option("--box", box, "lo:hi,... for a generated grid; default: training box");
    sub->add_option("--count", count, "points in a generated grid");
    sub->add_option("--seed", seed, "montecarlo seed");
    sub->add_option("--out", out, "labeled CSV, - for stdout, empty to skip");
    sub->add_option("--threads", threads, "worker threads, 0 for all cores");
    sub->callback([this] { run(); });
  }

  void run() const {
    const TrainedClassifier clf = load_classifier(model);
    PointSet pts(clf.dim());
    std::string grid_kind = "none";
    std::optional<Box> grid_box;
    if (!in.empty()) {
      auto csv = read_points(in);
      pts = std::move(csv.points);
      grid_kind = csv.kind;
      grid_box = csv.box;
    } else {
      require(count > 0, errc::invalid_argument, "give --in or --count");
      std::optional<Box> b = box.empty() ? clf.domain() : std::optional<Box>(parse_box(box));
      require(b.has_value(), errc::invalid_argument, "classifier has no training box; give --box");
      const auto sk = parse_sequence_kind(kind, seed);
      const Grid g = generate(sk, *b, count);
      pts = g.points();
      grid_kind = to_string(sk);
      grid_box = b;
    }
    const DenseResult r = classify_dense(clf, pts, clf.domain(), threads);
    if (!out.empty()) {
      const LabeledGrid data(pts, r.labels);
      // stdout carries the CSV, so the summary moves to stderr
      with_output(out, [&](std::ostream& o) { write_labeled_csv(o, data, grid_kind, grid_box); });
    }
    std::ostream& summary = out == "-" ? std::cerr : std::cout;
    summary << std::setprecision(17) << "points," << pts.size() << "\ninside," << r.inside
            << "\nextrapolated," << r.extrapolated << '\n';
    print_box(summary, "inside_box", r.inside_box);
    summary << "seconds," << r.seconds << "\nseconds_per_point," << r.seconds_per_point << '\n';
  }
};

struct RefineCmd {
  std::string in;
  std::string out = "-";
  double radius = 0.0;
  std::size_t iterations = 5;
  std::size_t budget = 100000;
  double min_distance = 0.0;
  std::size_t threads = 1;
  CriterionOptions crit;
  CLI::App* sub = nullptr;

  void add(CLI::App& app) {
    sub = app.add_subcommand("refine", "insert labeled midpoints across the boundary");
    sub->add_option("--in", in, "labeled CSV, - for stdin")->required();
    sub->add_option("--out", out, "labeled CSV, - for stdout");
    sub->add_option("--radius", radius, "neighbor radius")->required();
    sub->add_option("--iters", iterations, "maximum refinement rounds");
    sub->add_option("--budget", budget, "maximum total points");
    sub->add_option("--min-distance", min_distance, "skip midpoints this close to a point");
    sub->add_option("--threads", threads, "worker threads for the neighbor search");
    crit.add_to(sub, "--ball-radius");
    sub->callback([this] { run(); });
  }

  void run() const {
    const auto csv = read_points(in);
    const LabeledGrid data = to_labeled(csv);
    const AnyCriterion c = build_criterion(crit.merged(sub));
    RefineConfig cfg;
    cfg.radius = radius;
    cfg.max_iterations = iterations;
    cfg.point_budget = budget;
    cfg.min_insert_distance = min_distance;
    cfg.threads = threads;
    const RefineResult r = refine(data, c, cfg);
    with_output(out, [&](std::ostream& o) { write_labeled_csv(o, r.data, "none", csv.box); });
    std::cerr << "inserted " << r.inserted << " points in " << r.iterations << " rounds"
              << (r.truncated ? " (budget reached)" : "") << (r.converged ? " (converged)" : "")
              << '\n';
  }
};

struct ExperimentCmd {
  ExperimentKind which;
  std::string config;
  std::size_t n = 0;
  std::string split;
  std::size_t iters = 0;
  std::uint64_t seed = 0;
  std::string kind;
  std::string out;
  std::size_t grid_size = 0;
  std::string grid_rule;
  std::size_t threads = 0;
  double noise = -1.0;
  TuningFlags tuning;
  CLI::App* sub = nullptr;

  explicit ExperimentCmd(ExperimentKind k) : which(k) {}

  void add(CLI::App* parent) {
    const bool ols = which == ExperimentKind::ols;
    sub = parent->add_subcommand(ols ? "ols" : "synthetic",
                                 ols ? "repeated OLS ellipsoid study" : "synthetic region study");
    sub->add_option("--config", config, "key = value file");
    sub->add_option("--n", n, "sample size");
    sub->add_option("--split", split, "training fractions, comma list");
    sub->add_option("--iters", iters, "iterations");
    sub->add_option("--seed", seed, "seed");
    sub->add_option("--kind", kind, "grid sequence");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--grid-size", grid_size, "grid size, overrides the rule");
    sub->add_option("--grid-rule", grid_rule, "log-linear or log-exponential");
    sub->add_option("--threads", threads, "worker threads, 0 for all cores");
    if (!ols) sub->add_option("--noise", noise, "noise scale, negative for the n-based default");
    tuning.add_to(sub);
    sub->callback([this] { run(); });
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg = default_config(which);
    if (!config.empty()) {
      auto in = open_input(config);
      apply_config(cfg, KeyValueConfig::parse(in));
      require(cfg.experiment == which, errc::invalid_argument,
              "config file is for a different experiment");
    }
    if (sub->count("--seed") > 0) cfg.seed = seed;
    if (!kind.empty()) cfg.kind = parse_sequence_kind(kind, cfg.seed);
    if (sub->count("--n") > 0) cfg.n = n;
    if (!split.empty()) cfg.splits = parse_list("split", split);
    if (sub->count("--iters") > 0) cfg.iterations = iters;
    if (!out.empty()) cfg.out_dir = out;
    if (sub->count("--grid-size") > 0) cfg.grid_size = grid_size;
    if (!grid_rule.empty()) cfg.rule = parse_grid_size_rule(grid_rule);
    if (sub->count("--threads") > 0) cfg.threads = threads;
    if (which == ExperimentKind::synthetic && sub->count("--noise") > 0) cfg.noise_scale = noise;
    if (tuning.auto_tune) cfg.tuning = TuningMode::auto_sigma;
    if (tuning.sigma2 > 0.0) {
      cfg.tuning = TuningMode::fixed;
      cfg.sigma2 = tuning.sigma2;
    }
    if (tuning.spacing_factor > 0.0) {
      cfg.tuning = TuningMode::spacing;
      cfg.spacing_factor = tuning.spacing_factor;
    }
    if (tuning.c > 0.0) cfg.c = tuning.c;
    cfg.validate();
    return cfg;
  }

  void run() const {
    const ExperimentConfig cfg = resolve();
    if (which == ExperimentKind::synthetic) {
      const SyntheticRun r = run_synthetic(cfg);
      write_synthetic_outputs(r, cfg);
      write_synthetic_report(std::cout, r.report);
    } else {
      const OlsReport r = run_ols(cfg);
      write_ols_outputs(r, cfg);
      write_ols_table(std::cout, r, cfg.iterations);
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"svmcs: confidence sets from labeled grids and RBF support vector machines"};
  app.require_subcommand(1);
  GenerateCmd generate_cmd;
  LabelCmd label_cmd;
  TrainCmd train_cmd;
  PredictCmd predict_cmd;
  RefineCmd refine_cmd;
  ExperimentCmd synthetic_cmd(ExperimentKind::synthetic);
  ExperimentCmd ols_cmd(ExperimentKind::ols);
  generate_cmd.add(app);
  label_cmd.add(app);
  train_cmd.add(app);
  predict_cmd.add(app);
  refine_cmd.add(app);
  auto* experiment = app.add_subcommand("experiment", "run a simulation study");
  experiment->require_subcommand(1);
  synthetic_cmd.add(experiment);
  ols_cmd.add(experiment);

  set_warning_handler([](std::string_view m) { std::cerr << "warning: " << m << '\n'; });
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_invalid;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_invalid;
  }
  return exit_ok;
}
