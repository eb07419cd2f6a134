#pragma once

// End-to-end runs: the planar two-component region study and the repeated
// OLS confidence-ellipsoid study, plus dense classification with a saved
// classifier.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "svmcs/config.hpp"
#include "svmcs/criterion.hpp"
#include "svmcs/error.hpp"
#include "svmcs/grid.hpp"
#include "svmcs/io.hpp"
#include "svmcs/log.hpp"
#include "svmcs/parallel.hpp"
#include "svmcs/stats.hpp"
#include "svmcs/svm.hpp"
#include "svmcs/synthetic.hpp"
#include "svmcs/tuning.hpp"

namespace svmcs {

// ---------------------------------------------------------------------------
// Grid-size rules

enum class GridSizeRule { log_linear, log_exponential };

// log_linear: round(500 ln n); log_exponential: round(6^(ln n)).
inline std::size_t grid_size_rule(GridSizeRule rule, std::size_t n) {
  require(n >= 2, errc::invalid_argument, "grid-size rules need n >= 2");
  const double ln = std::log(static_cast<double>(n));
  const double v = rule == GridSizeRule::log_linear ? 500.0 * ln : std::pow(6.0, ln);
  return static_cast<std::size_t>(std::llround(v));
}

inline GridSizeRule parse_grid_size_rule(const std::string& s) {
  if (s == "log-linear" || s == "loglinear") return GridSizeRule::log_linear;
  if (s == "log-exponential" || s == "logexponential") return GridSizeRule::log_exponential;
  fail(errc::invalid_argument, "unknown grid-size rule '" + s + "'");
}

inline std::string to_string(GridSizeRule r) {
  return r == GridSizeRule::log_linear ? "log-linear" : "log-exponential";
}

// ---------------------------------------------------------------------------
// Configuration

enum class TuningMode { auto_sigma, spacing, fixed };

inline TuningMode parse_tuning_mode(const std::string& s) {
  if (s == "auto") return TuningMode::auto_sigma;
  if (s == "spacing") return TuningMode::spacing;
  if (s == "fixed") return TuningMode::fixed;
  fail(errc::invalid_argument, "unknown tuning mode '" + s + "' (auto, spacing, fixed)");
}

inline std::string to_string(TuningMode m) {
  switch (m) {
    case TuningMode::auto_sigma: return "auto";
    case TuningMode::spacing: return "spacing";
    case TuningMode::fixed: return "fixed";
  }
  return "?";
}

enum class ExperimentKind { synthetic, ols };

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::synthetic;
  SequenceKind kind = SequenceKind::sobol();
  GridSizeRule rule = GridSizeRule::log_linear;
  std::size_t grid_size = 0;  // 0 selects the rule
  std::size_t n = 500;
  std::vector<double> splits{0.8};
  std::size_t iterations = 1;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  TuningMode tuning = TuningMode::auto_sigma;
  double spacing_factor = 1.0;
  double sigma2 = 0.0;  // fixed tuning only
  double c = 10.0;      // spacing and fixed tuning
  double alpha = 0.05;
  std::size_t dim = 5;          // ols: coefficients including the intercept
  double box_halfwidth = 5.6;   // ols: grid box is beta_hat +- halfwidth * se
  double noise_scale = -1.0;    // synthetic: negative selects 0.2 diam / sqrt(n)
  std::size_t eval_count = 10000;  // synthetic: independent evaluation points
  std::size_t threads = 0;
  bool svg = true;

  std::size_t resolved_grid_size() const {
    return grid_size > 0 ? grid_size : grid_size_rule(rule, n);
  }

  void validate() const {
    require(!splits.empty(), errc::invalid_argument, "need at least one split");
    for (double s : splits)
      require(s > 0.0 && s < 1.0, errc::invalid_argument, "split fraction must lie in (0,1)");
    require(iterations >= 1, errc::invalid_argument, "iteration count must be >= 1");
    require(n >= 2, errc::invalid_argument, "sample size n must be >= 2");
    require(alpha > 0.0 && alpha < 1.0, errc::invalid_argument, "alpha must lie in (0,1)");
    require(spacing_factor > 0.0, errc::invalid_argument, "spacing factor must be positive");
    require(c > 0.0, errc::invalid_argument, "C must be positive");
    if (tuning == TuningMode::fixed)
      require(sigma2 > 0.0, errc::invalid_argument, "fixed tuning needs sigma2 > 0");
    require(box_halfwidth > 0.0, errc::invalid_argument, "box half-width must be positive");
    if (experiment == ExperimentKind::ols)
      require(dim >= 1 && dim < n, errc::invalid_argument, "ols needs 1 <= dim < n");
    resolved_grid_size();
  }
};

// Preset matching the two studies; `apply_config` then overrides fields.
inline ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  if (kind == ExperimentKind::ols) {
    c.kind = SequenceKind::monte_carlo(0);
    c.rule = GridSizeRule::log_exponential;
    c.grid_size = 8000;
    c.n = 500;
    c.splits = {0.05, 0.2, 0.5, 0.8};
    c.iterations = 100;
    c.tuning = TuningMode::spacing;
    c.spacing_factor = 0.5;
    c.c = 10.0;
  } else {
    c.kind = SequenceKind::sobol();
    c.rule = GridSizeRule::log_linear;
    c.n = 5000;
    c.tuning = TuningMode::spacing;
    c.spacing_factor = 1.0;
    c.c = 1000.0;
  }
  return c;
}

inline void apply_config(ExperimentConfig& c, const KeyValueConfig& kv) {
  if (auto v = kv.get("experiment")) {
    if (*v == "synthetic")
      c.experiment = ExperimentKind::synthetic;
    else if (*v == "ols")
      c.experiment = ExperimentKind::ols;
    else
      fail(errc::invalid_argument, "unknown experiment '" + *v + "'");
  }
  if (auto v = kv.get_count("seed")) c.seed = *v;
  if (auto v = kv.get("kind")) c.kind = parse_sequence_kind(*v, c.seed);
  if (auto v = kv.get("grid_rule")) c.rule = parse_grid_size_rule(*v);
  if (auto v = kv.get_count("grid_size")) c.grid_size = *v;
  if (auto v = kv.get_count("n")) c.n = *v;
  if (auto v = kv.get_list("splits")) c.splits = *v;
  if (auto v = kv.get_count("iterations")) c.iterations = *v;
  if (auto v = kv.get("out")) c.out_dir = *v;
  if (auto v = kv.get("tuning")) c.tuning = parse_tuning_mode(*v);
  if (auto v = kv.get_double("spacing_factor")) c.spacing_factor = *v;
  if (auto v = kv.get_double("sigma2")) c.sigma2 = *v;
  if (auto v = kv.get_double("c")) c.c = *v;
  if (auto v = kv.get_double("alpha")) c.alpha = *v;
  if (auto v = kv.get_count("dim")) c.dim = *v;
  if (auto v = kv.get_double("box_halfwidth")) c.box_halfwidth = *v;
  if (auto v = kv.get_double("noise_scale")) c.noise_scale = *v;
  if (auto v = kv.get_count("eval_count")) c.eval_count = *v;
  if (auto v = kv.get_count("threads")) c.threads = *v;
  if (auto v = kv.get("svg")) c.svg = (*v == "1" || *v == "true" || *v == "yes");
  for (const auto& k : kv.unused_keys()) fail(errc::invalid_argument, "unknown config key '" + k + "'");
}

inline std::string describe(const ExperimentConfig& c) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "experiment = " << (c.experiment == ExperimentKind::ols ? "ols" : "synthetic") << '\n'
      << "kind = " << to_string(c.kind) << '\n'
      << "grid_rule = " << to_string(c.rule) << '\n'
      << "grid_size = " << c.grid_size << '\n'
      << "n = " << c.n << '\n'
      << "splits = ";
  for (std::size_t i = 0; i < c.splits.size(); ++i) out << (i ? "," : "") << c.splits[i];
  out << '\n'
      << "iterations = " << c.iterations << '\n'
      << "seed = " << c.seed << '\n'
      << "tuning = " << to_string(c.tuning) << '\n'
      << "spacing_factor = " << c.spacing_factor << '\n'
      << "sigma2 = " << c.sigma2 << '\n'
      << "c = " << c.c << '\n'
      << "alpha = " << c.alpha << '\n'
      << "dim = " << c.dim << '\n'
      << "box_halfwidth = " << c.box_halfwidth << '\n'
      << "noise_scale = " << c.noise_scale << '\n'
      << "eval_count = " << c.eval_count << '\n';
  return out.str();
}

// ---------------------------------------------------------------------------
// Shared pieces

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline KernelParams choose_params(const LabeledGrid& train, const Box& box, std::size_t grid_count,
                                  const ExperimentConfig& cfg) {
  switch (cfg.tuning) {
    case TuningMode::auto_sigma: return auto_sigma(train);
    case TuningMode::spacing: return spacing_sigma(box, grid_count, cfg.spacing_factor, cfg.c);
    case TuningMode::fixed: {
      KernelParams p{cfg.sigma2, cfg.c};
      p.validate();
      return p;
    }
  }
  fail(errc::invalid_argument, "unknown tuning mode");
}

// Marks for a prediction scored against a reference label.
enum class ErrorClass { inside_correct, outside_correct, red_cross, blue_cross };

inline ErrorClass classify_error(Label reference, Label predicted) {
  if (reference == Label::inside)
    return predicted == Label::inside ? ErrorClass::inside_correct : ErrorClass::blue_cross;
  return predicted == Label::inside ? ErrorClass::red_cross : ErrorClass::outside_correct;
}

inline const char* to_string(ErrorClass e) {
  switch (e) {
    case ErrorClass::inside_correct: return "inside-correct";
    case ErrorClass::outside_correct: return "outside-correct";
    case ErrorClass::red_cross: return "red-cross";
    case ErrorClass::blue_cross: return "blue-cross";
  }
  return "?";
}

inline double agreement(std::span<const Label> a, std::span<const Label> b) {
  require(a.size() == b.size(), errc::invalid_argument, "label lists differ in length");
  if (a.empty()) return 1.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < a.size(); ++i) ok += a[i] == b[i] ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(a.size());
}

inline std::optional<Box> inside_box(const PointSet& pts, std::span<const Label> labels) {
  PointSet in(pts.dim());
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (labels[i] == Label::inside) in.push_back(pts[i]);
  if (in.size() < 2) return std::nullopt;
  try {
    return smallest_enclosing_box(in);
  } catch (const error&) {
    return std::nullopt;
  }
}

inline std::string box_string(const std::optional<Box>& box) {
  if (!box) return "none";
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t k = 0; k < box->dim(); ++k)
    out << (k ? ";" : "") << '[' << box->lower()[k] << ' ' << box->upper()[k] << ']';
  return out.str();
}

// ---------------------------------------------------------------------------
// Planar region study

struct SyntheticReport {
  std::size_t n = 0;
  std::size_t grid_size = 0;
  double noise_scale = 0.0;
  KernelParams params{};
  std::size_t l0 = 0, l1 = 0;
  std::size_t support_vectors = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double train_accuracy_estimate = 0.0;  // against the labels trained on
  double train_accuracy_truth = 0.0;
  double test_accuracy_estimate = 0.0;
  double test_accuracy_truth = 0.0;
  double capture_rate = 0.0;             // truly-inside test points predicted inside
  double mean_error_distance = 0.0;      // test errors vs truth, distance to boundary
  double max_error_distance = 0.0;
  double spacing = 0.0;
  std::optional<Box> inside_box;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
};

struct SyntheticPoint {
  bool test = false;
  double x = 0.0, y = 0.0;
  Label estimated = Label::outside;
  Label truth = Label::outside;
  Label predicted = Label::outside;
};

struct SyntheticRun {
  SyntheticReport report;
  std::vector<SyntheticPoint> points;
};

inline SyntheticRun run_synthetic(const ExperimentConfig& cfg) {
  cfg.validate();
  const SyntheticRegion truth;
  const Box domain = SyntheticRegion::domain();
  SyntheticRun run;
  auto& rep = run.report;
  rep.n = cfg.n;
  rep.grid_size = cfg.resolved_grid_size();
  rep.noise_scale = cfg.noise_scale >= 0.0
                        ? cfg.noise_scale
                        : SyntheticCriterion::noise_scale_for(truth, static_cast<double>(cfg.n));
  const SyntheticCriterion crit(truth, rep.noise_scale, cfg.seed);

  const Grid grid = generate(cfg.kind, domain, rep.grid_size);
  const LabeledGrid labeled = label_grid(crit, grid, cfg.threads);
  rep.l0 = labeled.l0();
  rep.l1 = labeled.l1();
  if (!labeled.both_classes())
    fail(errc::degenerate_training,
         "labeled grid has a single class; configuration:\n" + describe(cfg));
  rep.params = choose_params(labeled, domain, grid.count(), cfg);
  rep.spacing = typical_spacing(domain, grid.count());

  auto t0 = Clock::now();
  const TrainedClassifier clf = train(labeled, rep.params);
  rep.train_seconds = seconds_since(t0);
  rep.support_vectors = clf.support_vectors().size();
  rep.train_size = labeled.size();

  const Grid eval = cfg.eval_count > 0
                        ? generate(SequenceKind::monte_carlo(seq::mix64(cfg.seed ^ 0x5eedULL)),
                                   domain, cfg.eval_count)
                        : Grid(domain, cfg.kind, PointSet(2));
  t0 = Clock::now();
  const auto train_pred = batch_predict(clf, grid, cfg.threads);
  const auto eval_pred = batch_predict(clf, eval, cfg.threads);
  rep.predict_seconds = seconds_since(t0);
  rep.test_size = eval.count();

  std::vector<Label> train_truth, eval_est, eval_truth;
  for (std::size_t i = 0; i < grid.count(); ++i) {
    const auto p = grid.points()[i];
    train_truth.push_back(crit.truly_inside(p) ? Label::inside : Label::outside);
    run.points.push_back({false, p[0], p[1], labeled.labels()[i], train_truth.back(), train_pred[i]});
  }
  for (std::size_t i = 0; i < eval.count(); ++i) {
    const auto p = eval.points()[i];
    eval_est.push_back(label(crit, p));
    eval_truth.push_back(crit.truly_inside(p) ? Label::inside : Label::outside);
    run.points.push_back({true, p[0], p[1], eval_est.back(), eval_truth.back(), eval_pred[i]});
  }
  rep.train_accuracy_estimate = agreement(labeled.labels(), train_pred);
  rep.train_accuracy_truth = agreement(train_truth, train_pred);
  rep.test_accuracy_estimate = agreement(eval_est, eval_pred);
  rep.test_accuracy_truth = agreement(eval_truth, eval_pred);

  std::size_t true_in = 0, captured = 0;
  for (std::size_t i = 0; i < eval.count(); ++i) {
    if (eval_truth[i] != Label::inside) continue;
    ++true_in;
    captured += eval_pred[i] == Label::inside ? 1 : 0;
  }
  rep.capture_rate = true_in ? static_cast<double>(captured) / static_cast<double>(true_in) : 0.0;

  std::vector<double> err_dist;
  {
    const BoundaryDistance dist(truth.boundary_samples(4000));
    for (std::size_t i = 0; i < eval.count(); ++i)
      if (eval_truth[i] != eval_pred[i]) err_dist.push_back(dist(eval.points()[i]));
  }
  if (!err_dist.empty()) {
    rep.mean_error_distance =
        std::accumulate(err_dist.begin(), err_dist.end(), 0.0) / static_cast<double>(err_dist.size());
    rep.max_error_distance = *std::max_element(err_dist.begin(), err_dist.end());
  }

  PointSet all(2);
  std::vector<Label> all_pred;
  for (const auto& p : run.points) {
    all.push_back(std::vector<double>{p.x, p.y});
    all_pred.push_back(p.predicted);
  }
  rep.inside_box = inside_box(all, all_pred);
  return run;
}

inline void write_synthetic_points(std::ostream& out, const std::vector<SyntheticPoint>& pts) {
  out << "set,x0,x1,estimated,true,predicted,class_vs_estimate,class_vs_true\n";
  out << std::setprecision(csv_digits);
  for (const auto& p : pts)
    out << (p.test ? "test" : "train") << ',' << p.x << ',' << p.y << ',' << to_int(p.estimated)
        << ',' << to_int(p.truth) << ',' << to_int(p.predicted) << ','
        << to_string(classify_error(p.estimated, p.predicted)) << ','
        << to_string(classify_error(p.truth, p.predicted)) << '\n';
}

inline void write_synthetic_report(std::ostream& out, const SyntheticReport& r) {
  out << std::setprecision(17) << "key,value\n"
      << "n," << r.n << '\n'
      << "grid_size," << r.grid_size << '\n'
      << "noise_scale," << r.noise_scale << '\n'
      << "sigma2," << r.params.sigma2 << '\n'
      << "c," << r.params.c << '\n'
      << "l0," << r.l0 << '\n'
      << "l1," << r.l1 << '\n'
      << "support_vectors," << r.support_vectors << '\n'
      << "train_size," << r.train_size << '\n'
      << "test_size," << r.test_size << '\n'
      << "train_accuracy_estimate," << r.train_accuracy_estimate << '\n'
      << "train_accuracy_truth," << r.train_accuracy_truth << '\n'
      << "test_accuracy_estimate," << r.test_accuracy_estimate << '\n'
      << "test_accuracy_truth," << r.test_accuracy_truth << '\n'
      << "capture_rate," << r.capture_rate << '\n'
      << "mean_error_distance," << r.mean_error_distance << '\n'
      << "max_error_distance," << r.max_error_distance << '\n'
      << "spacing," << r.spacing << '\n'
      << "inside_box," << box_string(r.inside_box) << '\n'
      << "train_seconds," << r.train_seconds << '\n'
      << "predict_seconds," << r.predict_seconds << '\n';
}

// Two panels over the training grid: scored against the estimated labels
// (left) and the true region (right). Red = predicted inside, blue =
// predicted outside, crosses = errors.
inline void write_synthetic_svg(std::ostream& out, const std::vector<SyntheticPoint>& pts,
                                const Box& domain) {
  const double panel = 400.0, margin = 20.0;
  const double w = 2 * panel + 3 * margin, h = panel + 2 * margin;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << std::fixed << std::setprecision(2);
  for (int side = 0; side < 2; ++side) {
    const double ox = margin + side * (panel + margin), oy = margin;
    out << "<rect x=\"" << ox << "\" y=\"" << oy << "\" width=\"" << panel << "\" height=\""
        << panel << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (const auto& p : pts) {
      if (p.test) continue;
      const double sx = ox + panel * (p.x - domain.lower()[0]) / domain.width(0);
      const double sy = oy + panel * (1.0 - (p.y - domain.lower()[1]) / domain.width(1));
      const Label ref = side == 0 ? p.estimated : p.truth;
      const char* color = p.predicted == Label::inside ? "red" : "blue";
      if (ref == p.predicted) {
        out << "<circle cx=\"" << sx << "\" cy=\"" << sy << "\" r=\"1.5\" fill=\"" << color
            << "\"/>\n";
      } else {
        out << "<path d=\"M" << sx - 3 << ' ' << sy - 3 << "L" << sx + 3 << ' ' << sy + 3 << "M"
            << sx - 3 << ' ' << sy + 3 << "L" << sx + 3 << ' ' << sy - 3 << "\" stroke=\""
            << color << "\" stroke-width=\"1.2\"/>\n";
      }
    }
  }
  out << "</svg>\n";
}

inline void write_synthetic_outputs(const SyntheticRun& run, const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir(cfg.out_dir);
  {
    auto out = open_output((dir / "synthetic_points.csv").string());
    write_synthetic_points(out, run.points);
  }
  {
    auto out = open_output((dir / "synthetic_report.csv").string());
    write_synthetic_report(out, run.report);
  }
  if (cfg.svg) {
    auto out = open_output((dir / "synthetic.svg").string());
    write_synthetic_svg(out, run.points, SyntheticRegion::domain());
  }
}

// ---------------------------------------------------------------------------
// OLS confidence-ellipsoid study

struct OlsIteration {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::size_t inside = 0;  // grid points labeled +1
  std::vector<double> test_accuracy;  // per split
  std::vector<int> captured;          // per split, beta0 predicted +1
  std::vector<std::size_t> train_size;
  std::vector<std::size_t> support_vectors;
  std::vector<double> train_seconds;
  std::vector<double> predict_seconds;
};

struct OlsSplitSummary {
  double split = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double test_accuracy = 0.0;
  double capture_rate = 0.0;
  double mean_support_vectors = 0.0;
  double train_seconds = 0.0;    // mean per iteration
  double predict_seconds = 0.0;  // mean per iteration
};

struct OlsReport {
  std::size_t grid_size = 0;
  double threshold = 0.0;
  double inside_fraction = 0.0;
  std::vector<OlsSplitSummary> splits;
  std::vector<OlsIteration> iterations;
};

// Per-iteration seed; iterations are independent of each other and of the
// number of workers.
inline std::uint64_t iteration_seed(std::uint64_t seed, std::size_t i) {
  return seq::mix64(seq::mix64(seed) + static_cast<std::uint64_t>(i));
}

inline OlsIteration run_ols_iteration(const ExperimentConfig& cfg, double threshold,
                                      std::size_t index) {
  OlsIteration it;
  it.index = index;
  it.seed = iteration_seed(cfg.seed, index);
  std::mt19937_64 rng(it.seed);
  std::uniform_real_distribution<double> unif(-2.0, 2.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto k = static_cast<Eigen::Index>(cfg.dim);
  const auto n = static_cast<Eigen::Index>(cfg.n);

  Eigen::VectorXd beta0(k);
  for (Eigen::Index j = 0; j < k; ++j) beta0[j] = unif(rng);
  Eigen::MatrixXd X(n, k);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < k; ++j) X(i, j) = normal(rng);
  }
  for (Eigen::Index i = 0; i < n; ++i) y[i] = X.row(i).dot(beta0) + normal(rng);

  const OlsFit fit = ols_fit(X, y);
  const Eigen::MatrixXd precision = fit.cov.inverse();
  const EllipsoidCriterion crit(fit.beta, 0.5 * (precision + precision.transpose()), threshold);
  point lo(cfg.dim), hi(cfg.dim);
  for (std::size_t j = 0; j < cfg.dim; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double se = std::sqrt(fit.cov(jj, jj));
    lo[j] = fit.beta[jj] - cfg.box_halfwidth * se;
    hi[j] = fit.beta[jj] + cfg.box_halfwidth * se;
  }
  const Box box(lo, hi);
  SequenceKind kind = cfg.kind;
  if (kind.stochastic()) kind.seed = it.seed;
  const Grid grid = generate(kind, box, cfg.resolved_grid_size());
  const LabeledGrid labeled = label_grid(crit, grid, 1);
  it.inside = labeled.l1();

  std::vector<std::size_t> perm(grid.count());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const point b0(beta0.data(), beta0.data() + k);

  for (double split : cfg.splits) {
    const auto n_train = static_cast<std::size_t>(std::llround(split * static_cast<double>(grid.count())));
    const std::span<const std::size_t> all(perm);
    const LabeledGrid train_set = labeled.select(all.subspan(0, n_train));
    const LabeledGrid test_set = labeled.select(all.subspan(n_train));
    std::vector<Label> pred;
    Label at_b0 = Label::outside;
    double t_train = 0.0, t_pred = 0.0;
    std::size_t svs = 0;
    if (train_set.both_classes()) {
      auto t0 = Clock::now();
      const TrainedClassifier clf = train(train_set, choose_params(train_set, box, grid.count(), cfg));
      t_train = seconds_since(t0);
      svs = clf.support_vectors().size();
      t0 = Clock::now();
      pred = batch_predict(clf, test_set.points(), 1);
      t_pred = seconds_since(t0);
      at_b0 = clf.predict(b0);
    } else {
      // A single-class training set yields the constant classifier.
      const Label only = train_set.l1() > 0 ? Label::inside : Label::outside;
      pred.assign(test_set.size(), only);
      at_b0 = only;
    }
    it.test_accuracy.push_back(agreement(test_set.labels(), pred));
    it.captured.push_back(at_b0 == Label::inside ? 1 : 0);
    it.train_size.push_back(n_train);
    it.support_vectors.push_back(svs);
    it.train_seconds.push_back(t_train);
    it.predict_seconds.push_back(t_pred);
  }
  return it;
}

inline OlsReport run_ols(const ExperimentConfig& cfg) {
  cfg.validate();
  OlsReport rep;
  rep.grid_size = cfg.resolved_grid_size();
  rep.threshold = stats::chi2_quantile(static_cast<int>(cfg.dim), 1.0 - cfg.alpha);
  rep.iterations.resize(cfg.iterations);
  parallel_for(
      cfg.iterations,
      [&](std::size_t i) { rep.iterations[i] = run_ols_iteration(cfg, rep.threshold, i); },
      cfg.threads);

  const auto iters = static_cast<double>(cfg.iterations);
  for (const auto& it : rep.iterations)
    rep.inside_fraction += static_cast<double>(it.inside) / static_cast<double>(rep.grid_size) / iters;
  for (std::size_t s = 0; s < cfg.splits.size(); ++s) {
    OlsSplitSummary sum;
    sum.split = cfg.splits[s];
    sum.train_size = rep.iterations[0].train_size[s];
    sum.test_size = rep.grid_size - sum.train_size;
    for (const auto& it : rep.iterations) {
      sum.test_accuracy += it.test_accuracy[s] / iters;
      sum.capture_rate += it.captured[s] / iters;
      sum.mean_support_vectors += static_cast<double>(it.support_vectors[s]) / iters;
      sum.train_seconds += it.train_seconds[s] / iters;
      sum.predict_seconds += it.predict_seconds[s] / iters;
    }
    rep.splits.push_back(sum);
  }
  return rep;
}

// One row per split, in the layout of the published results table.
inline void write_ols_table(std::ostream& out, const OlsReport& r, std::size_t iterations) {
  out << "split,train_size,test_size,iterations,grid_size,threshold,inside_fraction,"
         "test_accuracy,capture_rate,mean_support_vectors,train_seconds,predict_seconds\n";
  out << std::setprecision(17);
  for (const auto& s : r.splits)
    out << s.split << ',' << s.train_size << ',' << s.test_size << ',' << iterations << ','
        << r.grid_size << ',' << r.threshold << ',' << r.inside_fraction << ',' << s.test_accuracy
        << ',' << s.capture_rate << ',' << s.mean_support_vectors << ',' << s.train_seconds << ','
        << s.predict_seconds << '\n';
}

inline void write_ols_iterations(std::ostream& out, const OlsReport& r,
                                 const std::vector<double>& splits) {
  out << "iteration,seed,split,inside,train_size,test_accuracy,captured,support_vectors,"
         "train_seconds,predict_seconds\n";
  out << std::setprecision(17);
  for (const auto& it : r.iterations)
    for (std::size_t s = 0; s < splits.size(); ++s)
      out << it.index << ',' << it.seed << ',' << splits[s] << ',' << it.inside << ','
          << it.train_size[s] << ',' << it.test_accuracy[s] << ',' << it.captured[s] << ','
          << it.support_vectors[s] << ',' << it.train_seconds[s] << ',' << it.predict_seconds[s]
          << '\n';
}

inline void write_ols_outputs(const OlsReport& r, const ExperimentConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  const std::filesystem::path dir(cfg.out_dir);
  {
    auto out = open_output((dir / "ols_table.csv").string());
    write_ols_table(out, r, cfg.iterations);
  }
  {
    auto out = open_output((dir / "ols_iterations.csv").string());
    write_ols_iterations(out, r, cfg.splits);
  }
}

// ---------------------------------------------------------------------------
// Dense classification with a trained classifier

struct DenseResult {
  std::vector<Label> labels;
  std::optional<Box> inside_box;
  std::size_t inside = 0;
  std::size_t extrapolated = 0;  // points outside the classifier's domain
  double seconds = 0.0;
  double seconds_per_point = 0.0;
};

template <Predictor P>
DenseResult classify_dense(const P& clf, const PointSet& pts, const std::optional<Box>& domain,
                           std::size_t threads = 0) {
  require(pts.dim() == clf.dim(), errc::invalid_argument,
          "grid dimension does not match the classifier");
  DenseResult res;
  const auto t0 = Clock::now();
  res.labels = batch_predict(clf, pts, threads);
  res.seconds = seconds_since(t0);
  res.seconds_per_point = pts.empty() ? 0.0 : res.seconds / static_cast<double>(pts.size());
  for (Label l : res.labels) res.inside += l == Label::inside ? 1 : 0;
  res.inside_box = inside_box(pts, res.labels);
  if (domain) {
    for (std::size_t i = 0; i < pts.size(); ++i) res.extrapolated += domain->contains(pts[i]) ? 0 : 1;
    if (res.extrapolated > 0)
      warn(std::to_string(res.extrapolated) + " of " + std::to_string(pts.size()) +
           " points lie outside the classifier's training box; predictions there "
           "extrapolate toward the sign of the bias");
  }
  return res;
}

}  // namespace svmcs
