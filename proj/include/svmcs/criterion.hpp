#pragma once

#include <Eigen/Dense>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "svmcs/error.hpp"
#include "svmcs/geometry.hpp"
#include "svmcs/grid.hpp"
#include "svmcs/nnls.hpp"
#include "svmcs/parallel.hpp"
#include "svmcs/stats.hpp"

namespace svmcs {

// +1: inside the confidence set, -1: outside.
enum class Label : int { outside = -1, inside = 1 };

inline int to_int(Label l) { return static_cast<int>(l); }
inline double to_double(Label l) { return static_cast<double>(static_cast<int>(l)); }

// Strict sign with sgn(0) := -1.
inline Label sign_label(double v) { return v > 0.0 ? Label::inside : Label::outside; }

inline Label label_from_int(int v) {
  if (v == 1) return Label::inside;
  if (v == -1) return Label::outside;
  fail(errc::format_error, "label must be +1 or -1, got " + std::to_string(v));
}

namespace detail {

struct CoordsHash {
  std::size_t dim;
  const double* base;
  std::size_t operator()(std::size_t i) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::size_t k = 0; k < dim; ++k) {
      double v = base[i * dim + k];
      if (v == 0.0) v = 0.0;  // fold -0.0 onto +0.0
      std::uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      h = seq::mix64(h ^ bits);
    }
    return static_cast<std::size_t>(h);
  }
};

struct CoordsEqual {
  std::size_t dim;
  const double* base;
  bool operator()(std::size_t a, std::size_t b) const {
    for (std::size_t k = 0; k < dim; ++k)
      if (base[a * dim + k] != base[b * dim + k]) return false;
    return true;
  }
};

}  // namespace detail

// Throws duplicate-point if two points are identical.
inline void check_distinct(const PointSet& pts) {
  if (pts.size() < 2) return;
  const double* base = pts.coords().data();
  std::unordered_set<std::size_t, detail::CoordsHash, detail::CoordsEqual> seen(
      pts.size() * 2, detail::CoordsHash{pts.dim(), base}, detail::CoordsEqual{pts.dim(), base});
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto [it, inserted] = seen.insert(i);
    if (!inserted)
      fail(errc::duplicate_point, "points " + std::to_string(*it) + " and " + std::to_string(i) +
                                      " are identical");
  }
}

// Training set: points with aligned +1/-1 labels, no duplicate points.
class LabeledGrid {
 public:
  LabeledGrid() = default;
  LabeledGrid(PointSet points, std::vector<Label> labels)
      : points_(std::move(points)), labels_(std::move(labels)) {
    require(points_.size() == labels_.size(), errc::invalid_argument,
            "points and labels differ in length");
    check_distinct(points_);
    for (Label l : labels_) (l == Label::inside ? l1_ : l0_) += 1;
  }

  const PointSet& points() const noexcept { return points_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t dim() const noexcept { return points_.dim(); }
  std::size_t l0() const noexcept { return l0_; }  // count of -1
  std::size_t l1() const noexcept { return l1_; }  // count of +1
  bool both_classes() const noexcept { return l0_ > 0 && l1_ > 0; }

  // Subset in the given index order.
  LabeledGrid select(std::span<const std::size_t> idx) const {
    PointSet p(dim());
    p.reserve(idx.size());
    std::vector<Label> l;
    l.reserve(idx.size());
    for (std::size_t i : idx) {
      p.push_back(points_[i]);
      l.push_back(labels_[i]);
    }
    return {std::move(p), std::move(l)};
  }

 private:
  PointSet points_;
  std::vector<Label> labels_;
  std::size_t l0_ = 0;
  std::size_t l1_ = 0;
};

// A membership test: theta is inside iff statistic(theta) < threshold().
template <class C>
concept Criterion = requires(const C& c, std::span<const double> theta) {
  { c.statistic(theta) } -> std::convertible_to<double>;
  { c.threshold() } -> std::convertible_to<double>;
  { c.dim() } -> std::convertible_to<std::size_t>;
};

template <Criterion C>
Label label(const C& criterion, std::span<const double> theta) {
  require(theta.size() == criterion.dim(), errc::invalid_argument,
          "theta dimension does not match the criterion");
  return criterion.statistic(theta) < criterion.threshold() ? Label::inside : Label::outside;
}

template <Criterion C>
LabeledGrid label_points(const C& criterion, const PointSet& pts, std::size_t threads = 1) {
  require(!pts.empty(), errc::invalid_argument, "cannot label an empty grid");
  std::vector<Label> labels(pts.size(), Label::outside);
  parallel_for(
      pts.size(),
      [&](std::size_t i) {
        try {
          labels[i] = label(criterion, pts[i]);
        } catch (const error& e) {
          throw point_error(e.code(), i, e.what());
        }
      },
      threads);
  return {pts, std::move(labels)};
}

template <Criterion C>
LabeledGrid label_grid(const C& criterion, const Grid& grid, std::size_t threads = 1) {
  return label_points(criterion, grid.points(), threads);
}

// ---------------------------------------------------------------------------
// Moment inequalities

struct MomentEstimate {
  Eigen::VectorXd mean;  // sample moments, model predicts >= 0
  Eigen::MatrixXd cov;   // sample covariance of the moments
};

// n * min_{t >= 0} (m - t)' V^{-1} (m - t), solved as NNLS on the
// Cholesky-whitened residual ||L^{-1} m - L^{-1} t||^2.
inline double qhat(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, double n) {
  const Eigen::Index p = mean.size();
  require(p >= 1, errc::invalid_argument, "need at least one moment");
  require(cov.rows() == p && cov.cols() == p, errc::invalid_argument,
          "covariance shape does not match the moment vector");
  if (!cov.isApprox(cov.transpose(), 1e-10))
    fail(errc::numerical_conditioning, "moment covariance is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success || llt.matrixL().toDenseMatrix().diagonal().minCoeff() <= 0.0)
    fail(errc::numerical_conditioning, "moment covariance is not positive definite");
  if ((mean.array() >= 0.0).all()) return 0.0;

  const Eigen::MatrixXd Linv =
      llt.matrixL().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::VectorXd b = Linv * mean;
  const NnlsResult r = nnls(Linv, b);
  return n * r.residual_norm2;
}

inline MomentEstimate estimate_moments(const Eigen::MatrixXd& per_obs) {
  const Eigen::Index n = per_obs.rows();
  require(n >= 2, errc::invalid_argument, "need at least two observations");
  MomentEstimate est;
  est.mean = per_obs.colwise().mean().transpose();
  const Eigen::MatrixXd centered = per_obs.rowwise() - est.mean.transpose();
  est.cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  return est;
}

class MomentCriterion {
 public:
  using EstimateFn = std::function<MomentEstimate(std::span<const double>)>;
  using MomentFn = std::function<Eigen::VectorXd(std::span<const double>)>;
  using CovarianceFn = std::function<Eigen::MatrixXd(std::span<const double>)>;

  MomentCriterion(EstimateFn estimate, std::size_t dim, int moments, double n, double alpha)
      : estimate_(std::move(estimate)), dim_(dim), moments_(moments), n_(n), alpha_(alpha) {
    require(dim >= 1, errc::invalid_argument, "parameter dimension must be >= 1");
    require(n > 0.0, errc::invalid_argument, "sample size must be positive");
    critical_ = stats::critical_value(moments, alpha);
  }

  MomentCriterion(MomentFn moment_fn, CovarianceFn covariance_fn, std::size_t dim, int moments,
                  double n, double alpha)
      : MomentCriterion(
            [m = std::move(moment_fn), v = std::move(covariance_fn)](std::span<const double> t) {
              return MomentEstimate{m(t), v(t)};
            },
            dim, moments, n, alpha) {}

  double statistic(std::span<const double> theta) const {
    const MomentEstimate est = estimate_(theta);
    require(est.mean.size() == moments_, errc::invalid_argument,
            "moment function returned the wrong number of moments");
    return qhat(est.mean, est.cov, n_);
  }
  double threshold() const noexcept { return critical_; }
  std::size_t dim() const noexcept { return dim_; }
  int moments() const noexcept { return moments_; }
  double alpha() const noexcept { return alpha_; }
  double sample_size() const noexcept { return n_; }

 private:
  EstimateFn estimate_;
  std::size_t dim_;
  int moments_;
  double n_;
  double alpha_;
  double critical_ = 0.0;
};

// Linear model with an interval-observed outcome, yl <= x'theta + e <= yu.
// Each moment pairs a side with a nonnegative instrument column of x:
//   upper: E[(yu - x'theta) x_j] >= 0,  lower: E[(x'theta - yl) x_j] >= 0.
struct IntervalRegressionData {
  enum class Side { upper, lower };
  Eigen::MatrixXd x;  // n x d, nonnegative columns
  Eigen::VectorXd yl;
  Eigen::VectorXd yu;
  std::vector<std::pair<Side, int>> moments;

  Eigen::MatrixXd moment_matrix(std::span<const double> theta) const {
    const Eigen::Map<const Eigen::VectorXd> t(theta.data(), static_cast<Eigen::Index>(theta.size()));
    const Eigen::VectorXd fit = x * t;
    Eigen::MatrixXd m(x.rows(), static_cast<Eigen::Index>(moments.size()));
    for (std::size_t j = 0; j < moments.size(); ++j) {
      const auto [side, col] = moments[j];
      if (side == Side::upper)
        m.col(j) = (yu - fit).cwiseProduct(x.col(col));
      else
        m.col(j) = (fit - yl).cwiseProduct(x.col(col));
    }
    return m;
  }
};

// Simulated interval data: x = (1, U(0,1)...), y* = x'theta0 + N(0,1),
// observed as [y* - U(0,width), y* + U(0,width)]. Moments cycle through
// upper/lower sides over the d instrument columns until p are chosen.
inline IntervalRegressionData simulate_interval_data(std::size_t n, const Eigen::VectorXd& theta0,
                                                     int p, double width, std::uint64_t seed) {
  require(n >= 2 && p >= 1, errc::invalid_argument, "need n >= 2 and p >= 1");
  const Eigen::Index d = theta0.size();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  IntervalRegressionData data;
  data.x.resize(static_cast<Eigen::Index>(n), d);
  data.yl.resize(static_cast<Eigen::Index>(n));
  data.yu.resize(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
    data.x(i, 0) = 1.0;
    for (Eigen::Index k = 1; k < d; ++k) data.x(i, k) = unif(rng);
    const double ystar = data.x.row(i).dot(theta0) + normal(rng);
    data.yl[i] = ystar - width * unif(rng);
    data.yu[i] = ystar + width * unif(rng);
  }
  for (int j = 0; j < p; ++j) {
    const auto side = (j % 2 == 0) ? IntervalRegressionData::Side::upper
                                   : IntervalRegressionData::Side::lower;
    data.moments.emplace_back(side, (j / 2) % static_cast<int>(d));
  }
  return data;
}

inline MomentCriterion make_moment_criterion(std::shared_ptr<const IntervalRegressionData> data,
                                             double alpha) {
  const auto dim = static_cast<std::size_t>(data->x.cols());
  const int p = static_cast<int>(data->moments.size());
  const double n = static_cast<double>(data->x.rows());
  return MomentCriterion(
      [data](std::span<const double> theta) {
        return estimate_moments(data->moment_matrix(theta));
      },
      dim, p, n, alpha);
}

// ---------------------------------------------------------------------------
// Confidence ellipsoid {theta : (theta - c)' P (theta - c) < threshold}

class EllipsoidCriterion {
 public:
  EllipsoidCriterion(Eigen::VectorXd center, Eigen::MatrixXd precision, double threshold)
      : center_(std::move(center)), precision_(std::move(precision)), threshold_(threshold) {
    const Eigen::Index d = center_.size();
    require(d >= 1, errc::invalid_argument, "ellipsoid dimension must be >= 1");
    require(precision_.rows() == d && precision_.cols() == d, errc::invalid_argument,
            "precision matrix shape does not match the center");
    require(threshold_ > 0.0, errc::invalid_argument, "ellipsoid threshold must be positive");
    if (!precision_.isApprox(precision_.transpose(), 1e-10))
      fail(errc::numerical_conditioning, "precision matrix is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(precision_);
    if (llt.info() != Eigen::Success)
      fail(errc::numerical_conditioning, "precision matrix is not positive definite");
  }

  // Disc / ball of the given radius.
  static EllipsoidCriterion ball(Eigen::VectorXd center, double radius) {
    const Eigen::Index d = center.size();
    return {std::move(center), Eigen::MatrixXd::Identity(d, d), radius * radius};
  }

  double statistic(std::span<const double> theta) const {
    const Eigen::Index d = center_.size();
    double q = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double ui = theta[i] - center_[i];
      double row = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) row += precision_(i, j) * (theta[j] - center_[j]);
      q += ui * row;
    }
    return q;
  }
  double threshold() const noexcept { return threshold_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(center_.size()); }
  const Eigen::VectorXd& center() const noexcept { return center_; }
  const Eigen::MatrixXd& precision() const noexcept { return precision_; }

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd precision_;
  double threshold_;
};

struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd cov;  // s^2 (X'X)^{-1}
};

inline OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  require(y.size() == n, errc::invalid_argument, "design and response differ in rows");
  require(k >= 1, errc::invalid_argument, "design needs at least one column");
  if (n <= k) fail(errc::singular_design, "need more observations than coefficients");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < k) fail(errc::singular_design, "design matrix is rank deficient");
  OlsFit fit;
  fit.beta = qr.solve(y);
  const double rss = (y - X * fit.beta).squaredNorm();
  const double s2 = rss / static_cast<double>(n - k);
  const Eigen::MatrixXd xtx = X.transpose() * X;
  fit.cov = s2 * xtx.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  fit.cov = 0.5 * (fit.cov + fit.cov.transpose());
  return fit;
}

// Type-erased criterion for configuration-driven callers.
class AnyCriterion {
 public:
  template <Criterion C>
  AnyCriterion(C c)  // NOLINT(google-explicit-constructor)
      : impl_(std::make_shared<Model<C>>(std::move(c))) {}

  double statistic(std::span<const double> theta) const { return impl_->statistic(theta); }
  double threshold() const { return impl_->threshold(); }
  std::size_t dim() const { return impl_->dim(); }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual double statistic(std::span<const double>) const = 0;
    virtual double threshold() const = 0;
    virtual std::size_t dim() const = 0;
  };
  template <class C>
  struct Model final : Concept {
    explicit Model(C c) : crit(std::move(c)) {}
    double statistic(std::span<const double> t) const override { return crit.statistic(t); }
    double threshold() const override { return crit.threshold(); }
    std::size_t dim() const override { return crit.dim(); }
    C crit;
  };
  std::shared_ptr<const Concept> impl_;
};

}  // namespace svmcs
