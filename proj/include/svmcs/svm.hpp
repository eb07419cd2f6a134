#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "svmcs/criterion.hpp"
#include "svmcs/error.hpp"
#include "svmcs/geometry.hpp"
#include "svmcs/grid.hpp"
#include "svmcs/kernel.hpp"
#include "svmcs/parallel.hpp"
#include "svmcs/smo.hpp"

namespace svmcs {

struct KernelParams {
  double sigma2 = 1.0;  // RBF bandwidth
  double c = 10.0;      // soft-margin trade-off

  void validate() const {
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
      fail(errc::invalid_argument, "sigma^2 must be positive and finite");
    if (!(c > 0.0) || !std::isfinite(c)) fail(errc::invalid_argument, "C must be positive");
  }
};

// f(x) = sum_i alpha_i y_i K(x_i, x) + b over the support vectors.
template <Kernel K>
class BasicClassifier {
 public:
  BasicClassifier(std::shared_ptr<const LabeledGrid> training, DualSolution solution, K kernel,
                  double c)
      : training_(std::move(training)), solution_(std::move(solution)), kernel_(kernel), c_(c) {
    require(training_->size() == solution_.alphas.size(), errc::invalid_argument,
            "dual solution does not match the training set");
    support_ = PointSet(training_->dim());
    for (std::size_t i : solution_.support_indices) {
      support_.push_back(training_->points()[i]);
      coef_.push_back(solution_.alphas[i] * to_double(training_->labels()[i]));
    }
    if (training_->size() >= 2) {
      try {
        domain_ = smallest_enclosing_box(training_->points());
      } catch (const error&) {
        domain_.reset();
      }
    }
  }

  double decision_value(std::span<const double> theta) const {
    require(theta.size() == dim(), errc::invalid_argument,
            "point dimension does not match the classifier");
    double f = solution_.bias;
    for (std::size_t s = 0; s < support_.size(); ++s) f += coef_[s] * kernel_(support_[s], theta);
    return f;
  }

  // sgn with sgn(0) = -1.
  Label predict(std::span<const double> theta) const { return sign_label(decision_value(theta)); }

  std::size_t dim() const noexcept { return training_->dim(); }
  const K& kernel() const noexcept { return kernel_; }
  double c() const noexcept { return c_; }
  double bias() const noexcept { return solution_.bias; }
  const DualSolution& solution() const noexcept { return solution_; }
  const LabeledGrid& training() const noexcept { return *training_; }
  const PointSet& support_vectors() const noexcept { return support_; }
  std::span<const double> dual_coefficients() const noexcept { return coef_; }
  const std::optional<Box>& domain() const noexcept { return domain_; }

  // Region the classifier was fit on; defaults to the training points' box.
  void set_domain(std::optional<Box> domain) { domain_ = std::move(domain); }

 private:
  std::shared_ptr<const LabeledGrid> training_;
  DualSolution solution_;
  K kernel_;
  double c_;
  PointSet support_;
  std::vector<double> coef_;  // alpha_i * y_i
  std::optional<Box> domain_;
};

// The pipeline classifier: RBF kernel evaluated over all support vectors at
// once. Coordinates are stored one column per dimension so the distance and
// exponential loops vectorize across support vectors.
class TrainedClassifier : public BasicClassifier<RbfKernel> {
 public:
  TrainedClassifier(std::shared_ptr<const LabeledGrid> training, DualSolution solution,
                    KernelParams params)
      : BasicClassifier(std::move(training), std::move(solution), RbfKernel(params.sigma2),
                        params.c),
        params_(params) {
    const PointSet& sv = support_vectors();
    const auto m = static_cast<Eigen::Index>(sv.size());
    columns_.resize(m, static_cast<Eigen::Index>(dim()));
    for (Eigen::Index s = 0; s < m; ++s)
      for (std::size_t k = 0; k < dim(); ++k)
        columns_(s, static_cast<Eigen::Index>(k)) = sv[static_cast<std::size_t>(s)][k];
    const auto coef = dual_coefficients();
    coef_ = Eigen::Map<const Eigen::ArrayXd>(coef.data(), m);
  }

  const KernelParams& params() const noexcept { return params_; }

  double decision_value(std::span<const double> theta) const {
    require(theta.size() == dim(), errc::invalid_argument,
            "point dimension does not match the classifier");
    if (columns_.rows() == 0) return bias();
    thread_local Eigen::ArrayXd d2;
    d2 = (columns_.col(0).array() - theta[0]).square();
    for (Eigen::Index k = 1; k < columns_.cols(); ++k)
      d2 += (columns_.col(k).array() - theta[static_cast<std::size_t>(k)]).square();
    // exp of a large negative argument is exactly zero, matching the kernel's cutoff
    return bias() + (coef_ * (d2 * -kernel().inv_two_sigma2()).exp()).sum();
  }

  Label predict(std::span<const double> theta) const { return sign_label(decision_value(theta)); }

 private:
  KernelParams params_;
  Eigen::MatrixXd columns_;  // support vectors, one row each
  Eigen::ArrayXd coef_;      // alpha_i * y_i
};

template <Kernel K>
BasicClassifier<K> train_with_kernel(const LabeledGrid& data, const K& kernel, double c,
                                     const SmoOptions& opt = {}) {
  auto training = std::make_shared<const LabeledGrid>(data);
  DualSolution sol = solve_dual(*training, kernel, c, opt);
  return {std::move(training), std::move(sol), kernel, c};
}

inline TrainedClassifier train(const LabeledGrid& data, const KernelParams& params,
                               const SmoOptions& opt = {}) {
  params.validate();
  auto training = std::make_shared<const LabeledGrid>(data);
  DualSolution sol = solve_dual(*training, RbfKernel(params.sigma2), params.c, opt);
  return {std::move(training), std::move(sol), params};
}

// sign(sum_i y_i K(s_i, theta)): every dual weight set to one and no offset.
class SimplifiedClassifier {
 public:
  SimplifiedClassifier(std::shared_ptr<const LabeledGrid> data, double sigma2)
      : data_(std::move(data)), kernel_(sigma2) {
    require(data_ && data_->size() >= 1, errc::invalid_argument,
            "simplified decision needs at least one labeled point");
  }

  double decision_value(std::span<const double> theta) const {
    require(theta.size() == data_->dim(), errc::invalid_argument,
            "point dimension does not match the data");
    double f = 0.0;
    for (std::size_t i = 0; i < data_->size(); ++i)
      f += to_double(data_->labels()[i]) * kernel_(data_->points()[i], theta);
    return f;
  }
  Label predict(std::span<const double> theta) const { return sign_label(decision_value(theta)); }
  std::size_t dim() const noexcept { return data_->dim(); }

 private:
  std::shared_ptr<const LabeledGrid> data_;
  RbfKernel kernel_;
};

inline Label simplified_decision(const LabeledGrid& data, double sigma2,
                                 std::span<const double> theta) {
  require(data.size() >= 1, errc::invalid_argument,
          "simplified decision needs at least one labeled point");
  const RbfKernel kernel(sigma2);
  require(theta.size() == data.dim(), errc::invalid_argument,
          "point dimension does not match the data");
  double f = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    f += to_double(data.labels()[i]) * kernel(data.points()[i], theta);
  return sign_label(f);
}

template <class C>
concept Predictor = requires(const C& c, std::span<const double> theta) {
  { c.predict(theta) } -> std::same_as<Label>;
  { c.decision_value(theta) } -> std::convertible_to<double>;
  { c.dim() } -> std::convertible_to<std::size_t>;
};

template <Predictor C>
std::vector<Label> batch_predict(const C& clf, const PointSet& pts, std::size_t threads = 1) {
  std::vector<Label> out(pts.size(), Label::outside);
  if (pts.empty()) return out;
  require(pts.dim() == clf.dim(), errc::invalid_argument,
          "grid dimension does not match the classifier");
  parallel_for(pts.size(), [&](std::size_t i) { out[i] = clf.predict(pts[i]); }, threads);
  return out;
}

template <Predictor C>
std::vector<Label> batch_predict(const C& clf, const Grid& grid, std::size_t threads = 1) {
  return batch_predict(clf, grid.points(), threads);
}

template <Predictor C>
std::vector<double> batch_decision(const C& clf, const PointSet& pts, std::size_t threads = 1) {
  std::vector<double> out(pts.size(), 0.0);
  if (pts.empty()) return out;
  require(pts.dim() == clf.dim(), errc::invalid_argument,
          "grid dimension does not match the classifier");
  parallel_for(pts.size(), [&](std::size_t i) { out[i] = clf.decision_value(pts[i]); }, threads);
  return out;
}

template <Predictor C>
double training_accuracy(const C& clf, const LabeledGrid& data) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    ok += clf.predict(data.points()[i]) == data.labels()[i] ? 1 : 0;
  return data.size() == 0 ? 1.0 : static_cast<double>(ok) / static_cast<double>(data.size());
}

}  // namespace svmcs
