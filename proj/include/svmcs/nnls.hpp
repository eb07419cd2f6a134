#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "svmcs/error.hpp"

namespace svmcs {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm2 = 0.0;  // ||A x - b||^2
  int iterations = 0;
};

// Lawson-Hanson active set: min ||A x - b||^2 subject to x >= 0.
// `max_iterations` counts both outer (variable added) and inner (step
// truncated) iterations; 0 selects the default 30 * columns.
inline NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iterations = 0) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  require(m == b.size(), errc::invalid_argument, "nnls: A and b disagree in rows");
  require(n >= 1, errc::invalid_argument, "nnls: need at least one column");
  if (max_iterations <= 0) max_iterations = 30 * static_cast<int>(n);

  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     A.cwiseAbs().colwise().sum().maxCoeff() * static_cast<double>(std::max(m, n));

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  Eigen::VectorXd w = A.transpose() * b;
  int iter = 0;

  auto solve_passive = [&](Eigen::VectorXd& z) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[j]) cols.push_back(j);
    z.setZero(n);
    if (cols.empty()) return;
    Eigen::MatrixXd Ap(m, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) Ap.col(c) = A.col(cols[c]);
    const Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
    for (std::size_t c = 0; c < cols.size(); ++c) z[cols[c]] = zp[c];
  };

  while (true) {
    Eigen::Index best = -1;
    double wmax = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[j] && w[j] > wmax) {
        wmax = w[j];
        best = j;
      }
    }
    if (best < 0) break;
    if (++iter > max_iterations) fail(errc::solver_failure, "nnls: iteration cap reached");
    passive[best] = true;

    Eigen::VectorXd z;
    solve_passive(z);
    while (true) {
      double step = 2.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && z[j] <= 0.0) {
          const double denom = x[j] - z[j];
          const double s = denom > 0.0 ? x[j] / denom : 0.0;
          step = std::min(step, s);
        }
      }
      if (step > 1.0) break;
      if (++iter > max_iterations) fail(errc::solver_failure, "nnls: iteration cap reached");
      x += step * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[j] && x[j] <= tol) {
          passive[j] = false;
          x[j] = 0.0;
        }
      }
      solve_passive(z);
    }
    x = z;
    w = A.transpose() * (b - A * x);
  }

  NnlsResult out;
  out.residual_norm2 = (A * x - b).squaredNorm();
  out.x = std::move(x);
  out.iterations = iter;
  return out;
}

}  // namespace svmcs
