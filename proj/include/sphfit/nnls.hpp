#pragma once

#include <Eigen/Core>

namespace sphfit {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual_norm = 0.0;  // ||A x - b||_2
  int iterations = 0;
  bool converged = false;
};

struct NnlsOptions {
  /// Dual feasibility tolerance; <= 0 selects 10 * eps * ||A||_1 * max(m, n).
  double tolerance = -1.0;
  /// Outer iteration cap; <= 0 selects 3 * n.
  int max_iterations = -1;
};

/// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.
/// Passive-set least-squares subproblems are solved through an incrementally
/// grown Cholesky factor of A_P^T A_P with one step of iterative refinement.
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                const NnlsOptions& options = {});

}  // namespace sphfit
