#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "sphfit/estimator.hpp"
#include "sphfit/geometry.hpp"
#include "sphfit/kernels.hpp"
#include "sphfit/quadrature.hpp"

namespace sphfit {

/// Samples (x_i, y_i) held by one server.
struct LabeledData {
  LabeledData(PointSet inputs, Eigen::VectorXd outputs);

  PointSet inputs;
  Eigen::VectorXd outputs;

  std::size_t size() const { return inputs.size(); }
  LabeledData subset(std::span<const std::size_t> indices) const;
};

struct FitConfig {
  double lambda = 1.0;
  int quad_degree = 0;
  Kernel kernel;
};

/// Weighted regularized least squares on one server:
///   argmin_f sum_i w_i (f(x_i) - y_i)^2 + lambda ||f||_phi^2.
/// The minimizer is f = sum_i a_i phi(x_i . ), computed from the symmetric
/// system (W^{1/2} Phi W^{1/2} + lambda I) b = W^{1/2} y, a = W^{1/2} b.
/// Nodes with zero weight get a_i = 0. `rule.nodes` must equal
/// `data.inputs` point for point.
LocalEstimator wrls_fit(const LabeledData& data, const QuadratureRule& rule,
                        const FitConfig& cfg);

/// Coefficients of the same minimizer from a precomputed Gram matrix, via
/// the symmetric route. Throws SolveFailure if no finite solution results.
Eigen::VectorXd wrls_coefficients(const Eigen::MatrixXd& gram,
                                  std::span<const double> weights,
                                  const Eigen::VectorXd& y, double lambda);

/// The unsymmetric closed form a = (W Phi + lambda I)^{-1} W y, solved by
/// pivoted LU. Kept as an independent route for cross-checking.
Eigen::VectorXd wrls_coefficients_direct(const Eigen::MatrixXd& gram,
                                         std::span<const double> weights,
                                         const Eigen::VectorXd& y, double lambda);

/// Discrete objective sum_i w_i ((Phi a)_i - y_i)^2 + lambda a^T Phi a and
/// its gradient 2 Phi (W (Phi a - y) + lambda a).
double wrls_objective(const Eigen::MatrixXd& gram, std::span<const double> weights,
                      const Eigen::VectorXd& y, double lambda, const Eigen::VectorXd& a);
Eigen::VectorXd wrls_gradient(const Eigen::MatrixXd& gram, std::span<const double> weights,
                              const Eigen::VectorXd& y, double lambda,
                              const Eigen::VectorXd& a);

/// lambda = n^{-2 gamma / (2 gamma + d)} (proportionality constant 1).
double theoretical_lambda(std::size_t n, double gamma, int d);
/// Smallest integer s with s >= lambda^{-1/gamma}.
int quadrature_degree_floor(double lambda, double gamma);

/// lambda^{log_{n_local} n_total}: maps a parameter tuned at n_local samples
/// to the n_total scale.
double rescale_lambda(double lambda_local, std::size_t n_local, std::size_t n_total);

/// {base^{-q} : base^{-q} > floor, q = 0, 1, 2, ...}, descending.
std::vector<double> geometric_lambda_grid(double base, double floor = 1e-10);
/// `count` values equally spaced in log scale on [lo, hi].
std::vector<double> log_spaced(double lo, double hi, int count);

struct GridCell {
  std::size_t kernel_index = 0;
  double lambda = 0.0;
  double holdout_rmse = 0.0;
  bool failed = false;
};

struct GridSearchResult {
  FitConfig config;
  double best_rmse = 0.0;
  std::vector<GridCell> cells;
};

struct GridSearchOptions {
  /// Cells whose RMSE lies within this of the best count as ties; ties go to
  /// the larger lambda.
  double tie_tolerance = 1e-12;
};

/// Exhaustive search over kernel_grid x lambda_grid minimizing holdout RMSE.
GridSearchResult grid_search_table(const LabeledData& data, const QuadratureRule& rule,
                                   std::span<const Kernel> kernel_grid,
                                   std::span<const double> lambda_grid,
                                   const LabeledData& holdout,
                                   const GridSearchOptions& options = {});

FitConfig grid_search(const LabeledData& data, const QuadratureRule& rule,
                      std::span<const Kernel> kernel_grid, std::span<const double> lambda_grid,
                      const LabeledData& holdout, const GridSearchOptions& options = {});

}  // namespace sphfit
