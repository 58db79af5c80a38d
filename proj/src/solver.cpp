#include "sphfit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/QR>

#include "sphfit/batch.hpp"
#include "sphfit/error.hpp"
#include "sphfit/log.hpp"

namespace sphfit {

LabeledData::LabeledData(PointSet in, Eigen::VectorXd out)
    : inputs(std::move(in)), outputs(std::move(out)) {
  if (static_cast<std::size_t>(outputs.size()) != inputs.size())
    throw DimensionMismatch("solver", "inputs and outputs differ in length");
  if (!outputs.allFinite()) throw InvalidArgument("solver", "non-finite outputs");
}

LabeledData LabeledData::subset(std::span<const std::size_t> indices) const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= size()) throw InvalidArgument("solver", "subset index out of range");
    y[static_cast<Eigen::Index>(i)] = outputs[static_cast<Eigen::Index>(indices[i])];
  }
  return LabeledData(inputs.subset(indices), std::move(y));
}

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0) || !std::isfinite(lambda)) throw InvalidArgument("solver", "lambda must be a positive number");
}

void scale_system(Eigen::MatrixXd& g, const Eigen::VectorXd& sw, double lambda) {
  const Eigen::Index n = g.rows();
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) g(i, j) *= sw[i] * sw[j];
  g.diagonal().array() += lambda;
}

// Solves (S G S + lambda I) b = S y in place of g and returns a = S b.
// `rebuild` recreates the unscaled g when the Cholesky factorization fails.
Eigen::VectorXd solve_reduced(Eigen::MatrixXd& g, const Eigen::VectorXd& sw,
                              const Eigen::VectorXd& y, double lambda,
                              const std::function<Eigen::MatrixXd()>& rebuild) {
  scale_system(g, sw, lambda);
  const Eigen::VectorXd rhs = sw.cwiseProduct(y);
  Eigen::VectorXd b;
  {
    Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(g);
    if (llt.info() == Eigen::Success) b = llt.solve(rhs);
  }
  if (b.size() == 0 || !b.allFinite()) {
    log::warn("solver: Cholesky factorization failed, falling back to LDL^T");
    Eigen::MatrixXd m = rebuild();
    scale_system(m, sw, lambda);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() == Eigen::Success) b = ldlt.solve(rhs);
    if (b.size() == 0 || !b.allFinite()) {
      log::warn("solver: LDL^T failed, falling back to a least-squares solve");
      b = m.completeOrthogonalDecomposition().solve(rhs);
    }
  }
  if (!b.allFinite()) throw SolveFailure("solver", "linear solve produced non-finite coefficients");
  return sw.cwiseProduct(b);
}

std::vector<Eigen::Index> positive_indices(std::span<const double> weights) {
  std::vector<Eigen::Index> p;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0) || !std::isfinite(weights[i]))
      throw InvalidArgument("solver", "weights must be finite and nonnegative");
    if (weights[i] > 0) p.push_back(static_cast<Eigen::Index>(i));
  }
  return p;
}

Eigen::VectorXd wrls_on(std::span<const double> weights, const Eigen::VectorXd& y, double lambda,
                        const std::function<Eigen::MatrixXd(const std::vector<Eigen::Index>&)>& gram_of) {
  check_lambda(lambda);
  const std::vector<Eigen::Index> p = positive_indices(weights);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(y.size());
  if (p.empty()) return a;
  const Eigen::Index k = static_cast<Eigen::Index>(p.size());
  Eigen::VectorXd sw(k), yp(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    sw[i] = std::sqrt(weights[static_cast<std::size_t>(p[i])]);
    yp[i] = y[p[i]];
  }
  Eigen::MatrixXd g = gram_of(p);
  const Eigen::VectorXd ap = solve_reduced(g, sw, yp, lambda, [&] { return gram_of(p); });
  for (Eigen::Index i = 0; i < k; ++i) a[p[i]] = ap[i];
  return a;
}

void check_system(const Eigen::MatrixXd& gram, std::span<const double> weights, const Eigen::VectorXd& y) {
  if (gram.rows() != gram.cols() || gram.rows() != y.size() ||
      weights.size() != static_cast<std::size_t>(y.size()))
    throw DimensionMismatch("solver", "Gram matrix, weights and outputs differ in size");
}

}  // namespace

LocalEstimator wrls_fit(const LabeledData& data, const QuadratureRule& rule, const FitConfig& cfg) {
  check_lambda(cfg.lambda);
  if (!cfg.kernel.valid()) throw InvalidArgument("solver", "kernel not set");
  if (cfg.kernel.dim() != data.inputs.dim()) throw DimensionMismatch("solver", "kernel and data live on different spheres");
  if (rule.weights.size() != data.size() || !rule.nodes.same_nodes(data.inputs))
    throw InvalidArgument("solver", "quadrature nodes do not match the data inputs");

  const Eigen::MatrixXd& x = data.inputs.coords();
  Eigen::VectorXd a = wrls_on(rule.weights, data.outputs, cfg.lambda, [&](const std::vector<Eigen::Index>& p) {
    if (static_cast<std::size_t>(p.size()) == data.size()) return batch::omp::gram(cfg.kernel, x);
    Eigen::MatrixXd sub(x.rows(), static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = x.col(p[i]);
    return batch::omp::gram(cfg.kernel, sub);
  });
  return LocalEstimator(data.inputs, std::move(a), cfg.kernel, data.size());
}

Eigen::VectorXd wrls_coefficients(const Eigen::MatrixXd& gram, std::span<const double> weights,
                                  const Eigen::VectorXd& y, double lambda) {
  check_system(gram, weights, y);
  return wrls_on(weights, y, lambda, [&](const std::vector<Eigen::Index>& p) {
    const Eigen::Index k = static_cast<Eigen::Index>(p.size());
    Eigen::MatrixXd g(k, k);
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i = 0; i < k; ++i) g(i, j) = gram(p[i], p[j]);
    return g;
  });
}

Eigen::VectorXd wrls_coefficients_direct(const Eigen::MatrixXd& gram, std::span<const double> weights,
                                         const Eigen::VectorXd& y, double lambda) {
  check_system(gram, weights, y);
  check_lambda(lambda);
  positive_indices(weights);
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
  Eigen::MatrixXd m = w.asDiagonal() * gram;
  m.diagonal().array() += lambda;
  Eigen::VectorXd a = m.partialPivLu().solve(w.cwiseProduct(y));
  if (!a.allFinite()) throw SolveFailure("solver", "linear solve produced non-finite coefficients");
  return a;
}

double wrls_objective(const Eigen::MatrixXd& gram, std::span<const double> weights,
                      const Eigen::VectorXd& y, double lambda, const Eigen::VectorXd& a) {
  check_system(gram, weights, y);
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
  const Eigen::VectorXd f = gram * a;
  return w.dot((f - y).cwiseAbs2()) + lambda * a.dot(f);
}

Eigen::VectorXd wrls_gradient(const Eigen::MatrixXd& gram, std::span<const double> weights,
                              const Eigen::VectorXd& y, double lambda, const Eigen::VectorXd& a) {
  check_system(gram, weights, y);
  const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Eigen::Index>(weights.size()));
  const Eigen::VectorXd r = gram * a - y;
  return 2.0 * (gram * (w.cwiseProduct(r) + lambda * a));
}

double theoretical_lambda(std::size_t n, double gamma, int d) {
  if (n < 1) throw InvalidArgument("solver", "sample count must be >= 1");
  if (!(gamma > 0.5 * d)) throw InvalidArgument("solver", "gamma must exceed d/2");
  return std::pow(static_cast<double>(n), -2 * gamma / (2 * gamma + d));
}

int quadrature_degree_floor(double lambda, double gamma) {
  check_lambda(lambda);
  if (!(gamma > 0)) throw InvalidArgument("solver", "gamma must be positive");
  const double s = std::pow(lambda, -1.0 / gamma);
  return std::max(0, static_cast<int>(std::ceil(s * (1 - 1e-12))));
}

double rescale_lambda(double lambda_local, std::size_t n_local, std::size_t n_total) {
  if (!(lambda_local > 0 && lambda_local < 1)) throw InvalidArgument("solver", "rescaling needs 0 < lambda < 1");
  if (n_local < 2) throw InvalidArgument("solver", "rescaling needs n_local >= 2");
  if (n_total < n_local) throw InvalidArgument("solver", "rescaling needs n_total >= n_local");
  if (n_total == n_local) return lambda_local;
  return std::pow(lambda_local, std::log(static_cast<double>(n_total)) / std::log(static_cast<double>(n_local)));
}

std::vector<double> geometric_lambda_grid(double base, double floor) {
  if (!(base > 1)) throw InvalidArgument("solver", "grid base must exceed 1");
  if (!(floor > 0 && floor < 1)) throw InvalidArgument("solver", "grid floor must lie in (0, 1)");
  std::vector<double> grid;
  for (int q = 0;; ++q) {
    const double v = std::pow(base, -q);
    if (!(v > floor)) break;
    grid.push_back(v);
  }
  return grid;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0 && hi >= lo) || count < 1) throw InvalidArgument("solver", "log_spaced needs 0 < lo <= hi, count >= 1");
  std::vector<double> v(static_cast<std::size_t>(count));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) v[i] = count == 1 ? lo : std::exp(a + (b - a) * i / (count - 1));
  v.front() = lo;
  if (count > 1) v.back() = hi;
  return v;
}

GridSearchResult grid_search_table(const LabeledData& data, const QuadratureRule& rule,
                                   std::span<const Kernel> kernel_grid,
                                   std::span<const double> lambda_grid, const LabeledData& holdout,
                                   const GridSearchOptions& options) {
  if (kernel_grid.empty() || lambda_grid.empty()) throw InvalidArgument("solver", "empty search grid");
  if (holdout.size() == 0) throw InvalidArgument("solver", "empty holdout set");
  if (rule.weights.size() != data.size() || !rule.nodes.same_nodes(data.inputs))
    throw InvalidArgument("solver", "quadrature nodes do not match the data inputs");
  for (double l : lambda_grid) check_lambda(l);

  GridSearchResult result;
  const double nh = static_cast<double>(holdout.size());
  for (std::size_t ki = 0; ki < kernel_grid.size(); ++ki) {
    const Kernel& k = kernel_grid[ki];
    if (k.dim() != data.inputs.dim()) throw DimensionMismatch("solver", "kernel and data live on different spheres");
    const Eigen::MatrixXd g = batch::omp::gram(k, data.inputs.coords());
    const Eigen::MatrixXd c = batch::omp::cross(k, holdout.inputs.coords(), data.inputs.coords());
    for (double lambda : lambda_grid) {
      GridCell cell{ki, lambda, std::numeric_limits<double>::infinity(), false};
      try {
        const Eigen::VectorXd a = wrls_coefficients(g, rule.weights, data.outputs, lambda);
        cell.holdout_rmse = std::sqrt((c * a - holdout.outputs).squaredNorm() / nh);
        if (!std::isfinite(cell.holdout_rmse)) cell.failed = true;
      } catch (const SolveFailure&) {
        cell.failed = true;
      }
      result.cells.push_back(cell);
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (const GridCell& c : result.cells)
    if (!c.failed) best = std::min(best, c.holdout_rmse);
  if (!std::isfinite(best)) throw SolveFailure("solver", "every grid-search cell failed");

  const GridCell* pick = nullptr;
  for (const GridCell& c : result.cells) {
    if (c.failed || c.holdout_rmse > best + options.tie_tolerance) continue;
    if (!pick || c.lambda > pick->lambda) pick = &c;
  }
  result.best_rmse = pick->holdout_rmse;
  result.config = FitConfig{pick->lambda, rule.degree, kernel_grid[pick->kernel_index]};
  return result;
}

FitConfig grid_search(const LabeledData& data, const QuadratureRule& rule,
                      std::span<const Kernel> kernel_grid, std::span<const double> lambda_grid,
                      const LabeledData& holdout, const GridSearchOptions& options) {
  return grid_search_table(data, rule, kernel_grid, lambda_grid, holdout, options).config;
}

}  // namespace sphfit
