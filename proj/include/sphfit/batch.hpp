#pragma once

// Data-parallel inner loops. Every routine exists twice: `omp` is the
// OpenMP-parallel, blocked version used by the library; `serial` is a plain
// loop kept as the reference the tests and benchmarks compare against.
// Point sets are passed as (d+1) x n coordinate matrices.

#include <Eigen/Core>

#include "sphfit/kernels.hpp"

namespace sphfit::batch {

namespace serial {

/// For every probe column, the largest inner product with any point column.
Eigen::VectorXd max_dot(const Eigen::MatrixXd& probes, const Eigen::MatrixXd& points);
/// Largest inner product between two distinct point columns.
double max_pair_dot(const Eigen::MatrixXd& points);
Eigen::MatrixXd gram(const Kernel& kernel, const Eigen::MatrixXd& points);
Eigen::MatrixXd cross(const Kernel& kernel, const Eigen::MatrixXd& rows,
                      const Eigen::MatrixXd& cols);
/// sum_j coeffs_j phi(at_i . centers_j) for every column of `at`.
Eigen::VectorXd expand(const Kernel& kernel, const Eigen::MatrixXd& centers,
                       const Eigen::VectorXd& coeffs, const Eigen::MatrixXd& at);
/// (s+1)^2 x n matrix of real spherical harmonics at the columns of `points`.
Eigen::MatrixXd harmonics(const Eigen::MatrixXd& points, int max_degree);

}  // namespace serial

namespace omp {

Eigen::VectorXd max_dot(const Eigen::MatrixXd& probes, const Eigen::MatrixXd& points);
double max_pair_dot(const Eigen::MatrixXd& points);
Eigen::MatrixXd gram(const Kernel& kernel, const Eigen::MatrixXd& points);
Eigen::MatrixXd cross(const Kernel& kernel, const Eigen::MatrixXd& rows,
                      const Eigen::MatrixXd& cols);
Eigen::VectorXd expand(const Kernel& kernel, const Eigen::MatrixXd& centers,
                       const Eigen::VectorXd& coeffs, const Eigen::MatrixXd& at);
Eigen::MatrixXd harmonics(const Eigen::MatrixXd& points, int max_degree);

}  // namespace omp

/// Worker count used by the omp variants (0 = OpenMP default).
void set_threads(int threads);
/// Effective worker count.
int threads();

}  // namespace sphfit::batch
