#include <algorithm>
#include <limits>

#include "sphfit/batch.hpp"
#include "sphfit/error.hpp"
#include "sphfit/harmonics.hpp"

namespace sphfit::batch::serial {

Eigen::VectorXd max_dot(const Eigen::MatrixXd& probes, const Eigen::MatrixXd& points) {
  if (probes.rows() != points.rows()) throw DimensionMismatch("batch", "probe and point dimensions differ");
  Eigen::VectorXd out(probes.cols());
  for (Eigen::Index i = 0; i < probes.cols(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < points.cols(); ++j) best = std::max(best, probes.col(i).dot(points.col(j)));
    out[i] = best;
  }
  return out;
}

double max_pair_dot(const Eigen::MatrixXd& points) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < points.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i) best = std::max(best, points.col(i).dot(points.col(j)));
  return best;
}

Eigen::MatrixXd gram(const Kernel& kernel, const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.cols();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i <= j; ++i) g(i, j) = g(j, i) = kernel(points.col(i).dot(points.col(j)));
  return g;
}

Eigen::MatrixXd cross(const Kernel& kernel, const Eigen::MatrixXd& rows, const Eigen::MatrixXd& cols) {
  if (rows.rows() != cols.rows()) throw DimensionMismatch("batch", "row and column point dimensions differ");
  Eigen::MatrixXd r(rows.cols(), cols.cols());
  for (Eigen::Index j = 0; j < cols.cols(); ++j)
    for (Eigen::Index i = 0; i < rows.cols(); ++i) r(i, j) = kernel(rows.col(i).dot(cols.col(j)));
  return r;
}

Eigen::VectorXd expand(const Kernel& kernel, const Eigen::MatrixXd& centers,
                       const Eigen::VectorXd& coeffs, const Eigen::MatrixXd& at) {
  if (centers.cols() != coeffs.size()) throw DimensionMismatch("batch", "centers and coefficients differ in length");
  if (centers.rows() != at.rows()) throw DimensionMismatch("batch", "evaluation points have the wrong dimension");
  Eigen::VectorXd out(at.cols());
  for (Eigen::Index i = 0; i < at.cols(); ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < centers.cols(); ++j) s += coeffs[j] * kernel(at.col(i).dot(centers.col(j)));
    out[i] = s;
  }
  return out;
}

Eigen::MatrixXd harmonics(const Eigen::MatrixXd& points, int max_degree) {
  if (points.rows() != 3) throw DimensionMismatch("batch", "harmonics need points on S^2");
  const Eigen::Index m = static_cast<Eigen::Index>(max_degree + 1) * (max_degree + 1);
  Eigen::MatrixXd y(m, points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    eval_real_sph_harmonics(points(0, i), points(1, i), points(2, i), max_degree,
                            {y.col(i).data(), static_cast<std::size_t>(m)});
  return y;
}

}  // namespace sphfit::batch::serial
