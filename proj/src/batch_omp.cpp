#include <algorithm>
#include <atomic>
#include <limits>

#include <omp.h>

#include "sphfit/batch.hpp"
#include "sphfit/error.hpp"
#include "sphfit/harmonics.hpp"

namespace sphfit::batch {

namespace {

std::atomic<int> thread_count{0};

int team() {
  const int t = thread_count.load();
  return t > 0 ? t : omp_get_max_threads();
}

constexpr Eigen::Index block = 256;

}  // namespace

void set_threads(int threads) { thread_count.store(std::max(threads, 0)); }
int threads() { return team(); }

namespace omp {

Eigen::VectorXd max_dot(const Eigen::MatrixXd& probes, const Eigen::MatrixXd& points) {
  if (probes.rows() != points.rows()) throw DimensionMismatch("batch", "probe and point dimensions differ");
  const Eigen::Index n = probes.cols();
  Eigen::VectorXd out(n);
  const Eigen::Index blocks = (n + block - 1) / block;
#pragma omp parallel for schedule(dynamic) num_threads(team())
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index s = b * block, len = std::min(block, n - s);
    const Eigen::MatrixXd d = probes.middleCols(s, len).transpose() * points;
    out.segment(s, len) = d.rowwise().maxCoeff();
  }
  return out;
}

double max_pair_dot(const Eigen::MatrixXd& points) {
  const Eigen::Index n = points.cols();
  const Eigen::Index blocks = (n + block - 1) / block;
  double best = -std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(dynamic) num_threads(team()) reduction(max : best)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index s = b * block, len = std::min(block, n - s);
    // pairs (i, j) with i < j and j in this block
    const Eigen::MatrixXd d = points.leftCols(s + len).transpose() * points.middleCols(s, len);
    for (Eigen::Index c = 0; c < len; ++c)
      for (Eigen::Index i = 0; i < s + c; ++i) best = std::max(best, d(i, c));
  }
  return best;
}

Eigen::MatrixXd gram(const Kernel& kernel, const Eigen::MatrixXd& points) {
  if (!kernel.valid()) throw InvalidArgument("batch", "kernel not set");
  const Eigen::Index n = points.cols();
  Eigen::MatrixXd g(n, n);
  g.noalias() = points.transpose() * points;
#pragma omp parallel for schedule(dynamic, 16) num_threads(team())
  for (Eigen::Index j = 0; j < n; ++j) {
    double* col = g.col(j).data();
    kernel.eval({col, static_cast<std::size_t>(j + 1)}, {col, static_cast<std::size_t>(j + 1)});
  }
#pragma omp parallel for schedule(dynamic, 16) num_threads(team())
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 1; i < n; ++i) g(i, j) = g(j, i);
  return g;
}

Eigen::MatrixXd cross(const Kernel& kernel, const Eigen::MatrixXd& rows, const Eigen::MatrixXd& cols) {
  if (!kernel.valid()) throw InvalidArgument("batch", "kernel not set");
  if (rows.rows() != cols.rows()) throw DimensionMismatch("batch", "row and column point dimensions differ");
  Eigen::MatrixXd r(rows.cols(), cols.cols());
  r.noalias() = rows.transpose() * cols;
  const std::size_t m = static_cast<std::size_t>(rows.cols());
#pragma omp parallel for schedule(static) num_threads(team())
  for (Eigen::Index j = 0; j < cols.cols(); ++j) kernel.eval({r.col(j).data(), m}, {r.col(j).data(), m});
  return r;
}

Eigen::VectorXd expand(const Kernel& kernel, const Eigen::MatrixXd& centers,
                       const Eigen::VectorXd& coeffs, const Eigen::MatrixXd& at) {
  if (centers.cols() != coeffs.size()) throw DimensionMismatch("batch", "centers and coefficients differ in length");
  if (centers.rows() != at.rows()) throw DimensionMismatch("batch", "evaluation points have the wrong dimension");
  if (!kernel.valid()) throw InvalidArgument("batch", "kernel not set");
  const Eigen::Index n = at.cols();
  Eigen::VectorXd out(n);
  const Eigen::Index blocks = (n + block - 1) / block;
#pragma omp parallel for schedule(dynamic) num_threads(team())
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index s = b * block, len = std::min(block, n - s);
    Eigen::MatrixXd d(len, centers.cols());
    d.noalias() = at.middleCols(s, len).transpose() * centers;
    kernel.eval({d.data(), static_cast<std::size_t>(d.size())}, {d.data(), static_cast<std::size_t>(d.size())});
    out.segment(s, len).noalias() = d * coeffs;
  }
  return out;
}

Eigen::MatrixXd harmonics(const Eigen::MatrixXd& points, int max_degree) {
  if (points.rows() != 3) throw DimensionMismatch("batch", "harmonics need points on S^2");
  const Eigen::Index m = static_cast<Eigen::Index>(max_degree + 1) * (max_degree + 1);
  Eigen::MatrixXd y(m, points.cols());
#pragma omp parallel for schedule(static) num_threads(team())
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    eval_real_sph_harmonics(points(0, i), points(1, i), points(2, i), max_degree,
                            {y.col(i).data(), static_cast<std::size_t>(m)});
  return y;
}

}  // namespace omp

}  // namespace sphfit::batch
