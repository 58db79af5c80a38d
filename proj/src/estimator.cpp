#include "sphfit/estimator.hpp"

#include "sphfit/batch.hpp"
#include "sphfit/error.hpp"

namespace sphfit {

LocalEstimator::LocalEstimator(PointSet centers, Eigen::VectorXd coeffs, Kernel kernel,
                               std::size_t sample_count)
    : centers_(std::move(centers)),
      coeffs_(std::move(coeffs)),
      kernel_(std::move(kernel)),
      sample_count_(sample_count) {
  if (static_cast<std::size_t>(coeffs_.size()) != centers_.size())
    throw DimensionMismatch("solver", "estimator centers and coefficients differ in length");
  if (!kernel_.valid()) throw InvalidArgument("solver", "estimator kernel not set");
  if (kernel_.dim() != centers_.dim()) throw DimensionMismatch("solver", "kernel and centers live on different spheres");
  if (sample_count_ < 1) throw InvalidArgument("solver", "sample_count must be >= 1");
  if (!coeffs_.allFinite()) throw InvalidArgument("solver", "non-finite estimator coefficients");
}

double LocalEstimator::operator()(const SpherePoint& x) const {
  if (x.dim() != centers_.dim()) throw DimensionMismatch("solver", "evaluation point has the wrong dimension");
  return batch::omp::expand(kernel_, centers_.coords(), coeffs_, x.coords())[0];
}

Eigen::VectorXd LocalEstimator::operator()(const PointSet& xs) const {
  if (xs.dim() != centers_.dim()) throw DimensionMismatch("solver", "evaluation points have the wrong dimension");
  return batch::omp::expand(kernel_, centers_.coords(), coeffs_, xs.coords());
}

double evaluate(const LocalEstimator& est, const SpherePoint& x) { return est(x); }
Eigen::VectorXd evaluate(const LocalEstimator& est, const PointSet& xs) { return est(xs); }

}  // namespace sphfit
