#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "sphfit/geometry.hpp"
#include "sphfit/kernels.hpp"

namespace sphfit {

/// f(x) = sum_i coeffs_i phi(x . center_i). Carries no sample outputs and
/// no quadrature weights: this is everything a server releases.
class LocalEstimator {
 public:
  LocalEstimator(PointSet centers, Eigen::VectorXd coeffs, Kernel kernel,
                 std::size_t sample_count);

  const PointSet& centers() const { return centers_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  const Kernel& kernel() const { return kernel_; }
  const KernelTag& kernel_tag() const { return kernel_.tag(); }
  std::size_t sample_count() const { return sample_count_; }

  double operator()(const SpherePoint& x) const;
  Eigen::VectorXd operator()(const PointSet& xs) const;

 private:
  PointSet centers_;
  Eigen::VectorXd coeffs_;
  Kernel kernel_;
  std::size_t sample_count_;
};

double evaluate(const LocalEstimator& est, const SpherePoint& x);
Eigen::VectorXd evaluate(const LocalEstimator& est, const PointSet& xs);

}  // namespace sphfit
