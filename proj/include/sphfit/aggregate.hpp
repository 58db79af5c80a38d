#pragma once

// Coordinator side of the distributed fit. This header deliberately knows
// nothing about sample data: the only thing a coordinator can receive is an
// EstimatorMessage.

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "sphfit/estimator.hpp"

namespace sphfit {

struct EstimatorMessage {
  int server_id = 0;
  LocalEstimator estimator;
  std::size_t sample_count = 0;
};

/// f = sum_j (|D_j| / |D|) f_j.
class GlobalEstimator {
 public:
  struct Component {
    int server_id = 0;
    double weight = 0.0;
    LocalEstimator estimator;
  };

  GlobalEstimator(std::vector<Component> components, std::size_t total_samples);

  const std::vector<Component>& components() const { return components_; }
  std::size_t total_samples() const { return total_samples_; }

  double operator()(const SpherePoint& x) const;
  Eigen::VectorXd operator()(const PointSet& xs) const;

 private:
  std::vector<Component> components_;
  std::size_t total_samples_;
};

/// Size-weighted average of the received local estimators. Components are
/// ordered by server id, so the result does not depend on arrival order.
GlobalEstimator aggregate(std::vector<EstimatorMessage> messages);

double evaluate(const GlobalEstimator& est, const SpherePoint& x);
Eigen::VectorXd evaluate(const GlobalEstimator& est, const PointSet& xs);

}  // namespace sphfit
