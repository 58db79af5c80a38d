#include "sphfit/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "sphfit/error.hpp"

namespace sphfit {

GlobalEstimator::GlobalEstimator(std::vector<Component> components, std::size_t total_samples)
    : components_(std::move(components)), total_samples_(total_samples) {
  if (components_.empty()) throw InvalidArgument("distributed", "global estimator needs at least one component");
  double sum = 0.0;
  for (const Component& c : components_) {
    if (!(c.weight > 0)) throw InvalidArgument("distributed", "component weights must be positive");
    if (c.estimator.centers().dim() != components_.front().estimator.centers().dim())
      throw DimensionMismatch("distributed", "components live on different spheres");
    sum += c.weight;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("distributed", "component weights must sum to 1");
}

double GlobalEstimator::operator()(const SpherePoint& x) const {
  double s = 0.0;
  for (const Component& c : components_) s += c.weight * c.estimator(x);
  return s;
}

Eigen::VectorXd GlobalEstimator::operator()(const PointSet& xs) const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(xs.size()));
  for (const Component& c : components_) s += c.weight * c.estimator(xs);
  return s;
}

GlobalEstimator aggregate(std::vector<EstimatorMessage> messages) {
  if (messages.empty()) throw InvalidArgument("distributed", "no estimator messages to aggregate");
  std::sort(messages.begin(), messages.end(),
            [](const EstimatorMessage& a, const EstimatorMessage& b) { return a.server_id < b.server_id; });
  std::set<int> seen;
  std::size_t total = 0;
  for (const EstimatorMessage& m : messages) {
    if (!seen.insert(m.server_id).second)
      throw InvalidArgument("distributed", "duplicate server id " + std::to_string(m.server_id));
    if (m.sample_count < 1) throw InvalidArgument("distributed", "message with zero samples");
    total += m.sample_count;
  }
  std::vector<GlobalEstimator::Component> comps;
  comps.reserve(messages.size());
  for (EstimatorMessage& m : messages)
    comps.push_back({m.server_id, static_cast<double>(m.sample_count) / static_cast<double>(total),
                     std::move(m.estimator)});
  return GlobalEstimator(std::move(comps), total);
}

double evaluate(const GlobalEstimator& est, const SpherePoint& x) { return est(x); }
Eigen::VectorXd evaluate(const GlobalEstimator& est, const PointSet& xs) { return est(xs); }

}  // namespace sphfit
