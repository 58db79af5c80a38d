#pragma once

#include <string>

#include <json.hpp>

#include "sphfit/aggregate.hpp"
#include "sphfit/estimator.hpp"
#include "sphfit/geometry.hpp"
#include "sphfit/harmonics.hpp"
#include "sphfit/kernels.hpp"
#include "sphfit/quadrature.hpp"
#include "sphfit/solver.hpp"

namespace sphfit::io {

using nlohmann::json;

/// CSV with header x0,x1,...; rows must have unit norm within 1e-6 unless
/// `lenient`, in which case they are renormalized.
PointSet read_points_csv(const std::string& path, bool lenient = false);
void write_points_csv(const std::string& path, const PointSet& pts);

/// CSV with header x0,x1,x2,y.
LabeledData read_labeled_csv(const std::string& path, bool lenient = false);
void write_labeled_csv(const std::string& path, const LabeledData& data);

/// Rule CSV x0,x1,x2,w plus `<path>.json` holding {degree, residual, c1_observed}.
/// A missing sidecar is tolerated (degree 0, residual unknown).
QuadratureRule read_rule(const std::string& path);
void write_rule(const std::string& path, const QuadratureRule& rule);

json kernel_to_json(const Kernel& kernel);
/// {family, gamma | tau | sigma, d?, truncation?, coefficients? (custom)}.
Kernel kernel_from_json(const json& j);

json to_json(const LocalEstimator& est);
LocalEstimator local_estimator_from_json(const json& j);
json to_json(const GlobalEstimator& est);
GlobalEstimator global_estimator_from_json(const json& j);

json to_json(const BandLimited& f);
BandLimited bandlimited_from_json(const json& j);

json read_json(const std::string& path);
void write_json(const std::string& path, const json& j);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::string& path, const std::string& text);

/// Shortest round-trip decimal form of x.
std::string format_double(double x);

}  // namespace sphfit::io
