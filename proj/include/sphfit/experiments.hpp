#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "sphfit/aggregate.hpp"
#include "sphfit/distributed.hpp"
#include "sphfit/geometry.hpp"
#include "sphfit/harmonics.hpp"
#include "sphfit/solver.hpp"

namespace sphfit {

/// Sum of Wendland bumps centered at the given points.
struct WendlandSum {
  PointSet centers;
};

struct Franke {};

class TargetFunction {
 public:
  /// Bumps at the n equal-area region centers.
  static TargetFunction wendland_sum(std::size_t n_centers = 10);
  static TargetFunction franke();
  static TargetFunction bandlimited(BandLimited f);

  std::string name() const;
  const std::variant<WendlandSum, Franke, BandLimited>& value() const { return value_; }

 private:
  explicit TargetFunction(std::variant<WendlandSum, Franke, BandLimited> value)
      : value_(std::move(value)) {}
  std::variant<WendlandSum, Franke, BandLimited> value_;
};

double franke_function(double x, double y, double z);

double eval_target(const TargetFunction& f, const SpherePoint& x);
Eigen::VectorXd eval_target(const TargetFunction& f, const PointSet& xs);

enum class NoiseKind { none, gaussian, bounded_uniform };

struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  /// sigma for gaussian, M for bounded_uniform (uniform on [-M, M]).
  double scale = 0.0;
  std::uint64_t seed = 0;

  static NoiseModel none() { return {}; }
  static NoiseModel gaussian(double sigma, std::uint64_t seed);
  static NoiseModel bounded_uniform(double bound, std::uint64_t seed);
};

/// n noise values from the sub-stream `index` of the model's seed.
Eigen::VectorXd draw_noise(const NoiseModel& noise, std::size_t n, std::uint64_t index = 0);

/// Group j holds rotate(base, j) with target values plus noise, j = 1..rotations.
std::vector<LabeledData> generate_training_data(const TargetFunction& target,
                                                const PointSet& base, int rotations,
                                                const NoiseModel& noise);

/// Noise-free samples of the target.
LabeledData sample_target(const TargetFunction& target, const PointSet& xs);

double rmse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth);
double rmse(const LocalEstimator& est, const LabeledData& test);
double rmse(const GlobalEstimator& est, const LabeledData& test);

/// Random band-limited function with f_{k,l} = amplitude * phi_hat_k * g_{k,l},
/// g standard normal, so f lies in the range of the kernel's integral operator.
BandLimited random_bandlimited(const Kernel& kernel, int max_degree, double amplitude,
                               std::uint64_t seed);

struct SweepConfig {
  SweepConfig(TargetFunction t, PointSet base_nodes, PointSet test)
      : target(std::move(t)), base(std::move(base_nodes)), test_points(std::move(test)) {}

  TargetFunction target;
  PointSet base;
  /// Name of the node source (file path or generator) for provenance.
  std::string base_source;
  PointSet test_points;
  std::vector<Kernel> kernel_grid;
  std::vector<double> lambda_grid;
  std::vector<int> m_list;
  std::vector<std::uint64_t> seeds;
  double noise_sigma = 0.1;
  int rotations = 10;
  /// Per-shard k-fold search (grids come from kernel_grid / lambda_grid).
  int cv_folds = 5;
  std::size_t cv_max_train = 600;
  /// Concurrent sweep cells (0 = OpenMP default).
  int jobs = 0;
  /// Keep the residual field of these m values (first seed only).
  std::vector<int> residual_ms;
  /// Record wall-clock times (off gives byte-identical results).
  bool timing = true;
};

/// Default grids: Wendland kernel with lambda in {2^-q > 1e-10} for the
/// Wendland-sum target; chordal Gaussian with sigma in 10 log-spaced values
/// of [0.1, 1] and lambda in {3^-q > 1e-10} for Franke.
void apply_default_grids(SweepConfig& config, const std::string& target_name);

struct SweepRow {
  int m = 0;
  std::uint64_t seed = 0;
  double rmse = 0.0;
  double wall_ms = 0.0;
  bool failed = false;
  std::string error;
};

struct SweepSummary {
  int m = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  int failed = 0;
};

struct ResidualField {
  int m = 0;
  Eigen::MatrixXd points;  // 3 x n
  Eigen::VectorXd truth;
  Eigen::VectorXd predicted;
};

struct ExperimentResult {
  nlohmann::json config;
  std::vector<SweepRow> rows;          // sorted by (m, seed)
  std::vector<SweepSummary> summary;   // m strictly increasing
  std::vector<ResidualField> residuals;
};

/// One cell: partition, per-shard cross-validation with rescaled lambda,
/// equal weights, dwrls_fit and test RMSE.
GlobalEstimator fit_cell(const SweepConfig& config, const std::vector<LabeledData>& groups,
                         int m, std::uint64_t seed);

ExperimentResult run_sweep(const SweepConfig& config);

/// Writes rmse.csv, residuals_m{M}.csv and config.json under `dir`.
void write_results(const std::string& dir, const ExperimentResult& result);

struct RateStudyConfig {
  std::vector<std::size_t> sizes{500, 1000, 2000, 4000};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double gamma = 2.0;
  int target_degree = 6;
  double target_amplitude = 0.5;
  double noise_sigma = 0.1;
  std::size_t test_size = 2000;
};

struct RateStudyResult {
  std::vector<std::size_t> sizes;
  std::vector<double> mean_rmse;          // per size
  std::vector<std::vector<double>> rmse;  // [size][seed]
  double slope = 0.0;                     // least-squares slope of log rmse vs log n
};

/// Single-server fits on Fibonacci nodes with the theoretical schedule
/// lambda = n^{-2 gamma/(2 gamma + 2)}, s = ceil(lambda^{-1/gamma}).
RateStudyResult rate_study(const RateStudyConfig& config);

/// Least-squares slope of y against x.
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sphfit
