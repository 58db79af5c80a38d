#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sphfit/aggregate.hpp"
#include "sphfit/quadrature.hpp"
#include "sphfit/solver.hpp"

namespace sphfit {

struct Shard {
  int server_id = 0;
  LabeledData data;
  QuadratureRule rule;
  FitConfig cfg;
};

/// Redistributes G groups onto m >= G servers: with tau = m mod G, tau
/// randomly chosen groups are split among ceil(m/G) servers and the others
/// among floor(m/G). Splits are contiguous blocks of a seeded shuffle.
std::vector<LabeledData> partition_by_groups(std::span<const LabeledData> groups, int m,
                                         std::uint64_t seed);

/// Concatenates all groups and splits them evenly (after a seeded shuffle)
/// into m shards. Used for m < G.
std::vector<LabeledData> partition_even(std::span<const LabeledData> groups, int m,
                                        std::uint64_t seed);

/// partition_by_groups for m >= G, partition_even otherwise.
std::vector<LabeledData> partition(std::span<const LabeledData> groups, int m,
                                   std::uint64_t seed);

enum class LambdaRule { theoretical, cv_rescaled };

LambdaRule parse_lambda_rule(const std::string& name);
std::string to_string(LambdaRule rule);

struct CvOptions {
  std::vector<Kernel> kernel_grid;
  std::vector<double> lambda_grid;
  /// k-fold split; the score of a grid cell is the holdout MSE pooled over
  /// all folds.
  int folds = 5;
  /// The folds are drawn from a random subsample sized so that every
  /// training part has about this many points; the selected lambda is
  /// rescaled from the training size actually used.
  std::size_t max_train = 600;
  std::uint64_t seed = 0;
};

struct CvSelection {
  FitConfig config;  // lambda as tuned at n_train samples
  std::size_t n_train = 0;  // smallest training part
  double holdout_rmse = 0.0;  // pooled over the folds
};

/// Local k-fold cross-validation on one shard with equal weights on the
/// training parts. `stream` separates the random split of different shards.
CvSelection cross_validate(const LabeledData& data, const CvOptions& options,
                           std::uint64_t stream);

struct ShardPlanOptions {
  LambdaRule rule = LambdaRule::theoretical;
  double gamma = 2.0;
  /// Kernel for the theoretical mode (defaults to Sobolev(gamma)).
  std::optional<Kernel> kernel;
  /// Grids and split for the cv_rescaled mode.
  CvOptions cv;
  /// Quadrature weights or equal weights 4 pi / n on each shard.
  bool equal_weights = false;
};

struct ShardPlan {
  std::vector<FitConfig> configs;
  std::vector<std::string> warnings;
};

/// m^{...} ceiling n^{(2 gamma - d)/(2 gamma + d)} on the number of servers.
double max_servers_bound(std::size_t n_total, double gamma, int d);

/// Per-shard lambda and quadrature degree. Theoretical mode uses the total
/// sample count; cv_rescaled tunes locally and rescales to the total.
/// Throws InvalidArgument naming the shard when its required quadrature
/// degree cannot be built on its sample count.
ShardPlan per_shard_config(std::span<const LabeledData> shards,
                           const ShardPlanOptions& options);

/// Builds the quadrature rule of every shard (or equal weights). Throws
/// ShardFailure listing the shards whose rule could not be built.
std::vector<Shard> build_shards(std::span<const LabeledData> shards,
                                std::span<const FitConfig> configs, bool equal_weights);

/// Worker side: fits one shard and releases only its estimator.
EstimatorMessage fit_worker(const Shard& shard);

struct DwrlsOptions {
  /// Drop failed shards and renormalize over the survivors instead of
  /// failing the whole fit.
  bool allow_partial = false;
  /// Concurrent worker cap (0 = OpenMP default).
  int jobs = 0;
};

struct DwrlsReport {
  std::vector<int> failed_servers;
  std::vector<std::string> errors;
};

/// Runs every shard fit concurrently and aggregates the messages. Throws
/// ShardFailure when any shard fails and partial results are not allowed.
GlobalEstimator dwrls_fit(std::span<const Shard> shards, const DwrlsOptions& options = {},
                          DwrlsReport* report = nullptr);

}  // namespace sphfit
