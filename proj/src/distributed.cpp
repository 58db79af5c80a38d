#include "sphfit/distributed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <omp.h>

#include "sphfit/error.hpp"
#include "sphfit/log.hpp"
#include "sphfit/random.hpp"

namespace sphfit {

namespace {

using Indices = std::vector<std::size_t>;

// Splits `idx` into `parts` contiguous blocks whose sizes differ by at most one.
std::vector<Indices> split_even(const Indices& idx, std::size_t parts) {
  std::vector<Indices> out(parts);
  const std::size_t n = idx.size(), base = n / parts, extra = n % parts;
  std::size_t pos = 0;
  for (std::size_t p = 0; p < parts; ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    out[p].assign(idx.begin() + static_cast<std::ptrdiff_t>(pos),
                  idx.begin() + static_cast<std::ptrdiff_t>(pos + len));
    std::sort(out[p].begin(), out[p].end());
    pos += len;
  }
  return out;
}

Indices iota_indices(std::size_t n) {
  Indices idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

LabeledData concat(std::span<const LabeledData> groups) {
  std::vector<PointSet> parts;
  std::size_t n = 0;
  for (const LabeledData& g : groups) {
    parts.push_back(g.inputs);
    n += g.size();
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  Eigen::Index pos = 0;
  for (const LabeledData& g : groups) {
    y.segment(pos, g.outputs.size()) = g.outputs;
    pos += g.outputs.size();
  }
  return LabeledData(PointSet::concat(parts), std::move(y));
}

std::size_t total_size(std::span<const LabeledData> shards) {
  std::size_t n = 0;
  for (const LabeledData& s : shards) n += s.size();
  return n;
}

int team(int jobs) { return jobs > 0 ? jobs : omp_get_max_threads(); }

}  // namespace

std::vector<LabeledData> partition_by_groups(std::span<const LabeledData> groups, int m,
                                             std::uint64_t seed) {
  const int g = static_cast<int>(groups.size());
  if (g == 0) throw InvalidArgument("distributed", "no groups to partition");
  if (m < g)
    throw InvalidArgument("distributed", "the redistribution scheme needs at least as many servers as groups",
                          "m=" + std::to_string(m) + " groups=" + std::to_string(g));
  auto rng = make_stream(seed, "partition");
  const int tau = m % g;
  Indices order = iota_indices(static_cast<std::size_t>(g));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<char> chosen(static_cast<std::size_t>(g), 0);
  for (int i = 0; i < tau; ++i) chosen[order[static_cast<std::size_t>(i)]] = 1;

  std::vector<LabeledData> shards;
  shards.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < g; ++j) {
    const LabeledData& grp = groups[static_cast<std::size_t>(j)];
    const std::size_t parts = static_cast<std::size_t>(chosen[j] ? (m + g - 1) / g : m / g);
    if (grp.size() < parts)
      throw InvalidArgument("distributed", "group " + std::to_string(j) + " is too small to split into " +
                                               std::to_string(parts) + " shards",
                            "group=" + std::to_string(j));
    if (parts == 1) {
      shards.push_back(grp);
      continue;
    }
    Indices idx = iota_indices(grp.size());
    std::shuffle(idx.begin(), idx.end(), rng);
    for (const Indices& part : split_even(idx, parts)) shards.push_back(grp.subset(part));
  }
  return shards;
}

std::vector<LabeledData> partition_even(std::span<const LabeledData> groups, int m,
                                        std::uint64_t seed) {
  if (groups.empty()) throw InvalidArgument("distributed", "no groups to partition");
  if (m < 1) throw InvalidArgument("distributed", "server count must be >= 1");
  LabeledData pooled = concat(groups);
  if (pooled.size() < static_cast<std::size_t>(m))
    throw InvalidArgument("distributed", "fewer samples than servers");
  if (m == 1) return {std::move(pooled)};
  auto rng = make_stream(seed, "partition");
  Indices idx = iota_indices(pooled.size());
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<LabeledData> shards;
  for (const Indices& part : split_even(idx, static_cast<std::size_t>(m))) shards.push_back(pooled.subset(part));
  return shards;
}

std::vector<LabeledData> partition(std::span<const LabeledData> groups, int m, std::uint64_t seed) {
  return m >= static_cast<int>(groups.size()) ? partition_by_groups(groups, m, seed)
                                              : partition_even(groups, m, seed);
}

LambdaRule parse_lambda_rule(const std::string& name) {
  if (name == "theoretical") return LambdaRule::theoretical;
  if (name == "cv" || name == "cv_rescaled") return LambdaRule::cv_rescaled;
  throw InvalidArgument("distributed", "unknown lambda rule '" + name + "' (theoretical|cv)");
}

std::string to_string(LambdaRule rule) {
  return rule == LambdaRule::theoretical ? "theoretical" : "cv_rescaled";
}

CvSelection cross_validate(const LabeledData& data, const CvOptions& options, std::uint64_t stream) {
  const std::size_t n = data.size();
  if (n < 2) throw InvalidArgument("distributed", "cross-validation needs at least 2 samples");
  if (options.folds < 2) throw InvalidArgument("distributed", "cross-validation needs at least 2 folds");
  if (options.max_train < 1) throw InvalidArgument("distributed", "max_train must be positive");
  auto rng = make_stream(options.seed, "cv-split", stream);
  Indices idx = iota_indices(n);
  std::shuffle(idx.begin(), idx.end(), rng);

  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(options.folds), n);
  const std::size_t cap = options.max_train + (options.max_train + k - 2) / (k - 1);
  idx.resize(std::min(n, cap));
  const std::vector<Indices> folds = split_even(idx, k);

  std::vector<double> sse;
  std::vector<GridCell> cells;
  for (std::size_t f = 0; f < k; ++f) {
    Indices train;
    for (std::size_t g = 0; g < k; ++g)
      if (g != f) train.insert(train.end(), folds[g].begin(), folds[g].end());
    std::sort(train.begin(), train.end());
    const LabeledData tr = data.subset(train);
    const LabeledData ho = data.subset(folds[f]);
    const GridSearchResult r =
        grid_search_table(tr, uniform_rule(tr.inputs), options.kernel_grid, options.lambda_grid, ho);
    if (f == 0) {
      cells = r.cells;
      sse.assign(cells.size(), 0.0);
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      cells[c].failed = cells[c].failed || r.cells[c].failed;
      sse[c] += r.cells[c].holdout_rmse * r.cells[c].holdout_rmse * static_cast<double>(ho.size());
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < cells.size(); ++c)
    if (!cells[c].failed) best = std::min(best, sse[c]);
  if (!std::isfinite(best)) throw SolveFailure("distributed", "every cross-validation cell failed");
  std::optional<std::size_t> pick;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].failed || sse[c] > best * (1 + 1e-12)) continue;
    if (!pick || cells[c].lambda > cells[*pick].lambda) pick = c;
  }
  const GridCell& p = cells[*pick];
  const std::size_t n_train = idx.size() - folds.front().size();
  return {FitConfig{p.lambda, 0, options.kernel_grid[p.kernel_index]}, n_train,
          std::sqrt(sse[*pick] / static_cast<double>(idx.size()))};
}

double max_servers_bound(std::size_t n_total, double gamma, int d) {
  if (!(gamma > 0.5 * d)) throw InvalidArgument("distributed", "gamma must exceed d/2");
  return std::pow(static_cast<double>(n_total), (2 * gamma - d) / (2 * gamma + d));
}

ShardPlan per_shard_config(std::span<const LabeledData> shards, const ShardPlanOptions& options) {
  if (shards.empty()) throw InvalidArgument("distributed", "no shards");
  const int d = shards.front().inputs.dim();
  for (const LabeledData& s : shards)
    if (s.inputs.dim() != d) throw DimensionMismatch("distributed", "shards live on different spheres");
  const std::size_t n = total_size(shards);
  const std::size_t m = shards.size();

  ShardPlan plan;
  const double bound = max_servers_bound(n, options.gamma, d);
  if (static_cast<double>(m) > bound) {
    plan.warnings.push_back("server count " + std::to_string(m) + " exceeds the bound " +
                            std::to_string(bound) + " for " + std::to_string(n) + " samples");
    log::info("distributed: " + plan.warnings.back());
  }

  if (options.rule == LambdaRule::theoretical) {
    const Kernel kernel = options.kernel ? *options.kernel : make_sobolev(d, options.gamma);
    const double lambda = theoretical_lambda(n, options.gamma, d);
    const int s = quadrature_degree_floor(lambda, options.gamma);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t nj = shards[j].size();
      if (!options.equal_weights && static_cast<std::size_t>((s + 1) * (s + 1)) > nj)
        throw InvalidArgument("distributed",
                              "shard " + std::to_string(j) + " has " + std::to_string(nj) +
                                  " samples, too few for a quadrature rule of degree " + std::to_string(s),
                              "server=" + std::to_string(j));
      plan.configs.push_back({lambda, s, kernel});
    }
    return plan;
  }

  plan.configs.resize(m);
  std::vector<std::string> errors(m);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t j = 0; j < m; ++j) {
    try {
      const CvSelection sel = cross_validate(shards[j], options.cv, j);
      double lambda = sel.config.lambda;
      if (lambda < 1 && sel.n_train >= 2) lambda = rescale_lambda(lambda, sel.n_train, n);
      plan.configs[j] = {lambda, default_quadrature_degree(shards[j].size()), sel.config.kernel};
    } catch (const std::exception& e) {
      errors[j] = e.what();
    }
  }
  std::vector<int> failed;
  for (std::size_t j = 0; j < m; ++j)
    if (!errors[j].empty()) failed.push_back(static_cast<int>(j));
  if (!failed.empty()) throw ShardFailure(failed, "cross-validation failed: " + errors[failed.front()]);
  return plan;
}

std::vector<Shard> build_shards(std::span<const LabeledData> shards, std::span<const FitConfig> configs,
                                bool equal_weights) {
  if (shards.size() != configs.size()) throw DimensionMismatch("distributed", "one config per shard required");
  const std::size_t m = shards.size();
  std::vector<std::optional<QuadratureRule>> rules(m);
  std::vector<std::string> errors(m);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t j = 0; j < m; ++j) {
    try {
      rules[j] = equal_weights ? uniform_rule(shards[j].inputs)
                               : build_quadrature(shards[j].inputs, configs[j].quad_degree);
    } catch (const std::exception& e) {
      errors[j] = e.what();
    }
  }
  std::vector<int> failed;
  for (std::size_t j = 0; j < m; ++j)
    if (!rules[j]) failed.push_back(static_cast<int>(j));
  if (!failed.empty())
    throw ShardFailure(failed, "quadrature construction failed on server " + std::to_string(failed.front()) +
                                   ": " + errors[static_cast<std::size_t>(failed.front())]);
  std::vector<Shard> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j)
    out.push_back(Shard{static_cast<int>(j), shards[j], std::move(*rules[j]), configs[j]});
  return out;
}

EstimatorMessage fit_worker(const Shard& shard) {
  return EstimatorMessage{shard.server_id, wrls_fit(shard.data, shard.rule, shard.cfg), shard.data.size()};
}

GlobalEstimator dwrls_fit(std::span<const Shard> shards, const DwrlsOptions& options, DwrlsReport* report) {
  if (shards.empty()) throw InvalidArgument("distributed", "no shards");
  const std::size_t m = shards.size();
  std::vector<std::optional<EstimatorMessage>> messages(m);
  std::vector<std::string> errors(m);
#pragma omp parallel for schedule(dynamic) num_threads(team(options.jobs))
  for (std::size_t j = 0; j < m; ++j) {
    try {
      messages[j] = fit_worker(shards[j]);
    } catch (const std::exception& e) {
      errors[j] = e.what();
    }
  }

  std::vector<int> failed;
  std::vector<std::string> failed_errors;
  std::vector<EstimatorMessage> received;
  for (std::size_t j = 0; j < m; ++j) {
    if (messages[j]) {
      received.push_back(std::move(*messages[j]));
    } else {
      failed.push_back(shards[j].server_id);
      failed_errors.push_back(errors[j]);
    }
  }
  if (report) {
    report->failed_servers = failed;
    report->errors = failed_errors;
  }
  if (!failed.empty()) {
    if (!options.allow_partial || received.empty())
      throw ShardFailure(failed, "local fit failed on server " + std::to_string(failed.front()) + ": " +
                                     failed_errors.front());
    log::warn("distributed: dropping " + std::to_string(failed.size()) + " failed servers");
  }
  return aggregate(std::move(received));
}

}  // namespace sphfit
