#include "sphfit/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include <omp.h>

#include "sphfit/batch.hpp"
#include "sphfit/error.hpp"
#include "sphfit/io.hpp"
#include "sphfit/log.hpp"
#include "sphfit/random.hpp"

namespace sphfit {

TargetFunction TargetFunction::wendland_sum(std::size_t n_centers) {
  return TargetFunction(WendlandSum{equal_area_centers(n_centers)});
}

TargetFunction TargetFunction::franke() { return TargetFunction(Franke{}); }

TargetFunction TargetFunction::bandlimited(BandLimited f) {
  if (f.dim() != 2) throw InvalidArgument("experiments", "targets live on S^2");
  return TargetFunction(std::move(f));
}

std::string TargetFunction::name() const {
  switch (value_.index()) {
    case 0: return "wendland";
    case 1: return "franke";
    default: return "bandlimited";
  }
}

double franke_function(double x, double y, double z) {
  const double a = 9 * x, b = 9 * y, c = 9 * z;
  auto sq = [](double v) { return v * v; };
  return 0.75 * std::exp(-sq(a - 2) / 4 - sq(b - 2) / 4 - sq(c - 2) / 4) +
         0.75 * std::exp(-sq(a + 1) / 49 - (b + 1) / 10 - (c + 1) / 10) +
         0.5 * std::exp(-sq(a - 7) / 4 - sq(b - 3) / 4 - sq(c - 5) / 4) -
         0.2 * std::exp(-sq(a - 4) - sq(b - 7) - sq(c - 5));
}

Eigen::VectorXd eval_target(const TargetFunction& f, const PointSet& xs) {
  if (xs.dim() != 2) throw DimensionMismatch("experiments", "targets live on S^2");
  const Eigen::MatrixXd& x = xs.coords();
  const Eigen::Index n = x.cols();
  return std::visit(
      [&](const auto& t) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, WendlandSum>) {
          const Eigen::MatrixXd dots = t.centers.coords().transpose() * x;
          Eigen::VectorXd out(n);
          for (Eigen::Index i = 0; i < n; ++i) {
            double s = 0.0;
            for (Eigen::Index c = 0; c < dots.rows(); ++c)
              s += wendland_profile(std::sqrt(std::max(0.0, 2.0 - 2.0 * dots(c, i))));
            out[i] = s;
          }
          return out;
        } else if constexpr (std::is_same_v<T, Franke>) {
          Eigen::VectorXd out(n);
          for (Eigen::Index i = 0; i < n; ++i) out[i] = franke_function(x(0, i), x(1, i), x(2, i));
          return out;
        } else {
          return eval_bandlimited(t, xs);
        }
      },
      f.value());
}

double eval_target(const TargetFunction& f, const SpherePoint& x) {
  if (x.dim() != 2) throw DimensionMismatch("experiments", "targets live on S^2");
  return eval_target(f, PointSet(std::vector<SpherePoint>{x}))[0];
}

NoiseModel NoiseModel::gaussian(double sigma, std::uint64_t seed) {
  if (!(sigma > 0)) throw InvalidArgument("experiments", "noise sigma must be > 0");
  return {NoiseKind::gaussian, sigma, seed};
}

NoiseModel NoiseModel::bounded_uniform(double bound, std::uint64_t seed) {
  if (!(bound > 0)) throw InvalidArgument("experiments", "noise bound must be > 0");
  return {NoiseKind::bounded_uniform, bound, seed};
}

Eigen::VectorXd draw_noise(const NoiseModel& noise, std::size_t n, std::uint64_t index) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (noise.kind == NoiseKind::none) return e;
  if (!(noise.scale > 0)) throw InvalidArgument("experiments", "noise scale must be > 0");
  auto rng = make_stream(noise.seed, "noise", index);
  if (noise.kind == NoiseKind::gaussian) {
    std::normal_distribution<double> dist(0.0, noise.scale);
    for (auto& v : e) v = dist(rng);
  } else {
    std::uniform_real_distribution<double> dist(-noise.scale, noise.scale);
    for (auto& v : e) v = dist(rng);
  }
  return e;
}

std::vector<LabeledData> generate_training_data(const TargetFunction& target, const PointSet& base,
                                                int rotations, const NoiseModel& noise) {
  if (base.dim() != 2) throw DimensionMismatch("experiments", "training nodes must lie on S^2");
  if (rotations < 1) throw InvalidArgument("experiments", "rotations must be >= 1");
  std::vector<LabeledData> groups;
  for (int j = 1; j <= rotations; ++j) {
    PointSet x = rotate(base, j);
    Eigen::VectorXd y = eval_target(target, x) + draw_noise(noise, x.size(), static_cast<std::uint64_t>(j));
    groups.emplace_back(std::move(x), std::move(y));
  }
  return groups;
}

LabeledData sample_target(const TargetFunction& target, const PointSet& xs) {
  return LabeledData(xs, eval_target(target, xs));
}

double rmse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& truth) {
  if (predicted.size() != truth.size()) throw DimensionMismatch("experiments", "prediction and truth differ in length");
  if (truth.size() == 0) throw InvalidArgument("experiments", "empty test set");
  return std::sqrt((predicted - truth).squaredNorm() / static_cast<double>(truth.size()));
}

double rmse(const LocalEstimator& est, const LabeledData& test) { return rmse(est(test.inputs), test.outputs); }
double rmse(const GlobalEstimator& est, const LabeledData& test) { return rmse(est(test.inputs), test.outputs); }

BandLimited random_bandlimited(const Kernel& kernel, int max_degree, double amplitude, std::uint64_t seed) {
  BandLimited f(2, max_degree);
  auto rng = make_stream(seed, "target");
  std::normal_distribution<double> g(0.0, 1.0);
  for (int k = 0; k <= max_degree; ++k) {
    const double c = amplitude * kernel.coefficient(k);
    for (int l = 1; l <= 2 * k + 1; ++l) f.set({k, l}, c * g(rng));
  }
  return f;
}

void apply_default_grids(SweepConfig& config, const std::string& target_name) {
  if (target_name == "wendland") {
    config.kernel_grid = {make_wendland(2)};
    config.lambda_grid = geometric_lambda_grid(2.0);
  } else if (target_name == "franke") {
    config.kernel_grid.clear();
    for (double s : log_spaced(0.1, 1.0, 10)) config.kernel_grid.push_back(make_gaussian_chordal(s, 2));
    config.lambda_grid = geometric_lambda_grid(3.0);
  } else {
    throw InvalidArgument("experiments", "no default grids for target '" + target_name + "'");
  }
}

GlobalEstimator fit_cell(const SweepConfig& config, const std::vector<LabeledData>& groups, int m,
                         std::uint64_t seed) {
  const std::vector<LabeledData> shards = partition(groups, m, seed);
  ShardPlanOptions plan_opts;
  plan_opts.rule = LambdaRule::cv_rescaled;
  plan_opts.equal_weights = true;
  plan_opts.cv.kernel_grid = config.kernel_grid;
  plan_opts.cv.lambda_grid = config.lambda_grid;
  plan_opts.cv.max_train = config.cv_max_train;
  plan_opts.cv.folds = config.cv_folds;
  plan_opts.cv.seed = seed;
  const ShardPlan plan = per_shard_config(shards, plan_opts);
  const std::vector<Shard> built = build_shards(shards, plan.configs, true);
  return dwrls_fit(built, DwrlsOptions{false, 1});
}

namespace {

nlohmann::json sweep_provenance(const SweepConfig& c, std::size_t n_total) {
  nlohmann::json kernels = nlohmann::json::array();
  for (const Kernel& k : c.kernel_grid) kernels.push_back(io::kernel_to_json(k));
  return nlohmann::json{{"target", c.target.name()},
                        {"base_source", c.base_source},
                        {"base_size", c.base.size()},
                        {"rotations", c.rotations},
                        {"total_samples", n_total},
                        {"noise", {{"kind", "gaussian"}, {"sigma", c.noise_sigma}}},
                        {"test_size", c.test_points.size()},
                        {"kernel_grid", kernels},
                        {"lambda_grid", c.lambda_grid},
                        {"m_list", c.m_list},
                        {"seeds", c.seeds},
                        {"lambda_rule", "cv_rescaled"},
                        {"weights", "equal"},
                        {"cv", {{"folds", c.cv_folds}, {"max_train", c.cv_max_train}}},
                        {"timing", c.timing}};
}

}  // namespace

ExperimentResult run_sweep(const SweepConfig& config) {
  if (config.m_list.empty()) throw InvalidArgument("experiments", "empty server list");
  if (config.seeds.empty()) throw InvalidArgument("experiments", "no seeds");
  if (config.kernel_grid.empty() || config.lambda_grid.empty()) throw InvalidArgument("experiments", "empty search grid");
  std::vector<int> ms = config.m_list;
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  if (ms.front() < 1) throw InvalidArgument("experiments", "server counts must be >= 1");
  if (!(config.noise_sigma > 0)) throw InvalidArgument("experiments", "noise sigma must be > 0");

  const LabeledData test = sample_target(config.target, config.test_points);
  std::vector<std::vector<LabeledData>> groups;
  for (std::uint64_t s : config.seeds)
    groups.push_back(generate_training_data(config.target, config.base, config.rotations,
                                            NoiseModel::gaussian(config.noise_sigma, s)));

  struct Cell {
    int m;
    std::size_t seed_index;
  };
  std::vector<Cell> cells;
  for (int m : ms)
    for (std::size_t s = 0; s < config.seeds.size(); ++s) cells.push_back({m, s});

  const std::set<int> keep(config.residual_ms.begin(), config.residual_ms.end());
  std::vector<SweepRow> rows(cells.size());
  std::vector<std::optional<Eigen::VectorXd>> preds(cells.size());
  const int jobs = config.jobs > 0 ? config.jobs : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(jobs)
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell cell = cells[c];
    SweepRow& row = rows[c];
    row.m = cell.m;
    row.seed = config.seeds[cell.seed_index];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const GlobalEstimator est = fit_cell(config, groups[cell.seed_index], cell.m, row.seed);
      Eigen::VectorXd p = est(test.inputs);
      row.rmse = rmse(p, test.outputs);
      if (cell.seed_index == 0 && keep.count(cell.m)) preds[c] = std::move(p);
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    if (config.timing)
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    log::info("experiments: m=" + std::to_string(row.m) + " seed=" + std::to_string(row.seed) +
              (row.failed ? " failed: " + row.error : " rmse=" + std::to_string(row.rmse)));
  }

  ExperimentResult result;
  std::size_t n_total = 0;
  for (const LabeledData& g : groups.front()) n_total += g.size();
  result.config = sweep_provenance(config, n_total);
  result.rows = rows;
  for (int m : ms) {
    SweepSummary s{m, 0.0, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0};
    int ok = 0;
    for (const SweepRow& r : rows) {
      if (r.m != m) continue;
      if (r.failed) {
        ++s.failed;
        continue;
      }
      s.mean += r.rmse;
      s.min = std::min(s.min, r.rmse);
      s.max = std::max(s.max, r.rmse);
      ++ok;
    }
    if (ok) {
      s.mean /= ok;
    } else {
      s.mean = s.min = s.max = std::numeric_limits<double>::quiet_NaN();
    }
    result.summary.push_back(s);
  }
  for (std::size_t c = 0; c < cells.size(); ++c)
    if (preds[c]) result.residuals.push_back({cells[c].m, test.inputs.coords(), test.outputs, std::move(*preds[c])});
  return result;
}

void write_results(const std::string& dir, const ExperimentResult& result) {
  std::string csv = "m,seed,rmse,wall_ms\n";
  for (const SweepRow& r : result.rows)
    csv += std::to_string(r.m) + "," + std::to_string(r.seed) + "," +
           (r.failed ? std::string("nan") : io::format_double(r.rmse)) + "," + io::format_double(r.wall_ms) + "\n";
  io::write_text(dir + "/rmse.csv", csv);

  for (const ResidualField& f : result.residuals) {
    std::string s = "x,y,z,true,pred,err\n";
    for (Eigen::Index i = 0; i < f.points.cols(); ++i) {
      for (Eigen::Index k = 0; k < 3; ++k) s += io::format_double(f.points(k, i)) + ",";
      s += io::format_double(f.truth[i]) + "," + io::format_double(f.predicted[i]) + "," +
           io::format_double(f.predicted[i] - f.truth[i]) + "\n";
    }
    io::write_text(dir + "/residuals_m" + std::to_string(f.m) + ".csv", s);
  }

  nlohmann::json j = result.config;
  nlohmann::json summary = nlohmann::json::array();
  for (const SweepSummary& s : result.summary)
    summary.push_back({{"m", s.m}, {"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"failed", s.failed}});
  j["summary"] = summary;
  nlohmann::json failures = nlohmann::json::array();
  for (const SweepRow& r : result.rows)
    if (r.failed) failures.push_back({{"m", r.m}, {"seed", r.seed}, {"error", r.error}});
  j["failures"] = failures;
  io::write_json(dir + "/config.json", j);
}

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("experiments", "slope needs two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0)) throw InvalidArgument("experiments", "slope needs distinct x values");
  return sxy / sxx;
}

RateStudyResult rate_study(const RateStudyConfig& config) {
  if (config.sizes.size() < 2 || config.seeds.empty()) throw InvalidArgument("experiments", "rate study needs sizes and seeds");
  const int d = 2;
  const Kernel kernel = make_sobolev(d, config.gamma);
  const TargetFunction target =
      TargetFunction::bandlimited(random_bandlimited(kernel, config.target_degree, config.target_amplitude, 0));
  const LabeledData test = sample_target(target, spiral_points(config.test_size));

  RateStudyResult out;
  std::vector<double> lx, ly;
  for (std::size_t n : config.sizes) {
    const PointSet pts = fibonacci_points(n);
    const double lambda = theoretical_lambda(n, config.gamma, d);
    const QuadratureRule rule = build_quadrature(pts, quadrature_degree_floor(lambda, config.gamma));
    const Eigen::VectorXd f = eval_target(target, pts);
    const Eigen::MatrixXd g = batch::omp::gram(kernel, pts.coords());
    const Eigen::MatrixXd c = batch::omp::cross(kernel, test.inputs.coords(), pts.coords());
    std::vector<double> r;
    for (std::uint64_t seed : config.seeds) {
      const Eigen::VectorXd y = f + draw_noise(NoiseModel::gaussian(config.noise_sigma, seed), n, n);
      const Eigen::VectorXd a = wrls_coefficients(g, rule.weights, y, lambda);
      r.push_back(rmse(c * a, test.outputs));
    }
    double mean = 0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(r.size());
    out.sizes.push_back(n);
    out.mean_rmse.push_back(mean);
    out.rmse.push_back(r);
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(mean));
    log::info("experiments: rate study n=" + std::to_string(n) + " rmse=" + std::to_string(mean));
  }
  out.slope = regression_slope(lx, ly);
  return out;
}

}  // namespace sphfit
