#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sphfit/batch.hpp"
#include "sphfit/distributed.hpp"
#include "sphfit/error.hpp"
#include "sphfit/experiments.hpp"
#include "sphfit/io.hpp"
#include "sphfit/log.hpp"
#include "sphfit/quadrature.hpp"

using nlohmann::json;
using namespace sphfit;

namespace {

// --config reader: nested objects address subcommands, e.g.
// {"seed": 3, "dfit": {"servers": 20}, "quadrature": {"build": {"degree": 8}}}.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void flatten(const json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        std::vector<std::string> p = parents;
        p.push_back(key);
        flatten(value, p, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const json& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

struct Global {
  std::uint64_t seed = 0;
  std::string log_level = "warn";
  bool dry_run = false;
};

Kernel load_kernel(const std::string& spec) {
  const auto first = spec.find_first_not_of(" \t");
  if (first != std::string::npos && spec[first] == '{') {
    try {
      return io::kernel_from_json(json::parse(spec));
    } catch (const json::exception& e) {
      throw InvalidArgument("cli", std::string("malformed kernel spec: ") + e.what());
    }
  }
  return io::kernel_from_json(io::read_json(spec));
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

json resolved_plan(const CLI::App& app) {
  json opts = json::object();
  for (const CLI::Option* o : app.get_options()) {
    const std::string name = o->get_single_name();
    if (name.empty() || name == "help") continue;
    if (o->count() > 0) {
      const auto& r = o->results();
      opts[name] = r.size() == 1 ? json(r.front()) : json(r);
    } else {
      opts[name] = o->get_default_str();
    }
  }
  return opts;
}

// gen-points

struct GenPointsArgs {
  std::string kind = "fibonacci";
  std::size_t n = 0;
  std::string path;
  std::string out;
  bool lenient = false;
};

void run_gen_points(const GenPointsArgs& a, const Global& g) {
  GeneratorSpec spec;
  spec.kind = parse_generator_kind(a.kind);
  spec.path = a.path;
  spec.lenient = a.lenient;
  if (spec.kind != GeneratorKind::file && a.n == 0) throw InvalidArgument("cli", "--n is required");
  const PointSet p = generate_points(spec, a.n, g.seed);
  io::write_points_csv(a.out, p);
  print({{"points", p.size()}, {"out", a.out}});
}

// quadrature

struct QuadBuildArgs {
  std::string points;
  int degree = -1;
  double tolerance = 1e-8;
  std::string out;
  bool lenient = false;
};

void run_quad_build(const QuadBuildArgs& a) {
  const PointSet p = io::read_points_csv(a.points, a.lenient);
  QuadratureOptions o;
  o.tolerance = a.tolerance;
  const int s = a.degree >= 0 ? a.degree : default_quadrature_degree(p.size());
  const QuadratureRule r = build_quadrature(p, s, o);
  io::write_rule(a.out, r);
  print({{"nodes", p.size()}, {"degree", r.degree}, {"residual", r.residual},
         {"c1_observed", r.c1_observed()}, {"out", a.out}});
}

struct QuadVerifyArgs {
  std::string rule;
  int degree = 0;
};

void run_quad_verify(const QuadVerifyArgs& a) {
  const QuadratureRule r = io::read_rule(a.rule);
  const double defect = verify_exactness(r, a.degree);
  print({{"degree", a.degree}, {"defect", defect}, {"exact", defect < 1e-8},
         {"weight_sum", r.weight_sum()}, {"c1_observed", r.c1_observed()}});
}

// fit

struct FitArgs {
  std::string data;
  std::string rule;
  bool equal_weights = false;
  double lambda = 0.0;
  std::string kernel;
  std::string out;
};

void run_fit(const FitArgs& a) {
  const LabeledData d = io::read_labeled_csv(a.data);
  QuadratureRule r = a.equal_weights ? uniform_rule(d.inputs) : io::read_rule(a.rule);
  if (!a.equal_weights && !r.nodes.same_nodes(d.inputs, 1e-12))
    throw InvalidArgument("cli", "rule nodes do not match the data inputs", "rule=" + a.rule);
  r.nodes = d.inputs;
  const FitConfig cfg{a.lambda, r.degree, load_kernel(a.kernel)};
  const LocalEstimator est = wrls_fit(d, r, cfg);
  io::write_json(a.out, io::to_json(est));
  const Eigen::VectorXd fitted = est(d.inputs);
  print({{"samples", d.size()}, {"lambda", a.lambda}, {"kernel", cfg.kernel.tag().describe()},
         {"training_rmse", rmse(fitted, d.outputs)}, {"out", a.out}});
}

// dfit

struct DfitArgs {
  std::vector<std::string> groups;
  int servers = 0;
  double gamma = 2.0;
  std::string mode = "theoretical";
  std::string kernel;
  std::string weights = "quadrature";
  std::string grid = "franke";
  bool allow_partial = false;
  int jobs = 0;
  std::string out;
};

void run_dfit(const DfitArgs& a, const Global& g) {
  std::vector<LabeledData> groups;
  for (const std::string& p : a.groups) groups.push_back(io::read_labeled_csv(p));
  const std::vector<LabeledData> parts = partition(groups, a.servers, g.seed);

  ShardPlanOptions o;
  o.rule = parse_lambda_rule(a.mode);
  o.gamma = a.gamma;
  if (a.weights != "quadrature" && a.weights != "equal")
    throw InvalidArgument("cli", "--weights must be quadrature or equal");
  o.equal_weights = a.weights == "equal";
  if (!a.kernel.empty()) o.kernel = load_kernel(a.kernel);
  if (o.rule == LambdaRule::cv_rescaled) {
    SweepConfig grids(TargetFunction::franke(), parts.front().inputs, parts.front().inputs);
    apply_default_grids(grids, a.grid);
    o.cv.kernel_grid = grids.kernel_grid;
    o.cv.lambda_grid = grids.lambda_grid;
    o.cv.seed = g.seed;
  }
  const ShardPlan plan = per_shard_config(parts, o);
  const std::vector<Shard> shards = build_shards(parts, plan.configs, o.equal_weights);
  DwrlsReport report;
  const GlobalEstimator est = dwrls_fit(shards, {a.allow_partial, a.jobs}, &report);
  io::write_json(a.out, io::to_json(est));

  json servers = json::array();
  for (const Shard& s : shards)
    servers.push_back({{"server_id", s.server_id}, {"samples", s.data.size()}, {"lambda", s.cfg.lambda},
                       {"quad_degree", s.cfg.quad_degree}, {"kernel", s.cfg.kernel.tag().describe()}});
  print({{"servers", servers}, {"total_samples", est.total_samples()}, {"warnings", plan.warnings},
         {"failed_servers", report.failed_servers}, {"out", a.out}});
}

// simulate

struct SimulateArgs {
  std::string target = "franke";
  std::string design_file;
  std::size_t base_size = 1038;
  std::vector<int> m{1, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  int seeds = 5;
  std::vector<int> residuals;
  std::size_t test_size = 10000;
  double noise_sigma = 0.1;
  int rotations = 10;
  int jobs = 0;
  bool no_timing = false;
  std::string out;
};

void run_simulate(const SimulateArgs& a, const Global& g) {
  TargetFunction target = a.target == "franke"     ? TargetFunction::franke()
                          : a.target == "wendland" ? TargetFunction::wendland_sum()
                                                   : throw InvalidArgument("cli", "--target must be franke or wendland");
  std::string source = "fibonacci(" + std::to_string(a.base_size) + ")";
  PointSet base = a.design_file.empty() ? fibonacci_points(a.base_size) : io::read_points_csv(a.design_file);
  if (!a.design_file.empty()) source = a.design_file;
  SweepConfig c(std::move(target), std::move(base), spiral_points(a.test_size));
  c.base_source = source;
  apply_default_grids(c, a.target);
  c.m_list = a.m;
  for (int i = 1; i <= a.seeds; ++i) c.seeds.push_back(g.seed + static_cast<std::uint64_t>(i));
  c.residual_ms = a.residuals.empty() ? a.m : a.residuals;
  c.noise_sigma = a.noise_sigma;
  c.rotations = a.rotations;
  c.jobs = a.jobs;
  c.timing = !a.no_timing;
  const ExperimentResult r = run_sweep(c);
  write_results(a.out, r);
  json summary = json::array();
  for (const SweepSummary& s : r.summary)
    summary.push_back({{"m", s.m}, {"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"failed", s.failed}});
  print({{"summary", summary}, {"out", a.out}});
}

// eval

struct EvalArgs {
  std::string estimator;
  std::string points;
  std::string data;
  std::string out;
};

void run_eval(const EvalArgs& a) {
  if (a.points.empty() == a.data.empty()) throw InvalidArgument("cli", "give exactly one of --points and --data");
  const json j = io::read_json(a.estimator);
  std::optional<LabeledData> data;
  if (!a.data.empty()) data = io::read_labeled_csv(a.data);
  const PointSet pts = data ? data->inputs : io::read_points_csv(a.points);
  const Eigen::VectorXd v = j.contains("components") ? io::global_estimator_from_json(j)(pts)
                                                     : io::local_estimator_from_json(j)(pts);
  if (!a.out.empty()) {
    std::string s = "x0,x1,x2,f\n";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto x = pts.column(i);
      s += io::format_double(x[0]) + "," + io::format_double(x[1]) + "," + io::format_double(x[2]) + "," +
           io::format_double(v[static_cast<Eigen::Index>(i)]) + "\n";
    }
    io::write_text(a.out, s);
  }
  json report = {{"points", pts.size()}};
  if (data) report["rmse"] = rmse(v, data->outputs);
  if (!a.out.empty()) report["out"] = a.out;
  print(report);
}

json error_json(const std::string& code, const std::string& module, const std::string& message,
                const std::string& context) {
  return {{"code", code}, {"module", module}, {"message", message}, {"context", context}};
}

log::Level parse_level(const std::string& s) {
  if (s == "debug") return log::Level::debug;
  if (s == "info") return log::Level::info;
  if (s == "warn") return log::Level::warn;
  if (s == "error") return log::Level::error;
  return log::Level::off;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed weighted regularized least squares on the sphere"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file with option values; command-line flags win");

  Global g;
  app.add_option("--seed", g.seed, "Run seed for all random streams")->capture_default_str();
  app.add_option("--log-level", g.log_level, "debug, info, warn, error or off")
      ->check(CLI::IsMember({"debug", "info", "warn", "error", "off"}))
      ->capture_default_str();
  app.add_flag("--dry-run", g.dry_run, "Print the resolved plan and exit");
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads for the parallel kernels (0 = all)")
      ->check(CLI::NonNegativeNumber);

  GenPointsArgs gp;
  auto* gen = app.add_subcommand("gen-points", "Generate a point set on the sphere");
  gen->add_option("--kind", gp.kind, "fibonacci, spiral, equal_area_centers or file")
      ->check(CLI::IsMember({"fibonacci", "spiral", "equal_area_centers", "file"}))
      ->capture_default_str();
  gen->add_option("--n", gp.n, "Number of points")->check(CLI::PositiveNumber);
  gen->add_option("--path", gp.path, "Input file for --kind file")->check(CLI::ExistingFile);
  gen->add_flag("--lenient", gp.lenient, "Renormalize rows that are not of unit norm");
  gen->add_option("--out", gp.out, "Output CSV")->required();

  auto* quad = app.add_subcommand("quadrature", "Build or verify positive quadrature rules");
  quad->require_subcommand(1);
  QuadBuildArgs qb;
  auto* qbuild = quad->add_subcommand("build", "Positive rule exact to a given degree");
  qbuild->add_option("--points", qb.points, "Node CSV")->required()->check(CLI::ExistingFile);
  qbuild->add_option("--degree", qb.degree, "Exactness degree (default: largest s with 2(s+1)^2 <= n)")
      ->check(CLI::NonNegativeNumber);
  qbuild->add_option("--tolerance", qb.tolerance, "Accepted normalized moment residual")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  qbuild->add_flag("--lenient", qb.lenient, "Renormalize rows that are not of unit norm");
  qbuild->add_option("--out", qb.out, "Output rule CSV (a .json sidecar is written next to it)")->required();
  QuadVerifyArgs qv;
  auto* qverify = quad->add_subcommand("verify", "Moment defect of a rule up to a degree");
  qverify->add_option("--rule", qv.rule, "Rule CSV")->required()->check(CLI::ExistingFile);
  qverify->add_option("--degree", qv.degree, "Degree to check")->required()->check(CLI::NonNegativeNumber);

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "Single-server WRLS fit");
  fit->add_option("--data", fa.data, "Labeled CSV x0,x1,x2,y")->required()->check(CLI::ExistingFile);
  auto* rule_opt = fit->add_option("--rule", fa.rule, "Quadrature rule CSV on the data inputs")
                       ->check(CLI::ExistingFile);
  fit->add_flag("--equal-weights", fa.equal_weights, "Use weights 4 pi / n")->excludes(rule_opt);
  fit->add_option("--lambda", fa.lambda, "Regularization parameter")->required()->check(CLI::PositiveNumber);
  fit->add_option("--kernel", fa.kernel, "Kernel spec: JSON file or inline JSON")->required();
  fit->add_option("--out", fa.out, "Estimator JSON")->required();

  DfitArgs da;
  auto* dfit = app.add_subcommand("dfit", "Distributed fit over sample groups");
  dfit->add_option("--groups", da.groups, "Labeled CSV per group")->required()->check(CLI::ExistingFile);
  dfit->add_option("--servers", da.servers, "Number of servers m")->required()->check(CLI::PositiveNumber);
  dfit->add_option("--gamma", da.gamma, "Smoothness index of the Sobolev schedule")->capture_default_str();
  dfit->add_option("--mode", da.mode, "Parameter rule: theoretical or cv")
      ->check(CLI::IsMember({"theoretical", "cv"}))
      ->capture_default_str();
  dfit->add_option("--kernel", da.kernel, "Kernel spec for the theoretical mode (default Sobolev(gamma))");
  dfit->add_option("--weights", da.weights, "quadrature or equal")
      ->check(CLI::IsMember({"quadrature", "equal"}))
      ->capture_default_str();
  dfit->add_option("--grid", da.grid, "Search grids for --mode cv: franke or wendland")
      ->check(CLI::IsMember({"franke", "wendland"}))
      ->capture_default_str();
  dfit->add_flag("--allow-partial", da.allow_partial, "Drop failed servers and renormalize");
  dfit->add_option("--jobs", da.jobs, "Concurrent server fits (0 = all cores)")->check(CLI::NonNegativeNumber);
  dfit->add_option("--out", da.out, "Global estimator JSON")->required();

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Server-count sweep of the simulation study");
  sim->add_option("--target", sa.target, "franke or wendland")
      ->check(CLI::IsMember({"franke", "wendland"}))
      ->capture_default_str();
  sim->add_option("--design-file", sa.design_file, "Base node CSV (default: Fibonacci nodes)")
      ->check(CLI::ExistingFile);
  sim->add_option("--base-size", sa.base_size, "Fibonacci base size without --design-file")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim->add_option("--m", sa.m, "Server counts")->delimiter(',')->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--seeds", sa.seeds, "Number of seeds (seed+1 .. seed+K)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim->add_option("--residuals", sa.residuals, "Server counts whose residual field is written (default: all)")
      ->delimiter(',');
  sim->add_option("--test-size", sa.test_size, "Spiral test points")->check(CLI::PositiveNumber)->capture_default_str();
  sim->add_option("--noise-sigma", sa.noise_sigma, "Gaussian noise level")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim->add_option("--rotations", sa.rotations, "Rotated copies of the base set")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim->add_option("--jobs", sa.jobs, "Concurrent sweep cells (0 = all cores)")->check(CLI::NonNegativeNumber);
  sim->add_flag("--no-timing", sa.no_timing, "Write wall_ms = 0 for byte-identical output");
  sim->add_option("--out", sa.out, "Output directory")->required();

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate an estimator");
  eval->add_option("--estimator", ea.estimator, "Local or global estimator JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--points", ea.points, "Point CSV")->check(CLI::ExistingFile);
  eval->add_option("--data", ea.data, "Labeled CSV; also reports the RMSE")->check(CLI::ExistingFile);
  eval->add_option("--out", ea.out, "Output CSV x0,x1,x2,f");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << error_json("UsageError", "cli", e.what(), e.get_name()).dump() << "\n";
    return 1;
  }

  log::set_level(parse_level(g.log_level));
  batch::set_threads(threads);

  CLI::App* sub = app.get_subcommands().front();
  CLI::App* leaf = sub == quad ? sub->get_subcommands().front() : sub;
  if (g.dry_run) {
    std::string name = sub->get_name();
    if (leaf != sub) name += " " + leaf->get_name();
    print({{"command", name}, {"global", resolved_plan(app)}, {"options", resolved_plan(*leaf)}});
    return 0;
  }

  try {
    if (sub == gen) run_gen_points(gp, g);
    else if (leaf == qbuild) run_quad_build(qb);
    else if (leaf == qverify) run_quad_verify(qv);
    else if (sub == fit) {
      if (fa.rule.empty() && !fa.equal_weights) throw InvalidArgument("cli", "give --rule or --equal-weights");
      run_fit(fa);
    } else if (sub == dfit) run_dfit(da, g);
    else if (sub == sim) run_simulate(sa, g);
    else if (sub == eval) run_eval(ea);
  } catch (const Error& e) {
    std::cerr << error_json(e.code(), e.module(), e.what(), e.context()).dump() << "\n";
    return e.numerical() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << error_json("InternalError", "cli", e.what(), "").dump() << "\n";
    return 2;
  }
  return 0;
}
