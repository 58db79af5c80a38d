#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sphfit/error.hpp"
#include "sphfit/experiments.hpp"
#include "sphfit/io.hpp"

using namespace sphfit;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path = fs::temp_directory_path() / ("sphfit_io_" + std::to_string(::getpid()));
  TempDir() { fs::create_directories(path); }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

}  // namespace

TEST_CASE("point and labeled csv round trips") {
  TempDir t;
  const PointSet p = spiral_points(57);
  io::write_points_csv(t / "p.csv", p);
  CHECK(io::read_points_csv(t / "p.csv").same_nodes(p, 0.0));

  const LabeledData d = sample_target(TargetFunction::franke(), p);
  io::write_labeled_csv(t / "d.csv", d);
  const LabeledData e = io::read_labeled_csv(t / "d.csv");
  CHECK(e.inputs.same_nodes(p, 0.0));
  CHECK(e.outputs == d.outputs);

  std::ofstream(t / "bad.csv") << "x0,x1,x2\n1,0,0\n0,2,0\n";
  CHECK_THROWS_AS(io::read_points_csv(t / "bad.csv"), IoError);
  CHECK(io::read_points_csv(t / "bad.csv", true).coords()(1, 1) == 1.0);
  std::ofstream(t / "junk.csv") << "x0,x1,x2\n1,0,zero\n";
  CHECK_THROWS_AS(io::read_points_csv(t / "junk.csv"), IoError);
  CHECK_THROWS_AS(io::read_points_csv(t / "missing.csv"), IoError);
}

TEST_CASE("rule round trip") {
  TempDir t;
  const QuadratureRule r = build_quadrature(fibonacci_points(100), 5);
  io::write_rule(t / "r.csv", r);
  const QuadratureRule s = io::read_rule(t / "r.csv");
  CHECK(s.degree == 5);
  CHECK(s.weights == r.weights);
  CHECK(s.residual == r.residual);
  const auto side = io::read_json(t / "r.csv.json");
  CHECK(side["c1_observed"].get<double>() == r.c1_observed());
}

TEST_CASE("kernel json") {
  for (const Kernel& k : {make_sobolev(2, 2.5), make_gaussian_series(3, 0.8), make_gaussian_chordal(0.3),
                          make_wendland(), make_custom(2, {1.0, 0.25, 0.125})}) {
    const Kernel back = io::kernel_from_json(io::kernel_to_json(k));
    CHECK(back.tag() == k.tag());
    CHECK(back(0.37) == k(0.37));
  }
  CHECK(io::kernel_from_json({{"family", "sobolev"}, {"gamma", 2}}).coefficient(1) == doctest::Approx(1.0 / 9));
  CHECK_THROWS_AS(io::kernel_from_json({{"family", "gaussian_chordal"}}), InvalidArgument);
  CHECK_THROWS_AS(io::kernel_from_json({{"family", "cubic"}}), InvalidArgument);
}

TEST_CASE("estimator json round trips evaluate identically") {
  TempDir t;
  const auto groups = generate_training_data(TargetFunction::franke(), fibonacci_points(40), 10,
                                             NoiseModel::gaussian(0.1, 1));
  const auto parts = partition(groups, 15, 2);
  const std::vector<FitConfig> cfg(parts.size(), FitConfig{1e-3, 0, make_gaussian_chordal(0.5)});
  const GlobalEstimator g = dwrls_fit(build_shards(parts, cfg, true));
  io::write_json(t / "g.json", io::to_json(g));
  const GlobalEstimator h = io::global_estimator_from_json(io::read_json(t / "g.json"));
  const PointSet probe = spiral_points(200);
  CHECK(g(probe) == h(probe));
  CHECK(h.total_samples() == 400);

  const auto j = io::to_json(g.components()[0].estimator);
  CHECK(j.contains("coeffs"));
  CHECK(j.contains("centers"));
  CHECK_FALSE(j.contains("outputs"));
  CHECK_FALSE(j.contains("weights"));
  const LocalEstimator l = io::local_estimator_from_json(j);
  CHECK(l(probe) == g.components()[0].estimator(probe));
}

TEST_CASE("band-limited json and number formatting") {
  BandLimited f(2, 4);
  f.set({3, 2}, 0.1);
  f.set({0, 1}, -2.0);
  const BandLimited g = io::bandlimited_from_json(io::to_json(f));
  CHECK(g.coeffs() == f.coeffs());
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(std::stod(io::format_double(1.0 / 3)) == 1.0 / 3);
}
