#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sphfit/error.hpp"
#include "sphfit/geometry.hpp"

using namespace sphfit;
using std::numbers::pi;

namespace {

PointSet octahedron() {
  Eigen::MatrixXd x(3, 6);
  x << 1, -1, 0, 0, 0, 0,
       0, 0, 1, -1, 0, 0,
       0, 0, 0, 0, 1, -1;
  return PointSet(x);
}

}  // namespace

TEST_CASE("sphere points are normalized on construction") {
  SpherePoint p{3.0, 4.0, 0.0};
  CHECK(p.coords().norm() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p[0] == doctest::Approx(0.6));
  CHECK_THROWS_AS(SpherePoint({0.0, 0.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(SpherePoint({1.0}), InvalidArgument);
}

TEST_CASE("geodesic distance") {
  const SpherePoint n{0, 0, 1}, s{0, 0, -1}, x{1, 0, 0}, y{0, 1, 0};
  CHECK(geodesic_distance(n, n) == 0.0);
  CHECK(geodesic_distance(n, s) == doctest::Approx(pi));
  CHECK(geodesic_distance(x, y) == doctest::Approx(pi / 2));
  CHECK(geodesic_distance(x, y) == geodesic_distance(y, x));
  CHECK_THROWS_AS(geodesic_distance(x, SpherePoint{1, 0}), DimensionMismatch);
}

TEST_CASE("point sets reject duplicates and empty input") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 1, 0, 0, 0, 0;
  CHECK_THROWS_AS(PointSet{x}, InvalidArgument);
  CHECK_THROWS_AS(PointSet(Eigen::MatrixXd(3, 0)), InvalidArgument);
}

TEST_CASE("mesh metrics of simple configurations") {
  Eigen::MatrixXd two(3, 2);
  two << 0, 0, 0, 0, 1, -1;
  CHECK(mesh_metrics(PointSet(two)).separation_radius == doctest::Approx(pi / 2));

  const MeshMetrics m = mesh_metrics(octahedron());
  CHECK(m.separation_radius == doctest::Approx(pi / 4));
  // the covering radius is attained at face centers; the probe grid sees it from below
  CHECK(m.mesh_norm == doctest::Approx(std::acos(1 / std::sqrt(3.0))).epsilon(2e-2));
  CHECK(m.mesh_norm <= std::acos(1 / std::sqrt(3.0)) + 1e-12);
  CHECK(m.mesh_ratio >= 1.0);
  CHECK(m.quasi_uniformity_tau >= 2.0);

  Eigen::MatrixXd one(3, 1);
  one << 0, 0, 1;
  CHECK_THROWS_AS(mesh_metrics(PointSet(one)), InvalidArgument);
}

TEST_CASE("fibonacci point sets are quasi-uniform") {
  for (std::size_t n : {100, 500, 1038, 5000}) {
    const PointSet p = fibonacci_points(n);
    CHECK(p.size() == n);
    CHECK((p.coords().colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-12);
    MeshOptions o;
    o.probe_factor = n > 1000 ? 20 : 100;
    CHECK(mesh_metrics(p, o).mesh_ratio < 6.0);
  }
  MeshOptions o;
  o.probe_factor = 4;
  CHECK(mesh_metrics(fibonacci_points(1038), o).mesh_ratio < 4.0);
}

TEST_CASE("probe-grid mesh norm is stable under refinement") {
  const PointSet p = fibonacci_points(200);
  const double h1 = mesh_norm(p, fibonacci_points(100 * 200));
  const double h2 = mesh_norm(p, fibonacci_points(200 * 200));
  CHECK(std::abs(h1 - h2) / h2 < 0.02);
}

TEST_CASE("spiral points") {
  const PointSet p = spiral_points(10000);
  CHECK(p.size() == 10000);
  CHECK((p.coords().colwise().norm().array() - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(p.coords()(2, 0) == doctest::Approx(-1.0));
  CHECK(p.coords()(2, 9999) == doctest::Approx(1.0));
  MeshOptions o;
  o.probe_factor = 10;
  CHECK(mesh_metrics(spiral_points(1000), o).mesh_ratio < 6.0);
}

TEST_CASE("equal-area partition") {
  const PointSet one = equal_area_centers(1);
  CHECK(one.size() == 1);
  CHECK(one.coords()(2, 0) == doctest::Approx(1.0));

  const EqualAreaPartition p = equal_area_partition(10);
  CHECK(p.regions_per_zone == std::vector<int>{1, 4, 4, 1});
  // zone areas are proportional to the region counts
  double prev = 0.0;
  int cumulative = 0;
  for (std::size_t z = 0; z < p.regions_per_zone.size(); ++z) {
    cumulative += p.regions_per_zone[z];
    const double area = 2 * pi * (1 - std::cos(p.cap_colatitudes[z]));
    CHECK(area - prev == doctest::Approx(4 * pi / 10 * p.regions_per_zone[z]).epsilon(1e-12));
    prev = area;
  }
  CHECK(cumulative == 10);

  const PointSet c = equal_area_centers(10);
  CHECK(c.size() == 10);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = i + 1; j < 10; ++j) CHECK((c.column(i) - c.column(j)).norm() >= 1.0);

  for (std::size_t n : {2, 3, 7, 33, 100}) {
    const EqualAreaPartition q = equal_area_partition(n);
    int total = 0;
    for (int r : q.regions_per_zone) total += r;
    CHECK(total == static_cast<int>(n));
    CHECK(equal_area_centers(n).size() == n);
  }
}

TEST_CASE("rotations") {
  Eigen::MatrixXd x(3, 2);
  x << 1, 0, 0, 0, 0, 1;
  const PointSet p(x);
  const PointSet r = rotate(p, 5);
  CHECK(r.coords()(0, 0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.coords()(1, 0) == doctest::Approx(1.0));
  CHECK(r.coords()(2, 1) == doctest::Approx(1.0));
  CHECK(rotate(p, 0).same_nodes(p, 0.0));
  CHECK_THROWS_AS(rotate(p, -1), InvalidArgument);
  CHECK_THROWS_AS(rotate(PointSet(Eigen::MatrixXd::Identity(4, 2)), 1), InvalidArgument);

  // isometry
  const PointSet f = fibonacci_points(50);
  for (int j = 1; j <= 10; ++j) {
    const PointSet g = rotate(f, j);
    const Eigen::MatrixXd d0 = f.coords().transpose() * f.coords();
    const Eigen::MatrixXd d1 = g.coords().transpose() * g.coords();
    CHECK((d0 - d1).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("generator dispatch") {
  CHECK(parse_generator_kind("spiral") == GeneratorKind::spiral);
  CHECK(to_string(GeneratorKind::equal_area_centers) == "equal_area_centers");
  CHECK_THROWS_AS(parse_generator_kind("hexagon"), InvalidArgument);
  GeneratorSpec spec;
  spec.kind = GeneratorKind::fibonacci;
  CHECK(generate_points(spec, 20).size() == 20);
  spec.d = 3;
  CHECK_THROWS_AS(generate_points(spec, 20), InvalidArgument);
  spec = {GeneratorKind::file, "/nonexistent/points.csv"};
  CHECK_THROWS_AS(generate_points(spec, 0), IoError);
}

TEST_CASE("subset and concat") {
  const PointSet f = fibonacci_points(10);
  const std::vector<std::size_t> idx{3, 1};
  const PointSet s = f.subset(idx);
  CHECK(s.size() == 2);
  CHECK(s.column(0) == f.column(3));
  const std::vector<PointSet> parts{f.subset(std::vector<std::size_t>{0, 1}), f.subset(std::vector<std::size_t>{2})};
  CHECK(PointSet::concat(parts).size() == 3);
  CHECK_THROWS_AS(f.subset(std::vector<std::size_t>{10}), InvalidArgument);
}
