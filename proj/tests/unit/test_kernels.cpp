#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include <Eigen/Eigenvalues>

#include "sphfit/error.hpp"
#include "sphfit/harmonics.hpp"
#include "sphfit/kernels.hpp"
#include "sphfit/quadrature.hpp"
#include "sphfit/special.hpp"

using namespace sphfit;
using std::numbers::pi;

namespace {

PointSet random_points(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(3, static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (int i = 0; i < 3; ++i) x(i, j) = g(rng);
  return PointSet(x);
}

double partial_sum(const Kernel& k, double t, int max_degree) {
  double s = 0.0;
  for (int j = 0; j <= max_degree; ++j)
    s += k.coefficient(j) * dim_harmonic(j, k.dim()) / special::sphere_volume(k.dim()) *
         legendre(j, k.dim(), t);
  return s;
}

}  // namespace

TEST_CASE("sobolev coefficients") {
  const Kernel k = make_sobolev(2, 1.5);
  CHECK(k.coefficient(0) == 1.0);
  CHECK(k.coefficient(1) == doctest::Approx(std::pow(3.0, -1.5)));
  CHECK(k.coefficient(1) == doctest::Approx(0.192450).epsilon(1e-6));
  for (double gamma : {1.5, 2.0, 3.0}) {
    const Kernel s = make_sobolev(2, gamma);
    for (int j = 50; j <= 400; j += 50) {
      const double r = s.coefficient(j) * std::pow(j, 2 * gamma);
      CHECK(r > 0.5);
      CHECK(r < 2.0);
    }
    for (int j = 1; j < 100; ++j) {
      CHECK(s.coefficient(j) > 0.0);
      CHECK(s.coefficient(j) < 1.0);
    }
  }
  CHECK(make_sobolev(3, 2.0).coefficient(2) == doctest::Approx(std::pow(9.0, -2.0)));
  CHECK_THROWS_AS(make_sobolev(2, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_sobolev(4, 2.0), InvalidArgument);
}

TEST_CASE("sobolev evaluation matches a partial sum with doubled cutoff") {
  const Kernel k = make_sobolev(2, 2.0);
  CHECK_FALSE(k.has_closed_form());
  const int cutoff = k.truncation();
  CHECK(cutoff >= 100);
  const double reference = partial_sum(k, 1.0, 2 * cutoff);
  CHECK(std::abs(k(1.0) - reference) <= k.tail_bound() + 1e-12);
  CHECK(k.tail_bound() < 1e-6);
  for (double t : {-0.7, 0.0, 0.5, 0.99})
    CHECK(std::abs(k(t) - partial_sum(k, t, 2 * cutoff)) <= k.tail_bound() + 1e-12);
  // integral comparison: sum_{k > K} (2k+1)/(4 pi) (k^2+k+1)^{-2} ~ 1/(4 pi K^2)
  CHECK(k.tail_bound() == doctest::Approx(1 / (4 * pi * cutoff * cutoff)).epsilon(0.05));
  // steeper decay reaches the default tolerance
  const Kernel s3 = make_sobolev(2, 3.0);
  CHECK(s3.tail_bound() < 1e-10);
  CHECK(std::abs(s3(1.0) - partial_sum(s3, 1.0, 2 * s3.truncation())) < 1e-10);
}

TEST_CASE("gaussian series kernel") {
  const Kernel g = make_gaussian_series(2, 1.0);
  CHECK(g.has_closed_form());
  for (int j = 0; j <= 60; ++j) CHECK(g.coefficient(j) > 0.0);
  // coefficients against the projection integral of the closed form
  for (double tau : {0.5, 1.0, 2.0}) {
    const Kernel k = make_gaussian_series(2, tau);
    const auto proj = special::projection_coefficients([&](double t) { return k(t); }, 2, 10, -1.0, 256);
    for (int j = 0; j <= 10; ++j)
      CHECK(std::abs(proj[j] - k.coefficient(j)) <= 1e-8 * std::max(1.0, k.coefficient(0)));
  }
  for (int d : {2, 3}) {
    const Kernel k = make_gaussian_series(d, 0.7);
    for (double t = -1.0; t <= 1.0; t += 0.01)
      CHECK(std::abs(k(t) - k.series(t, k.truncation())) < 1e-6);
  }
  CHECK(g(1.0) == doctest::Approx(1.0));
  CHECK(g(0.0) == doctest::Approx(std::exp(-2.0)));
  CHECK_THROWS_AS(make_gaussian_series(2, 0.001), InvalidArgument);
  CHECK_THROWS_AS(make_gaussian_series(2, -1.0), InvalidArgument);
}

TEST_CASE("wendland and chordal gaussian") {
  CHECK(wendland_profile(0.0) == 1.0);
  for (double u : {1.0, 1.3, 2.0}) CHECK(wendland_profile(u) == 0.0);
  CHECK(wendland_profile(0.5) == doctest::Approx(std::pow(0.5, 8) * (32 * 0.125 + 25 * 0.25 + 4 + 1)));

  const Kernel w = make_wendland();
  CHECK(w(1.0) == 1.0);
  CHECK(w(0.5) == 0.0);
  CHECK(w(-1.0) == 0.0);
  CHECK(w(0.9) == doctest::Approx(wendland_profile(std::sqrt(0.2))));
  CHECK(w.support_lower() == doctest::Approx(0.5));
  MESSAGE("wendland truncation " << w.truncation() << " tail " << w.tail_bound());
  CHECK(w.truncation() >= 20);

  const Kernel c = make_gaussian_chordal(0.3);
  CHECK(c(1.0) == 1.0);
  CHECK(c(0.2) == doctest::Approx(std::exp(-1.6 / (2 * 0.09))));
  const Kernel twin = make_gaussian_series(2, 0.3 * std::sqrt(2.0));
  for (int j = 0; j < 30; ++j) CHECK(c.coefficient(j) == doctest::Approx(twin.coefficient(j)).epsilon(1e-13));

  // too narrow for the Bessel series: projected on the effective support
  const Kernel narrow = make_gaussian_chordal(0.003);
  const double z = 1 / 0.003 / 0.003;
  CHECK(narrow.coefficient(0) == doctest::Approx(2 * pi * (1 - std::exp(-2 * z)) / z).epsilon(1e-10));
  CHECK(narrow(1.0) == 1.0);

  // lazily projected coefficients reproduce the closed form
  for (const Kernel& k : {w, c, make_gaussian_chordal(1.0)}) {
    CHECK(k.truncation() >= 8);
    CHECK(k.tail_bound() < 1e-8);
    for (int j = 0; j <= k.truncation(); ++j) CHECK(k.coefficient(j) > 0.0);
    for (double t : {-0.9, 0.0, 0.6, 0.95, 1.0})
      CHECK(std::abs(k(t) - k.series(t, k.truncation())) <= k.tail_bound() + 1e-9);
  }
}

TEST_CASE("projected coefficients are computed once under concurrent access") {
  const Kernel w = make_wendland();
  std::vector<double> seen(8);
  std::vector<std::thread> pool;
  for (int i = 0; i < 8; ++i) pool.emplace_back([&, i] { seen[i] = w.coefficient(100 + i % 2); });
  for (auto& t : pool) t.join();
  for (int i = 0; i < 8; ++i) CHECK(seen[i] == w.coefficient(100 + i % 2));
}

TEST_CASE("every kernel peaks at t = 1 and has monotone partial sums") {
  const std::vector<Kernel> ks{make_sobolev(2, 2.0), make_gaussian_series(2, 0.8),
                               make_gaussian_chordal(0.4), make_wendland()};
  for (const Kernel& k : ks) {
    const double top = k(1.0);
    for (int i = 0; i <= 1000; ++i) CHECK(k(-1.0 + i * 0.002) <= top + 1e-12);
    double prev = 0.0;
    for (int j = 0; j <= std::min(60, k.truncation()); ++j) {
      const double s = prev + k.coefficient(j) * (2 * j + 1) / (4 * pi);
      CHECK(s > prev);
      prev = s;
    }
  }
}

TEST_CASE("gram matrices") {
  const Kernel w = make_wendland();
  const PointSet single(Eigen::MatrixXd(Eigen::Vector3d(0, 0, 1)));
  CHECK(gram_matrix(w, single)(0, 0) == 1.0);

  Eigen::MatrixXd anti(3, 2);
  anti << 0, 0, 0, 0, 1, -1;
  CHECK(gram_matrix(w, PointSet(anti)).isApprox(Eigen::Matrix2d::Identity()));

  const std::vector<Kernel> ks{make_sobolev(2, 2.0), make_gaussian_series(2, 1.0),
                               make_gaussian_chordal(0.5), w};
  for (const Kernel& k : ks)
    for (unsigned seed : {1u, 2u, 3u}) {
      const PointSet p = random_points(50, seed);
      const Eigen::MatrixXd g = gram_matrix(k, p);
      CHECK(g == g.transpose());
      for (Eigen::Index i = 0; i < g.rows(); ++i) CHECK(g(i, i) == doctest::Approx(k(1.0)));
      CHECK(g(3, 7) == doctest::Approx(k(p.point(3).dot(p.point(7)))).epsilon(1e-14));
      CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff() >= -1e-10);
    }
  const PointSet f = fibonacci_points(200);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram_matrix(ks[2], f)).eigenvalues().minCoeff() >= -1e-10);

  const Eigen::MatrixXd c = cross_matrix(w, random_points(5, 9), f);
  CHECK(c.rows() == 5);
  CHECK(c.cols() == 200);
  CHECK_THROWS_AS(gram_matrix(make_sobolev(3, 2.0), f), DimensionMismatch);
  CHECK_THROWS_AS(gram_matrix(Kernel{}, f), InvalidArgument);
}

TEST_CASE("psi norms") {
  const Kernel k = make_sobolev(2, 2.0);
  BandLimited f(2, 4), zero(2, 4);
  f.set({2, 1}, 1.0);
  CHECK(psi_norm(f, f, {0.0, k}) == 0.0);
  CHECK(psi_norm(f, zero, {0.0, k}) == doctest::Approx(1.0));
  BandLimited c(2, 4);
  c.set({2, 1}, -3.0);
  CHECK(psi_norm(c, zero, {1.0, k}) == doctest::Approx(3.0 / std::sqrt(k.coefficient(2))));
  CHECK(psi_norm(c, zero, {0.5, k}) == doctest::Approx(3.0 * std::pow(k.coefficient(2), -0.25)));
  CHECK_THROWS_AS(psi_norm(f, zero, {1.5, k}), InvalidArgument);

  // r = 0 equals the discrete L^2 distance under an exact rule
  BandLimited g(2, 4);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n;
  for (int d = 0; d <= 4; ++d)
    for (int l = 1; l <= 2 * d + 1; ++l) g.set({d, l}, n(rng));
  const QuadratureRule rule = build_quadrature(fibonacci_points(300), 8);
  const Eigen::VectorXd v = eval_bandlimited(g, rule.nodes) - eval_bandlimited(f, rule.nodes);
  double disc = 0.0;
  for (std::size_t i = 0; i < rule.weights.size(); ++i)
    disc += rule.weights[i] * v[static_cast<Eigen::Index>(i)] * v[static_cast<Eigen::Index>(i)];
  CHECK(std::abs(std::sqrt(disc) - psi_norm(g, f, {0.0, k})) < 1e-8);
}

TEST_CASE("kernel tags") {
  CHECK(parse_kernel_family("wendland") == KernelFamily::wendland);
  CHECK(to_string(KernelFamily::gaussian_chordal) == "gaussian_chordal");
  CHECK_THROWS_AS(parse_kernel_family("matern"), InvalidArgument);
  const Kernel k = make_kernel({KernelFamily::gaussian_chordal, 2, 0.4});
  CHECK(k(0.3) == make_gaussian_chordal(0.4)(0.3));
  CHECK_THROWS_AS(make_kernel(make_custom(2, {1.0, 0.5}).tag()), InvalidArgument);
  CHECK_THROWS_AS(make_custom(2, {1.0, 0.0}), InvalidArgument);
  const Kernel cu = make_custom(2, {1.0, 0.5});
  CHECK(cu(0.5) == doctest::Approx(1 / (4 * pi) + 0.5 * 3 / (4 * pi) * 0.5));
}
