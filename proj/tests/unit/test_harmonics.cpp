#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sphfit/error.hpp"
#include "sphfit/geometry.hpp"
#include "sphfit/harmonics.hpp"
#include "sphfit/special.hpp"

using namespace sphfit;
using std::numbers::pi;

namespace {

// Homogeneous polynomials of degree k in d+1 variables: C(k+d, d) monomials.
std::int64_t count_monomials(int k, int vars) {
  if (vars == 1) return 1;
  std::int64_t n = 0;
  for (int i = 0; i <= k; ++i) n += count_monomials(k - i, vars - 1);
  return n;
}

// Gegenbauer C_k^lambda via the explicit sum, normalized to 1 at t = 1.
double gegenbauer_normalized(int k, double lambda, double t) {
  auto c = [&](double x) {
    double s = 0.0;
    for (int j = 0; j <= k / 2; ++j) {
      s += std::pow(-1.0, j) * std::tgamma(k - j + lambda) /
           (std::tgamma(lambda) * std::tgamma(j + 1) * std::tgamma(k - 2 * j + 1)) *
           std::pow(2 * x, k - 2 * j);
    }
    return s;
  };
  return c(t) / c(1.0);
}

// Product rule: Gauss-Legendre in z times equispaced in azimuth, exact for
// polynomials of degree < 2 * nz in z and trigonometric order < nphi.
struct ProductRule {
  std::vector<std::array<double, 3>> x;
  std::vector<double> w;
};

ProductRule product_rule(int nz, int nphi) {
  const auto g = special::gauss_jacobi(nz, 0.0, 0.0);
  ProductRule r;
  for (int i = 0; i < nz; ++i) {
    const double z = g.nodes[i], rho = std::sqrt(1 - z * z);
    for (int j = 0; j < nphi; ++j) {
      const double phi = 2 * pi * (j + 0.5) / nphi;
      r.x.push_back({rho * std::cos(phi), rho * std::sin(phi), z});
      r.w.push_back(g.weights[i] * 2 * pi / nphi);
    }
  }
  return r;
}

}  // namespace

TEST_CASE("harmonic space dimensions match monomial counts") {
  for (int d : {1, 2, 3, 4, 6})
    for (int k = 0; k <= 20; ++k) {
      const std::int64_t expect =
          count_monomials(k, d + 1) - (k >= 2 ? count_monomials(k - 2, d + 1) : 0);
      CHECK(dim_harmonic(k, d) == expect);
    }
  CHECK(dim_harmonic(0, 1) == 1);
  CHECK(dim_harmonic(5, 1) == 2);
  CHECK(dim_harmonic(7, 2) == 15);
  std::int64_t total = 0;
  for (int k = 0; k <= 45; ++k) total += dim_harmonic(k, 2);
  CHECK(total == 2116);
  CHECK(dim_polynomials(45, 2) == 2116);
  CHECK(dim_polynomials(12, 3) == [] {
    std::int64_t t = 0;
    for (int k = 0; k <= 12; ++k) t += dim_harmonic(k, 3);
    return t;
  }());
  CHECK_THROWS_AS(dim_harmonic(-1, 2), InvalidArgument);
  CHECK_THROWS_AS(dim_harmonic(1000000, 40), InvalidArgument);
}

TEST_CASE("legendre polynomials") {
  for (int d : {2, 3, 4, 7})
    for (int k : {0, 1, 2, 5, 7, 12})
      for (double t : {-0.9, -0.3, 0.0, 0.3, 0.77}) {
        CHECK(legendre(k, d, t) ==
              doctest::Approx(gegenbauer_normalized(k, (d - 1) / 2.0, t)).epsilon(1e-12));
      }
  CHECK(legendre(7, 4, 0.3) == doctest::Approx(gegenbauer_normalized(7, 1.5, 0.3)).epsilon(1e-13));
  // classical Legendre on S^2 and Chebyshev on S^1
  CHECK(legendre(2, 2, 0.4) == doctest::Approx(0.5 * (3 * 0.16 - 1)));
  CHECK(legendre(3, 1, 0.4) == doctest::Approx(std::cos(3 * std::acos(0.4))));
  for (int k = 0; k < 30; ++k) {
    CHECK(legendre(k, 3, 1.0) == doctest::Approx(1.0));
    CHECK(legendre(k, 2, -1.0) == doctest::Approx(k % 2 ? -1.0 : 1.0));
    CHECK(std::abs(legendre(k, 5, 0.123)) <= 1.0 + 1e-14);
  }
  CHECK(legendre(3, 2, 1.5) == legendre(3, 2, 1.0));

  std::vector<double> all(11);
  legendre_all(10, 3, -0.42, all);
  for (int k = 0; k <= 10; ++k) CHECK(all[k] == doctest::Approx(legendre(k, 3, -0.42)));
}

TEST_CASE("harmonic index layout") {
  CHECK(harmonic_index(0, 1) == 0);
  CHECK(harmonic_index(1, 1) == 1);
  CHECK(harmonic_index(1, 3) == 3);
  CHECK(harmonic_index(3, 7) == 15);
  CHECK_THROWS_AS(harmonic_index(2, 6), InvalidArgument);
  CHECK_THROWS_AS(harmonic_index(2, 0), InvalidArgument);
}

TEST_CASE("low-degree real harmonics have their textbook form") {
  const SpherePoint p{0.3, -0.5, 0.8};
  const Eigen::VectorXd y = eval_real_sph_harmonics(p, 2);
  REQUIRE(y.size() == 9);
  const double c0 = 1 / std::sqrt(4 * pi), c1 = std::sqrt(3 / (4 * pi));
  const double x0 = p[0], x1 = p[1], x2 = p[2];
  CHECK(y[0] == doctest::Approx(c0));
  CHECK(y[1] == doctest::Approx(c1 * x2));
  CHECK(y[2] == doctest::Approx(c1 * x0));
  CHECK(y[3] == doctest::Approx(c1 * x1));
  const double c2 = std::sqrt(15 / (4 * pi));
  CHECK(y[4] == doctest::Approx(std::sqrt(5 / (16 * pi)) * (3 * x2 * x2 - 1)));
  CHECK(y[5] == doctest::Approx(c2 * x0 * x2));
  CHECK(y[6] == doctest::Approx(c2 * x1 * x2));
  CHECK(y[7] == doctest::Approx(c2 / 2 * (x0 * x0 - x1 * x1)));
  CHECK(y[8] == doctest::Approx(c2 * x0 * x1));
}

TEST_CASE("addition theorem") {
  const int s = 30;
  const SpherePoint a{0.1, 0.7, -0.2}, b{-0.6, 0.3, 0.5};
  const Eigen::VectorXd ya = eval_real_sph_harmonics(a, s), yb = eval_real_sph_harmonics(b, s);
  for (int k = 0; k <= s; ++k) {
    const double lhs = ya.segment(k * k, 2 * k + 1).dot(yb.segment(k * k, 2 * k + 1));
    CHECK(lhs == doctest::Approx((2 * k + 1) / (4 * pi) * legendre(k, 2, a.dot(b))).epsilon(1e-11));
  }
  // poles are handled without division by zero
  const Eigen::VectorXd np = eval_real_sph_harmonics(SpherePoint{0, 0, 1}, s);
  CHECK(np.allFinite());
  CHECK(np[harmonic_index(10, 1)] == doctest::Approx(std::sqrt(21 / (4 * pi))));
  CHECK(np[harmonic_index(10, 2)] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("real harmonics are orthonormal under an exact product rule") {
  const int s = 12;
  const ProductRule r = product_rule(s + 1, 2 * s + 2);
  const int n = (s + 1) * (s + 1);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < r.w.size(); ++i) {
    eval_real_sph_harmonics(r.x[i][0], r.x[i][1], r.x[i][2], s, y);
    const Eigen::Map<Eigen::VectorXd> v(y.data(), n);
    gram += r.w[i] * v * v.transpose();
  }
  CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("band-limited functions") {
  BandLimited f(2, 3);
  f.set({0, 1}, 2.0);
  f.set({3, 7}, -0.5);
  CHECK(f.get({0, 1}) == 2.0);
  CHECK(f.get({2, 3}) == 0.0);
  CHECK(f.l2_norm_squared() == doctest::Approx(4.25));
  CHECK_THROWS_AS(f.set({4, 1}, 1.0), InvalidArgument);
  CHECK_THROWS_AS(f.set({2, 6}, 1.0), InvalidArgument);

  const SpherePoint x{0.2, 0.4, -0.9};
  const Eigen::VectorXd y = eval_real_sph_harmonics(x, 3);
  CHECK(eval_bandlimited(f, x) == doctest::Approx(2.0 * y[0] - 0.5 * y[15]));
  const PointSet pts = fibonacci_points(50);
  const Eigen::VectorXd v = eval_bandlimited(f, pts);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(v[static_cast<Eigen::Index>(i)] == doctest::Approx(eval_bandlimited(f, pts.point(i))));
}
