#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sphfit/error.hpp"
#include "sphfit/harmonics.hpp"
#include "sphfit/special.hpp"

using namespace sphfit;
using std::numbers::pi;

TEST_CASE("sphere volumes") {
  CHECK(special::sphere_volume(1) == doctest::Approx(2 * pi));
  CHECK(special::sphere_volume(2) == doctest::Approx(4 * pi));
  CHECK(special::sphere_volume(3) == doctest::Approx(2 * pi * pi));
  CHECK(special::sphere_volume(4) == doctest::Approx(8 * pi * pi / 3));
}

TEST_CASE("scaled modified bessel function") {
  for (double nu : {0.0, 0.5, 1.0, 3.5, 10.0, 40.0})
    for (double z : {0.01, 0.5, 2.0, 8.0, 30.0, 200.0}) {
      const double ref = std::exp(-z) * std::cyl_bessel_i(nu, z);
      CHECK(special::bessel_i_scaled(nu, z) == doctest::Approx(ref).epsilon(1e-12));
    }
  // I_{1/2}(z) = sqrt(2/(pi z)) sinh z
  CHECK(special::bessel_i(0.5, 3.0) == doctest::Approx(std::sqrt(2 / (3 * pi)) * std::sinh(3.0)));
  CHECK(special::bessel_i_scaled(2.0, 0.0) == 0.0);
  CHECK(special::bessel_i_scaled(0.0, 0.0) == 1.0);
  // large argument: e^{-z} I_nu(z) ~ 1/sqrt(2 pi z)
  CHECK(special::bessel_i_scaled(0.5, 5e4) == doctest::Approx(1 / std::sqrt(2 * pi * 5e4)).epsilon(1e-5));
  CHECK_THROWS_AS(special::bessel_i_scaled(-1.0, 1.0), InvalidArgument);
}

TEST_CASE("gauss-jacobi rules integrate monomials exactly") {
  auto beta_fn = [](double a, double b) {
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
  };
  for (auto [alpha, beta] : {std::pair{0.0, 0.0}, {0.5, 0.5}, {0.0, 2.0}, {1.5, -0.5}}) {
    const auto r = special::gauss_jacobi(12, alpha, beta);
    double wsum = 0.0;
    for (double w : r.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(wsum == doctest::Approx(std::pow(2.0, alpha + beta + 1) * beta_fn(alpha + 1, beta + 1)));
    // int (1+x)^j (1-x)^alpha (1+x)^beta = 2^{alpha+beta+j+1} B(alpha+1, beta+j+1)
    for (int j = 0; j < 24; ++j) {
      double q = 0.0;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) q += r.weights[i] * std::pow(1 + r.nodes[i], j);
      const double exact = std::pow(2.0, alpha + beta + j + 1) * beta_fn(alpha + 1, beta + j + 1);
      CHECK(q == doctest::Approx(exact).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(special::gauss_jacobi(0, 0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(special::gauss_jacobi(4, -1.0, 0.0), InvalidArgument);
}

TEST_CASE("projection recovers known coefficients") {
  // phi(t) = sum_k c_k d_k / Omega_d P_k(t)
  for (int d : {2, 3}) {
    const std::vector<double> c{1.0, 0.5, 0.25, 0.125};
    auto profile = [&](double t) {
      double v = 0.0;
      for (int k = 0; k < 4; ++k)
        v += c[k] * dim_harmonic(k, d) / special::sphere_volume(d) * legendre(k, d, t);
      return v;
    };
    const auto got = special::projection_coefficients(profile, d, 6, -1.0, 32);
    for (int k = 0; k <= 6; ++k)
      CHECK(got[k] == doctest::Approx(k < 4 ? c[k] : 0.0).epsilon(1e-12).scale(1.0));
    CHECK(special::projection_coefficient(profile, d, 2, -1.0, 32) ==
          doctest::Approx(0.25).epsilon(1e-12));
  }
  // the chordal route agrees with the t route on a polynomial profile
  auto poly_t = [](double t) { return 1 + t + t * t * t; };
  auto poly_u = [&](double u) { return poly_t(1 - u * u / 2); };
  const auto a = special::projection_coefficients(poly_t, 2, 5, -1.0, 16);
  const auto b = special::projection_coefficients_chordal(poly_u, 2, 5, 2.0 - 1e-15, 16);
  for (int k = 0; k <= 5; ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-10).scale(1.0));
  // constant profile: phi_hat_0 = Omega_d
  CHECK(special::projection_coefficient([](double) { return 1.0; }, 2, 0) ==
        doctest::Approx(4 * pi));
}
