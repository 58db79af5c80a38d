#pragma once

#include <functional>
#include <vector>

namespace sphfit::special {

/// Volume of S^d under the Lebesgue surface measure: 2 pi^{(d+1)/2} / Gamma((d+1)/2).
double sphere_volume(int d);

/// e^{-z} I_nu(z), summed from the power series in log space to relative
/// tolerance `rtol`. Requires nu >= 0, z >= 0.
double bessel_i_scaled(double nu, double z, double rtol = 1e-14);
/// I_nu(z) (unscaled; overflows for large z).
double bessel_i(double nu, double z, double rtol = 1e-14);

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Jacobi rule on [-1, 1] for weight (1-x)^alpha (1+x)^beta,
/// alpha, beta > -1 (Golub-Welsch).
GaussRule gauss_jacobi(int n, double alpha, double beta);

/// Fourier-Legendre coefficient of a zonal profile on S^d:
///   Omega_{d-1} * int_{lower}^{1} P_k(t) f(t) (1 - t^2)^{(d-2)/2} dt,
/// where f vanishes on [-1, lower). Uses an n-point Gauss-Jacobi rule.
double projection_coefficient(const std::function<double(double)>& profile,
                              int d, int k, double lower = -1.0,
                              int nodes = 256);

/// Coefficients 0..max_degree of a profile smooth in t (as above).
std::vector<double> projection_coefficients(const std::function<double(double)>& profile,
                                            int d, int max_degree, double lower = -1.0,
                                            int nodes = 256);

/// Coefficients 0..max_degree of a profile given as a function of the
/// chordal distance u = sqrt(2 - 2t), supported on u <= u_max < 2. The rule
/// is built in u, which keeps the integrand polynomial for profiles like
/// Wendland's that are polynomial in u but not in t.
std::vector<double> projection_coefficients_chordal(
    const std::function<double(double)>& profile_u, int d, int max_degree, double u_max,
    int nodes = 256);

}  // namespace sphfit::special
