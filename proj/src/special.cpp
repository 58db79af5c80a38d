#include "sphfit/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "sphfit/error.hpp"
#include "sphfit/harmonics.hpp"

namespace sphfit::special {

double sphere_volume(int d) {
  if (d < 0) throw InvalidArgument("special", "sphere dimension must be >= 0");
  const double h = 0.5 * (d + 1);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double bessel_i_scaled(double nu, double z, double rtol) {
  if (nu < 0 || z < 0 || !std::isfinite(z))
    throw InvalidArgument("special", "bessel_i requires nu >= 0 and finite z >= 0");
  if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;

  // log of the m-th series term (z/2)^{2m+nu} / (m! Gamma(m+nu+1)), times e^{-z}
  const double lh = std::log(0.5 * z);
  auto log_term = [&](double m) {
    return (2 * m + nu) * lh - std::lgamma(m + 1) - std::lgamma(m + nu + 1) - z;
  };
  // terms grow while (z/2)^2 > (m+1)(m+nu+1)
  const double peak = std::max(0.0, std::floor(0.5 * (-(nu + 2) + std::sqrt(nu * nu + z * z))));
  const double lmax = log_term(peak);
  const double cut = std::log(rtol) - 3.0;

  double sum = 0.0;
  for (double m = peak; m >= 0; m -= 1) {
    const double l = log_term(m) - lmax;
    sum += std::exp(l);
    if (l < cut) break;
  }
  for (double m = peak + 1;; m += 1) {
    const double l = log_term(m) - lmax;
    sum += std::exp(l);
    if (l < cut) break;
  }
  return std::exp(lmax) * sum;
}

double bessel_i(double nu, double z, double rtol) {
  return bessel_i_scaled(nu, z, rtol) * std::exp(z);
}

GaussRule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw InvalidArgument("special", "gauss_jacobi needs n >= 1");
  if (alpha <= -1 || beta <= -1) throw InvalidArgument("special", "gauss_jacobi needs alpha, beta > -1");

  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  const double ab = alpha + beta;
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + ab;
    diag[k] = k == 0 ? (beta - alpha) / (ab + 2) : (beta * beta - alpha * alpha) / (s * (s + 2));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    off[k - 1] = std::sqrt(4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
                           (s * s * (s + 1) * (s - 1)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw SolveFailure("special", "Golub-Welsch eigensolve failed");

  const double mu0 = std::exp((ab + 1) * std::log(2.0) + std::lgamma(alpha + 1) +
                              std::lgamma(beta + 1) - std::lgamma(ab + 2));
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = eig.eigenvalues()[i];
    const double v = eig.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v * v;
  }
  return rule;
}

namespace {

// sum_i g_i P_k(t_i) for k = 0..K, by the three-term recurrence at every node.
std::vector<double> legendre_moments(const std::vector<double>& t, const std::vector<double>& g,
                                     int d, int max_degree) {
  std::vector<double> out(max_degree + 1, 0.0);
  std::vector<double> p(max_degree + 1);
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (g[i] == 0.0) continue;
    legendre_all(max_degree, d, t[i], p);
    for (int k = 0; k <= max_degree; ++k) out[k] += g[i] * p[k];
  }
  return out;
}

}  // namespace

std::vector<double> projection_coefficients(const std::function<double(double)>& profile,
                                            int d, int max_degree, double lower, int nodes) {
  if (d < 2) throw InvalidArgument("special", "projection needs d >= 2");
  if (lower < -1 || lower >= 1) throw InvalidArgument("special", "support lower end must lie in [-1, 1)");
  const double a = 0.5 * (d - 2);
  std::vector<double> t(nodes), g(nodes);
  if (lower == -1.0) {
    const GaussRule rule = gauss_jacobi(nodes, a, a);
    for (int i = 0; i < nodes; ++i) {
      t[i] = rule.nodes[i];
      g[i] = rule.weights[i] * profile(t[i]);
    }
  } else {
    // t = lower + h (1 + s), h = (1 - lower)/2; (1 - t)^a = h^a (1 - s)^a
    const double h = 0.5 * (1 - lower);
    const GaussRule rule = gauss_jacobi(nodes, a, 0.0);
    for (int i = 0; i < nodes; ++i) {
      t[i] = lower + h * (1 + rule.nodes[i]);
      g[i] = rule.weights[i] * std::pow(h, a + 1) * std::pow(1 + t[i], a) * profile(t[i]);
    }
  }
  std::vector<double> c = legendre_moments(t, g, d, max_degree);
  const double om = sphere_volume(d - 1);
  for (double& v : c) v *= om;
  return c;
}

double projection_coefficient(const std::function<double(double)>& profile, int d, int k,
                              double lower, int nodes) {
  return projection_coefficients(profile, d, k, lower, nodes)[k];
}

std::vector<double> projection_coefficients_chordal(
    const std::function<double(double)>& profile_u, int d, int max_degree, double u_max,
    int nodes) {
  if (d < 2) throw InvalidArgument("special", "projection needs d >= 2");
  if (!(u_max > 0 && u_max < 2)) throw InvalidArgument("special", "chordal support must lie in (0, 2)");
  // t = 1 - u^2/2, dt = -u du, 1 - t^2 = u^2 (1 - u^2/4)
  const double a = 0.5 * (d - 2);
  const double h = 0.5 * u_max;
  const GaussRule rule = gauss_jacobi(nodes, 0.0, d - 1);
  std::vector<double> t(nodes), g(nodes);
  for (int i = 0; i < nodes; ++i) {
    const double u = h * (1 + rule.nodes[i]);
    t[i] = 1 - 0.5 * u * u;
    g[i] = rule.weights[i] * std::pow(h, d) * std::pow(1 - 0.25 * u * u, a) * profile_u(u);
  }
  std::vector<double> c = legendre_moments(t, g, d, max_degree);
  const double om = sphere_volume(d - 1);
  for (double& v : c) v *= om;
  return c;
}

}  // namespace sphfit::special
