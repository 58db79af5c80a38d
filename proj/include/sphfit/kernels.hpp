#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "sphfit/geometry.hpp"
#include "sphfit/harmonics.hpp"

namespace sphfit {

enum class KernelFamily { sobolev, gaussian_series, gaussian_chordal, wendland, custom };

std::string to_string(KernelFamily family);
KernelFamily parse_kernel_family(const std::string& name);

/// Identifies a kernel by family and its single shape parameter
/// (gamma, tau or sigma; unused for wendland/custom).
struct KernelTag {
  KernelFamily family = KernelFamily::custom;
  int d = 2;
  double parameter = 0.0;

  std::string describe() const;
  bool operator==(const KernelTag&) const = default;
};

/// Zonal positive definite kernel phi(x . x') on S^d, defined by its
/// Fourier-Legendre coefficients
///   phi(t) = sum_k phi_hat_k (d_k / Omega_d) P_k(t)
/// and optionally by a closed-form profile. Cheap to copy (shared state).
class Kernel {
 public:
  /// Empty placeholder; every accessor throws until a real kernel is assigned.
  Kernel() = default;
  bool valid() const { return impl_ != nullptr; }

  int dim() const;
  const KernelTag& tag() const;

  /// phi_hat_k. Kernels without a series definition (wendland) compute these
  /// lazily by numerical projection and cache them.
  double coefficient(int k) const;

  bool has_closed_form() const;
  /// Series cutoff used when evaluating without a closed form. For projected
  /// coefficients, the last degree before they reach round-off level.
  int truncation() const;
  /// Upper bound on sum_{k > truncation} phi_hat_k d_k / Omega_d.
  double tail_bound() const;
  /// Lower end of the support in t (the profile vanishes below it).
  double support_lower() const;

  /// kernel_eval: closed form if available, otherwise the truncated series.
  double operator()(double t) const;
  void eval(std::span<const double> t, std::span<double> out) const;

  /// Truncated series sum_{k <= max_degree} regardless of closed form.
  double series(double t, int max_degree) const;

  struct Impl;
  explicit Kernel(std::shared_ptr<const Impl> impl);

 private:
  const Impl& impl() const;
  std::shared_ptr<const Impl> impl_;
};

struct SobolevOptions {
  double tail_tolerance = 1e-10;
  /// Hard ceiling on the series length. The tail bound actually achieved is
  /// reported by Kernel::tail_bound().
  int max_truncation = 1024;
};

/// phi_hat_k = (k(k+d-1)+1)^{-gamma}, gamma > d/2.
Kernel make_sobolev(int d, double gamma, const SobolevOptions& options = {});

/// Gaussian exp(-|x-x'|^2 / tau^2) = exp(-2(1-t)/tau^2) with Bessel-series
/// coefficients 2 pi^{(d+1)/2} tau^{d-1} e^{-2/tau^2} I_{k+(d-1)/2}(2/tau^2).
/// Throws InvalidArgument when 2/tau^2 exceeds 1e5.
Kernel make_gaussian_series(int d, double tau);

/// exp(-|x-x'|^2 / (2 sigma^2)) with |x-x'|^2 = 2 - 2t. Same Bessel series
/// as make_gaussian_series with 2/tau^2 = 1/sigma^2; projected when sigma is
/// too small for it.
Kernel make_gaussian_chordal(double sigma, int d = 2);

/// Wendland (1-u)_+^8 (32u^3 + 25u^2 + 8u + 1) of the chordal distance u.
Kernel make_wendland(int d = 2);

/// Kernel with explicitly given coefficients phi_hat_0..phi_hat_K (all > 0).
Kernel make_custom(int d, std::vector<double> coefficients);

/// Rebuilds a kernel from its tag (not possible for custom kernels).
Kernel make_kernel(const KernelTag& tag);

/// Wendland profile as a function of the chordal distance.
double wendland_profile(double u);

/// Symmetric matrix (phi(x_i . x_j)); filled once per unordered pair.
Eigen::MatrixXd gram_matrix(const Kernel& kernel, const PointSet& pts);
/// Rectangular matrix (phi(r_i . c_j)).
Eigen::MatrixXd cross_matrix(const Kernel& kernel, const PointSet& rows,
                             const PointSet& cols);

/// Norm with coefficients psi_hat_k = phi_hat_k^r: r = 0 gives L^2(S^d),
/// r = 1 the native-space norm.
struct NormSpec {
  double r = 0.0;
  Kernel base;
};

/// (sum_k psi_hat_k^{-1} sum_l |f_{k,l} - g_{k,l}|^2)^{1/2}.
double psi_norm(const BandLimited& f, const BandLimited& g, const NormSpec& spec);

}  // namespace sphfit
