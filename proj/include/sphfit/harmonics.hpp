#pragma once

#include <cstdint>
#include <map>
#include <span>

#include <Eigen/Core>

#include "sphfit/geometry.hpp"

namespace sphfit {

/// Dimension of the space of spherical harmonics of degree k on S^d.
/// Exact integer arithmetic; throws InvalidArgument on overflow.
std::int64_t dim_harmonic(int k, int d);

/// Dimension of the spherical polynomials of degree <= s on S^d.
std::int64_t dim_polynomials(int s, int d);

/// Legendre (Gegenbauer) polynomial on S^d normalized so that P_k(1) = 1.
/// Arguments outside [-1, 1] are clamped.
double legendre(int k, int d, double t);

/// All P_0(t), ..., P_K(t) for one argument.
void legendre_all(int max_degree, int d, double t, std::span<double> out);

/// Real spherical harmonics on S^2 (orthonormal under the surface measure of
/// total mass 4 pi). Degree k occupies entries k^2 .. k^2 + 2k in the order
///   l = 1           -> m = 0
///   l = 2j, 2j + 1  -> cos(j phi), sin(j phi) parts of order j
/// so Y_{k,l} lives at index k^2 + l - 1.
int harmonic_index(int k, int l);

Eigen::VectorXd eval_real_sph_harmonics(const SpherePoint& x, int max_degree);

/// Same, for a 3-vector assumed to be of unit length; writes (s+1)^2 values.
void eval_real_sph_harmonics(double x, double y, double z, int max_degree,
                             std::span<double> out);

struct HarmonicIndex {
  int degree = 0;
  int order = 1;
  auto operator<=>(const HarmonicIndex&) const = default;
};

/// A band-limited function given by its coefficients in the real basis.
class BandLimited {
 public:
  BandLimited(int d, int max_degree);

  int dim() const { return d_; }
  int max_degree() const { return max_degree_; }
  const std::map<HarmonicIndex, double>& coeffs() const { return coeffs_; }

  /// Sets f_{k,l}; validates the index range.
  void set(HarmonicIndex index, double value);
  double get(HarmonicIndex index) const;
  bool empty() const { return coeffs_.empty(); }

  /// Sum of squared coefficients (the L^2 norm squared, by Parseval).
  double l2_norm_squared() const;

 private:
  int d_;
  int max_degree_;
  std::map<HarmonicIndex, double> coeffs_;
};

double eval_bandlimited(const BandLimited& f, const SpherePoint& x);
Eigen::VectorXd eval_bandlimited(const BandLimited& f, const PointSet& pts);

}  // namespace sphfit
