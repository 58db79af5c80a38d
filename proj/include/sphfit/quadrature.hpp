#pragma once

#include <optional>
#include <vector>

#include "sphfit/geometry.hpp"
#include "sphfit/harmonics.hpp"

namespace sphfit {

/// Nonnegative weights on a node set, exact for spherical polynomials of
/// degree <= `degree`. Weights are in units of surface measure (sum 4 pi).
struct QuadratureRule {
  PointSet nodes;
  std::vector<double> weights;
  int degree = 0;
  double residual = 0.0;  // normalized moment defect of the construction

  /// max_i w_i * n / Omega_d: the constant c1 in w_i <= c1 / n.
  double c1_observed() const;
  double weight_sum() const;
};

/// Equal weights Omega_d / n (exact on constants; exact to degree t on a
/// spherical t-design).
QuadratureRule uniform_rule(const PointSet& nodes, int degree = 0);

struct QuadratureOptions {
  /// Accept when the normalized moment residual is below this.
  double tolerance = 1e-8;
  /// Try the minimum-norm correction of equal weights before the active-set
  /// solve. Both routes return a nonnegative least-squares minimizer.
  bool try_equal_weight_correction = true;
};

/// Largest s with (s+1)^2 <= n/2 (at least 0).
int default_quadrature_degree(std::size_t n);

/// Positive quadrature rule on `pts` (d = 2) exact to degree s, found as a
/// nonnegative solution of the moment system
///   sum_i w_i Y_{k,l}(x_i) = sqrt(4 pi) delta_{k0} delta_{l1},  k <= s.
/// The system may be overdetermined (symmetric designs satisfy the odd
/// moments for free). Throws NoPositiveRule when the residual exceeds the
/// tolerance.
QuadratureRule build_quadrature(const PointSet& pts, int s,
                                const QuadratureOptions& options = {});

/// max_{k <= s_check, l} |sum_i w_i Y_{k,l}(x_i) - sqrt(4 pi) delta| / sqrt(4 pi).
double verify_exactness(const QuadratureRule& rule, int s_check);

struct MzRatio {
  double discrete = 0.0;    // sum_i w_i p(x_i)^2
  double continuous = 0.0;  // ||p||_2^2 = sum of squared coefficients
  double ratio = 0.0;
};

MzRatio mz_ratio(const QuadratureRule& rule, const BandLimited& p);

}  // namespace sphfit
