#include "sphfit/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "sphfit/batch.hpp"
#include "sphfit/error.hpp"

namespace sphfit {

namespace {

std::int64_t binomial(std::int64_t n, std::int64_t r) {
  if (r < 0 || n < 0 || r > n) return 0;
  r = std::min(r, n - r);
  __int128 c = 1;
  for (std::int64_t i = 0; i < r; ++i) {
    c = c * (n - i) / (i + 1);
    if (c > std::numeric_limits<std::int64_t>::max())
      throw InvalidArgument("harmonics", "dimension overflows 64-bit integers",
                            "n=" + std::to_string(n) + " r=" + std::to_string(r));
  }
  return static_cast<std::int64_t>(c);
}

}  // namespace

std::int64_t dim_harmonic(int k, int d) {
  if (k < 0 || d < 1) throw InvalidArgument("harmonics", "dim_harmonic needs k >= 0, d >= 1");
  return binomial(std::int64_t{k} + d, d) - binomial(std::int64_t{k} + d - 2, d);
}

std::int64_t dim_polynomials(int s, int d) {
  if (s < 0 || d < 1) throw InvalidArgument("harmonics", "dim_polynomials needs s >= 0, d >= 1");
  return binomial(std::int64_t{s} + d, d) + binomial(std::int64_t{s} + d - 1, d);
}

double legendre(int k, int d, double t) {
  if (k < 0 || d < 1) throw InvalidArgument("harmonics", "legendre needs k >= 0, d >= 1");
  t = std::clamp(t, -1.0, 1.0);
  if (k == 0) return 1.0;
  double p0 = 1.0, p1 = t;
  for (int j = 1; j < k; ++j) {
    const double p2 = d == 1 ? 2 * t * p1 - p0
                             : ((2.0 * j + d - 1) * t * p1 - j * p0) / (j + d - 1);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

void legendre_all(int max_degree, int d, double t, std::span<double> out) {
  if (max_degree < 0 || d < 1) throw InvalidArgument("harmonics", "legendre needs k >= 0, d >= 1");
  if (out.size() < static_cast<std::size_t>(max_degree) + 1)
    throw DimensionMismatch("harmonics", "output span too short");
  t = std::clamp(t, -1.0, 1.0);
  out[0] = 1.0;
  if (max_degree == 0) return;
  out[1] = t;
  for (int j = 1; j < max_degree; ++j)
    out[j + 1] = d == 1 ? 2 * t * out[j] - out[j - 1]
                        : ((2.0 * j + d - 1) * t * out[j] - j * out[j - 1]) / (j + d - 1);
}

int harmonic_index(int k, int l) {
  if (k < 0 || l < 1 || l > 2 * k + 1) throw InvalidArgument("harmonics", "harmonic index out of range");
  return k * k + l - 1;
}

void eval_real_sph_harmonics(double x, double y, double z, int max_degree,
                             std::span<double> out) {
  if (max_degree < 0) throw InvalidArgument("harmonics", "negative degree");
  const std::size_t count = static_cast<std::size_t>(max_degree + 1) * (max_degree + 1);
  if (out.size() < count) throw DimensionMismatch("harmonics", "output span too short");

  // Q_km = Pbar_km(z) / sin^m(theta); sin^m cos(m phi) = Re (x + i y)^m
  double qmm = 1.0 / std::sqrt(4 * std::numbers::pi);
  double cm = 1.0, sm = 0.0;
  for (int m = 0; m <= max_degree; ++m) {
    if (m > 0) {
      qmm *= std::sqrt((2.0 * m + 1) / (2.0 * m));
      const double c = cm * x - sm * y;
      sm = cm * y + sm * x;
      cm = c;
    }
    const double cs = m == 0 ? 1.0 : std::numbers::sqrt2 * cm;
    const double sn = std::numbers::sqrt2 * sm;
    auto put = [&](int k, double q) {
      if (m == 0) {
        out[k * k] = q;
      } else {
        out[k * k + 2 * m - 1] = q * cs;
        out[k * k + 2 * m] = q * sn;
      }
    };
    put(m, qmm);
    if (m == max_degree) break;
    double q0 = qmm;
    double q1 = std::sqrt(2.0 * m + 3) * z * qmm;
    put(m + 1, q1);
    for (int k = m + 2; k <= max_degree; ++k) {
      const double kk = static_cast<double>(k) * k, mm = static_cast<double>(m) * m;
      const double a = std::sqrt((4 * kk - 1) / (kk - mm));
      const double b = std::sqrt(((k - 1.0) * (k - 1.0) - mm) / (4 * (k - 1.0) * (k - 1.0) - 1));
      const double q2 = a * (z * q1 - b * q0);
      q0 = q1;
      q1 = q2;
      put(k, q2);
    }
  }
}

Eigen::VectorXd eval_real_sph_harmonics(const SpherePoint& x, int max_degree) {
  if (x.dim() != 2) throw DimensionMismatch("harmonics", "real harmonics are implemented for S^2 only");
  Eigen::VectorXd out((max_degree + 1) * (max_degree + 1));
  eval_real_sph_harmonics(x[0], x[1], x[2], max_degree, {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

BandLimited::BandLimited(int d, int max_degree) : d_(d), max_degree_(max_degree) {
  if (d < 1 || max_degree < 0) throw InvalidArgument("harmonics", "BandLimited needs d >= 1, degree >= 0");
}

void BandLimited::set(HarmonicIndex index, double value) {
  if (index.degree < 0 || index.degree > max_degree_ || index.order < 1 ||
      index.order > dim_harmonic(index.degree, d_))
    throw InvalidArgument("harmonics", "coefficient index out of range",
                          "k=" + std::to_string(index.degree) + " l=" + std::to_string(index.order));
  if (!std::isfinite(value)) throw InvalidArgument("harmonics", "coefficient must be finite");
  coeffs_[index] = value;
}

double BandLimited::get(HarmonicIndex index) const {
  const auto it = coeffs_.find(index);
  return it == coeffs_.end() ? 0.0 : it->second;
}

double BandLimited::l2_norm_squared() const {
  double s = 0.0;
  for (const auto& [_, v] : coeffs_) s += v * v;
  return s;
}

namespace {

Eigen::VectorXd dense_coeffs(const BandLimited& f) {
  if (f.dim() != 2) throw DimensionMismatch("harmonics", "evaluation is implemented for S^2 only");
  const int s = f.max_degree();
  Eigen::VectorXd c = Eigen::VectorXd::Zero((s + 1) * (s + 1));
  for (const auto& [idx, v] : f.coeffs()) c[harmonic_index(idx.degree, idx.order)] = v;
  return c;
}

}  // namespace

double eval_bandlimited(const BandLimited& f, const SpherePoint& x) {
  if (x.dim() != f.dim()) throw DimensionMismatch("harmonics", "point and function dimensions differ");
  return dense_coeffs(f).dot(eval_real_sph_harmonics(x, f.max_degree()));
}

Eigen::VectorXd eval_bandlimited(const BandLimited& f, const PointSet& pts) {
  if (pts.dim() != f.dim()) throw DimensionMismatch("harmonics", "point and function dimensions differ");
  const Eigen::VectorXd c = dense_coeffs(f);
  return batch::omp::harmonics(pts.coords(), f.max_degree()).transpose() * c;
}

}  // namespace sphfit
