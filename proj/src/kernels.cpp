#include "sphfit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>

#include "sphfit/batch.hpp"
#include "sphfit/error.hpp"
#include "sphfit/special.hpp"

namespace sphfit {

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::sobolev: return "sobolev";
    case KernelFamily::gaussian_series: return "gaussian_series";
    case KernelFamily::gaussian_chordal: return "gaussian_chordal";
    case KernelFamily::wendland: return "wendland";
    case KernelFamily::custom: return "custom";
  }
  return "custom";
}

KernelFamily parse_kernel_family(const std::string& name) {
  for (auto f : {KernelFamily::sobolev, KernelFamily::gaussian_series,
                 KernelFamily::gaussian_chordal, KernelFamily::wendland, KernelFamily::custom})
    if (to_string(f) == name) return f;
  throw InvalidArgument("kernels", "unknown kernel family '" + name + "'");
}

std::string KernelTag::describe() const {
  std::ostringstream os;
  os << to_string(family) << "(d=" << d;
  switch (family) {
    case KernelFamily::sobolev: os << ", gamma=" << parameter; break;
    case KernelFamily::gaussian_series: os << ", tau=" << parameter; break;
    case KernelFamily::gaussian_chordal: os << ", sigma=" << parameter; break;
    default: break;
  }
  os << ")";
  return os.str();
}

struct Kernel::Impl {
  KernelTag tag;
  int truncation = 0;
  double support_lower = -1.0;
  std::function<double(double)> closed;           // empty when series-only
  std::function<double(int)> analytic;            // phi_hat_k when known in closed form
  std::function<std::vector<double>(int)> project;  // coefficients 0..K by quadrature
  std::vector<double> table;                      // custom coefficients

  // series weights c_k = phi_hat_k d_k / Omega_d and Clenshaw factors, k <= truncation
  std::vector<double> c, A, B;
  double tail = 0.0;

  mutable std::mutex mu;
  mutable std::vector<double> cache;
  mutable std::once_flag settle_once;
  mutable int lazy_truncation = 0;
  mutable double lazy_tail = 0.0;

  const std::vector<double>& projected(int k) const {
    std::lock_guard lock(mu);
    if (static_cast<int>(cache.size()) <= k) {
      int upto = std::max(64, static_cast<int>(cache.size()) * 2);
      while (upto <= k) upto *= 2;
      cache = project(upto);
    }
    return cache;
  }

  // Projected coefficients lose all relative accuracy once they fall to the
  // round-off level of the projection; the cutoff stops just before that.
  void settle() const {
    std::call_once(settle_once, [this] {
      const std::vector<double>& p = projected(truncation);
      const double om = special::sphere_volume(tag.d);
      const double floor = 1e3 * std::numeric_limits<double>::epsilon() * om * std::abs(closed(1.0));
      int K = 0;
      while (K < truncation && p[K + 1] > floor) ++K;
      double s = 0.0;
      for (int k = 0; k <= K; ++k) s += p[k] * static_cast<double>(dim_harmonic(k, tag.d)) / om;
      lazy_truncation = K;
      lazy_tail = std::abs(closed(1.0) - s);
    });
  }

  double coefficient(int k) const {
    if (k < 0) throw InvalidArgument("kernels", "negative degree");
    if (analytic) return analytic(k);
    if (!table.empty()) return k < static_cast<int>(table.size()) ? table[k] : 0.0;
    return projected(k)[k];
  }

  double weight(int k) const {
    return coefficient(k) * static_cast<double>(dim_harmonic(k, tag.d)) /
           special::sphere_volume(tag.d);
  }

  void prepare_series(int K) {
    truncation = K;
    const double om = special::sphere_volume(tag.d);
    c.resize(K + 1);
    A.resize(K + 2);
    B.resize(K + 2);
    for (int k = 0; k <= K; ++k) c[k] = coefficient(k) * static_cast<double>(dim_harmonic(k, tag.d)) / om;
    for (int k = 0; k <= K + 1; ++k) {
      const int d = tag.d;
      A[k] = k == 0 ? 1.0 : (d == 1 ? 2.0 : (2.0 * k + d - 1) / (k + d - 1));
      B[k] = d == 1 ? 1.0 : static_cast<double>(k) / (k + d - 1);
    }
  }

  double clenshaw(double t) const {
    t = std::clamp(t, -1.0, 1.0);
    double b1 = 0.0, b2 = 0.0;
    for (int k = truncation; k >= 1; --k) {
      const double b0 = c[k] + A[k] * t * b1 - B[k + 1] * b2;
      b2 = b1;
      b1 = b0;
    }
    return c[0] + A[0] * t * b1 - B[1] * b2;
  }

  void clenshaw(std::span<const double> t, std::span<double> out) const {
    constexpr std::size_t chunk = 256;
    double tt[chunk], b1[chunk], b2[chunk];
    for (std::size_t s = 0; s < t.size(); s += chunk) {
      const std::size_t len = std::min(chunk, t.size() - s);
      for (std::size_t j = 0; j < len; ++j) {
        tt[j] = std::clamp(t[s + j], -1.0, 1.0);
        b1[j] = 0.0;
        b2[j] = 0.0;
      }
      for (int k = truncation; k >= 1; --k) {
        const double ck = c[k], ak = A[k], bk = B[k + 1];
        for (std::size_t j = 0; j < len; ++j) {
          const double b0 = ck + ak * tt[j] * b1[j] - bk * b2[j];
          b2[j] = b1[j];
          b1[j] = b0;
        }
      }
      for (std::size_t j = 0; j < len; ++j) out[s + j] = c[0] + A[0] * tt[j] * b1[j] - B[1] * b2[j];
    }
  }
};

Kernel::Kernel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

const Kernel::Impl& Kernel::impl() const {
  if (!impl_) throw InvalidArgument("kernels", "kernel not set");
  return *impl_;
}

int Kernel::dim() const { return impl().tag.d; }
const KernelTag& Kernel::tag() const { return impl().tag; }
double Kernel::coefficient(int k) const { return impl().coefficient(k); }
bool Kernel::has_closed_form() const { return static_cast<bool>(impl().closed); }
int Kernel::truncation() const {
  const Impl& m = impl();
  if (m.project) m.settle();
  return m.project ? m.lazy_truncation : m.truncation;
}
double Kernel::support_lower() const { return impl().support_lower; }

double Kernel::tail_bound() const {
  const Impl& m = impl();
  if (!m.project) return m.tail;
  m.settle();
  return m.lazy_tail;
}

double Kernel::operator()(double t) const {
  const Impl& m = impl();
  if (m.closed) return m.closed(std::clamp(t, -1.0, 1.0));
  return m.clenshaw(t);
}

void Kernel::eval(std::span<const double> t, std::span<double> out) const {
  if (out.size() < t.size()) throw DimensionMismatch("kernels", "output span too short");
  const Impl& m = impl();
  if (m.closed) {
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = m.closed(std::clamp(t[i], -1.0, 1.0));
  } else {
    m.clenshaw(t, out);
  }
}

double Kernel::series(double t, int max_degree) const {
  const Impl& m = impl();
  if (max_degree < 0) throw InvalidArgument("kernels", "negative degree");
  std::vector<double> p(max_degree + 1);
  legendre_all(max_degree, m.tag.d, t, p);
  double s = 0.0;
  for (int k = max_degree; k >= 0; --k) s += m.weight(k) * p[k];
  return s;
}

namespace {

void check_dim(int d) {
  if (d < 1) throw InvalidArgument("kernels", "sphere dimension must be >= 1");
}

}  // namespace

Kernel make_sobolev(int d, double gamma, const SobolevOptions& options) {
  check_dim(d);
  if (!(gamma > 0.5 * d))
    throw InvalidArgument("kernels", "Sobolev kernel needs gamma > d/2",
                          "gamma=" + std::to_string(gamma) + " d=" + std::to_string(d));
  if (options.max_truncation < 1) throw InvalidArgument("kernels", "max_truncation must be >= 1");
  auto m = std::make_shared<Kernel::Impl>();
  m->tag = {KernelFamily::sobolev, d, gamma};
  m->analytic = [d, gamma](int k) {
    return std::pow(static_cast<double>(k) * (k + d - 1) + 1.0, -gamma);
  };
  // sum_{k > K} phi_hat_k d_k / Omega_d <= 2^d / ((d-1)! Omega_d) K^{d - 2 gamma} / (2 gamma - d)
  const double pre = std::pow(2.0, d) / (std::tgamma(d) * special::sphere_volume(d) * (2 * gamma - d));
  auto bound = [&](int K) { return pre * std::pow(static_cast<double>(K), d - 2 * gamma); };
  int K = std::max(d, 1);
  while (K < options.max_truncation && bound(K) > options.tail_tolerance) K = std::min(2 * K, options.max_truncation);
  if (bound(K) <= options.tail_tolerance) {
    int lo = K / 2, hi = K;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (bound(mid) <= options.tail_tolerance ? hi : lo) = mid;
    }
    K = std::max(hi, std::max(d, 1));
  }
  m->tail = bound(K);
  m->prepare_series(K);
  return Kernel(m);
}

namespace {

// exp(-z (1 - t)) expanded in Bessel coefficients
// 2 pi^{(d+1)/2} tau^{d-1} e^{-z} I_{k+(d-1)/2}(z), tau = sqrt(2/z).
void bessel_series(Kernel::Impl& m, int d, double z) {
  const double tau = std::sqrt(2.0 / z);
  const double scale = 2.0 * std::pow(std::numbers::pi, 0.5 * (d + 1)) * std::pow(tau, d - 1);
  m.analytic = [=](int k) { return scale * special::bessel_i_scaled(k + 0.5 * (d - 1), z); };
  m.closed = [z](double t) { return std::exp(-z * (1 - t)); };

  // ratio test on the series weights for the cutoff
  const double tol = 1e-10, om = special::sphere_volume(d);
  auto w = [&](int k) { return m.analytic(k) * static_cast<double>(dim_harmonic(k, d)) / om; };
  int K = 1;
  double wk = w(1);
  for (; K < 1024; ++K) {
    const double wn = w(K + 1);
    const double r = wn / wk;
    if (r < 1 && K + 1 > z && wn / (1 - r) < tol) break;
    wk = wn;
  }
  for (int k = 0; k <= std::min(K, 60); ++k)
    if (!(m.analytic(k) > 0)) throw InvalidArgument("kernels", "non-positive Gaussian coefficient");
  m.prepare_series(K);
  m.tail = std::abs(m.closed(1.0) - m.clenshaw(1.0));
}

}  // namespace

Kernel make_gaussian_series(int d, double tau) {
  check_dim(d);
  if (!(tau > 0) || !std::isfinite(tau)) throw InvalidArgument("kernels", "Gaussian width tau must be > 0");
  const double z = 2.0 / (tau * tau);
  if (z > 1e5)
    throw InvalidArgument("kernels", "Gaussian width too small for the Bessel series; use tau >= 0.0045",
                          "tau=" + std::to_string(tau));
  auto m = std::make_shared<Kernel::Impl>();
  m->tag = {KernelFamily::gaussian_series, d, tau};
  bessel_series(*m, d, z);
  return Kernel(m);
}

Kernel make_gaussian_chordal(double sigma, int d) {
  check_dim(d);
  if (!(sigma > 0) || !std::isfinite(sigma)) throw InvalidArgument("kernels", "sigma must be > 0");
  auto m = std::make_shared<Kernel::Impl>();
  m->tag = {KernelFamily::gaussian_chordal, d, sigma};
  const double z = 1.0 / (sigma * sigma);
  if (z <= 1e5) {
    bessel_series(*m, d, z);
    return Kernel(m);
  }
  m->closed = [z](double t) { return std::exp(-(1 - t) * z); };
  auto profile = m->closed;
  const double lower = std::max(-1.0, 1.0 - 40.0 / z);
  m->project = [profile, d, lower](int K) { return special::projection_coefficients(profile, d, K, lower); };
  m->truncation = 256;
  return Kernel(m);
}

double wendland_profile(double u) {
  if (u >= 1.0) return 0.0;
  const double v = 1.0 - u;
  const double v2 = v * v, v4 = v2 * v2;
  return v4 * v4 * (((32.0 * u + 25.0) * u + 8.0) * u + 1.0);
}

Kernel make_wendland(int d) {
  check_dim(d);
  auto m = std::make_shared<Kernel::Impl>();
  m->tag = {KernelFamily::wendland, d, 0.0};
  m->support_lower = 0.5;
  m->closed = [](double t) { return t <= 0.5 ? 0.0 : wendland_profile(std::sqrt(2.0 - 2.0 * t)); };
  m->project = [d](int K) {
    return special::projection_coefficients_chordal(wendland_profile, d, K, 1.0);
  };
  m->truncation = 256;
  return Kernel(m);
}

Kernel make_custom(int d, std::vector<double> coefficients) {
  check_dim(d);
  if (coefficients.empty()) throw InvalidArgument("kernels", "custom kernel needs coefficients");
  for (double c : coefficients)
    if (!(c > 0) || !std::isfinite(c)) throw InvalidArgument("kernels", "custom coefficients must be positive");
  auto m = std::make_shared<Kernel::Impl>();
  m->tag = {KernelFamily::custom, d, 0.0};
  m->table = std::move(coefficients);
  m->prepare_series(static_cast<int>(m->table.size()) - 1);
  return Kernel(m);
}

Kernel make_kernel(const KernelTag& tag) {
  switch (tag.family) {
    case KernelFamily::sobolev: return make_sobolev(tag.d, tag.parameter);
    case KernelFamily::gaussian_series: return make_gaussian_series(tag.d, tag.parameter);
    case KernelFamily::gaussian_chordal: return make_gaussian_chordal(tag.parameter, tag.d);
    case KernelFamily::wendland: return make_wendland(tag.d);
    case KernelFamily::custom: break;
  }
  throw InvalidArgument("kernels", "custom kernels cannot be rebuilt from a tag");
}

Eigen::MatrixXd gram_matrix(const Kernel& kernel, const PointSet& pts) {
  if (kernel.dim() != pts.dim()) throw DimensionMismatch("kernels", "kernel and point set dimensions differ");
  return batch::omp::gram(kernel, pts.coords());
}

Eigen::MatrixXd cross_matrix(const Kernel& kernel, const PointSet& rows, const PointSet& cols) {
  if (kernel.dim() != rows.dim() || kernel.dim() != cols.dim())
    throw DimensionMismatch("kernels", "kernel and point set dimensions differ");
  return batch::omp::cross(kernel, rows.coords(), cols.coords());
}

double psi_norm(const BandLimited& f, const BandLimited& g, const NormSpec& spec) {
  if (f.dim() != g.dim() || f.dim() != spec.base.dim())
    throw DimensionMismatch("kernels", "norm arguments live on different spheres");
  if (spec.r < 0 || spec.r > 1) throw InvalidArgument("kernels", "norm exponent r must lie in [0, 1]");
  std::map<HarmonicIndex, double> diff = f.coeffs();
  for (const auto& [idx, v] : g.coeffs()) diff[idx] -= v;
  double s = 0.0;
  for (const auto& [idx, v] : diff) {
    if (v == 0.0) continue;
    const double psi = spec.r == 0 ? 1.0 : std::pow(spec.base.coefficient(idx.degree), spec.r);
    if (!(psi > 0) || !std::isfinite(1.0 / psi))
      throw InvalidArgument("kernels", "psi coefficient underflows at degree " + std::to_string(idx.degree));
    s += v * v / psi;
  }
  return std::sqrt(s);
}

}  // namespace sphfit
