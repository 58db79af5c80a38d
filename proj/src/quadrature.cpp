#include "sphfit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/QR>

#include "sphfit/batch.hpp"
#include "sphfit/error.hpp"
#include "sphfit/log.hpp"
#include "sphfit/nnls.hpp"
#include "sphfit/special.hpp"

namespace sphfit {

namespace {

const double sqrt4pi = std::sqrt(4 * std::numbers::pi);

Eigen::VectorXd weight_vector(const std::vector<double>& w) {
  return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

double moment_defect(const Eigen::MatrixXd& a, const Eigen::VectorXd& w) {
  Eigen::VectorXd r = a * w;
  r[0] -= 1.0;
  return r.cwiseAbs().maxCoeff();
}

}  // namespace

double QuadratureRule::c1_observed() const {
  const double mx = *std::max_element(weights.begin(), weights.end());
  return mx * static_cast<double>(weights.size()) / special::sphere_volume(nodes.dim());
}

double QuadratureRule::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

QuadratureRule uniform_rule(const PointSet& nodes, int degree) {
  if (degree < 0) throw InvalidArgument("quadrature", "degree must be >= 0");
  const std::size_t n = nodes.size();
  QuadratureRule rule{nodes, std::vector<double>(n, special::sphere_volume(nodes.dim()) / n), degree, 0.0};
  if (nodes.dim() == 2) rule.residual = verify_exactness(rule, degree);
  return rule;
}

int default_quadrature_degree(std::size_t n) {
  int s = 0;
  while (2.0 * (s + 2) * (s + 2) <= static_cast<double>(n)) ++s;
  return s;
}

QuadratureRule build_quadrature(const PointSet& pts, int s, const QuadratureOptions& options) {
  if (pts.dim() != 2)
    throw InvalidArgument("quadrature", "rule construction is implemented for S^2 only; supply weights from a file");
  if (s < 0) throw InvalidArgument("quadrature", "degree must be >= 0");
  const std::size_t n = pts.size();
  const double moments = static_cast<double>(s + 1) * (s + 1);
  if (moments * static_cast<double>(n) > 4e8)
    throw InvalidArgument("quadrature", "moment system too large",
                          "degree=" + std::to_string(s) + " nodes=" + std::to_string(n));

  const Eigen::MatrixXd a = batch::omp::harmonics(pts.coords(), s) / sqrt4pi;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(a.rows());
  b[0] = 1.0;

  Eigen::VectorXd w;
  double defect = std::numeric_limits<double>::infinity();
  if (options.try_equal_weight_correction) {
    const Eigen::VectorXd w0 = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 4 * std::numbers::pi / n);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
    Eigen::VectorXd c = w0 + cod.solve(b - a * w0);
    const double dc = moment_defect(a, c);
    if (c.minCoeff() >= 0 && dc < options.tolerance) {
      w = std::move(c);
      defect = dc;
      log::debug("quadrature: equal-weight correction accepted, defect " + std::to_string(dc));
    }
  }
  if (w.size() == 0) {
    const Eigen::VectorXd scale = a.colwise().norm().cwiseInverse().transpose();
    const NnlsResult r = nnls(a * scale.asDiagonal(), b);
    w = scale.cwiseProduct(r.x);
    defect = moment_defect(a, w);
    log::debug("quadrature: active-set solve, " + std::to_string(r.iterations) +
                                 " iterations, defect " + std::to_string(defect));
  }
  if (!(defect < options.tolerance)) throw NoPositiveRule(defect, s, n);

  QuadratureRule rule{pts, std::vector<double>(w.data(), w.data() + w.size()), s, defect};
  return rule;
}

double verify_exactness(const QuadratureRule& rule, int s_check) {
  if (rule.nodes.dim() != 2) throw InvalidArgument("quadrature", "exactness check is implemented for S^2 only");
  if (s_check < 0) throw InvalidArgument("quadrature", "degree must be >= 0");
  if (rule.weights.size() != rule.nodes.size()) throw DimensionMismatch("quadrature", "weights and nodes differ in length");
  const Eigen::MatrixXd a = batch::omp::harmonics(rule.nodes.coords(), s_check) / sqrt4pi;
  return moment_defect(a, weight_vector(rule.weights));
}

MzRatio mz_ratio(const QuadratureRule& rule, const BandLimited& p) {
  MzRatio r;
  r.continuous = p.l2_norm_squared();
  if (!(r.continuous > 0)) throw InvalidArgument("quadrature", "zero polynomial");
  const Eigen::VectorXd v = eval_bandlimited(p, rule.nodes);
  r.discrete = weight_vector(rule.weights).dot(v.cwiseAbs2());
  r.ratio = r.discrete / r.continuous;
  return r;
}

}  // namespace sphfit
