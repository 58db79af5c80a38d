#include "sphfit/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>

#include "sphfit/error.hpp"

namespace sphfit {

namespace {

// Upper-triangular R with R^T R = G(P, P), grown one index at a time.
class PassiveFactor {
 public:
  PassiveFactor(const Eigen::MatrixXd& gram) : g_(gram), r_(gram.rows(), gram.rows()) {}

  const std::vector<Eigen::Index>& indices() const { return p_; }

  // Returns false (and leaves the factor unchanged) when column j is
  // numerically dependent on the passive set.
  bool add(Eigen::Index j) {
    const Eigen::Index k = static_cast<Eigen::Index>(p_.size());
    Eigen::VectorXd col(k);
    for (Eigen::Index i = 0; i < k; ++i) col[i] = g_(p_[i], j);
    if (k > 0) col = r_.topLeftCorner(k, k).transpose().triangularView<Eigen::Lower>().solve(col);
    const double rho2 = g_(j, j) - col.squaredNorm();
    if (!(rho2 > 1e-14 * g_(j, j))) return false;
    r_.col(k).head(k) = col;
    r_(k, k) = std::sqrt(rho2);
    p_.push_back(j);
    return true;
  }

  void rebuild(std::vector<Eigen::Index> keep) {
    p_.clear();
    for (Eigen::Index j : keep) add(j);
  }

  // Solves G(P,P) z = rhs(P) with one step of iterative refinement.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    const Eigen::Index k = static_cast<Eigen::Index>(p_.size());
    Eigen::VectorXd b(k);
    for (Eigen::Index i = 0; i < k; ++i) b[i] = rhs[p_[i]];
    const auto r = r_.topLeftCorner(k, k).triangularView<Eigen::Upper>();
    Eigen::VectorXd z = r.solve(r.transpose().solve(b));
    Eigen::VectorXd res = b;
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index c = 0; c < k; ++c) res[i] -= g_(p_[i], p_[c]) * z[c];
    z += r.solve(r.transpose().solve(res));
    return z;
  }

 private:
  const Eigen::MatrixXd& g_;
  Eigen::MatrixXd r_;
  std::vector<Eigen::Index> p_;
};

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const NnlsOptions& options) {
  if (a.rows() != b.size()) throw DimensionMismatch("nnls", "A and b have different row counts");
  const Eigen::Index m = a.rows(), n = a.cols();
  if (!a.allFinite() || !b.allFinite()) throw InvalidArgument("nnls", "non-finite input");

  const double eps = std::numeric_limits<double>::epsilon();
  const double tol = options.tolerance > 0
                         ? options.tolerance
                         : 10 * eps * a.cwiseAbs().colwise().sum().maxCoeff() * std::max(m, n);
  const int max_iter = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(3 * n);

  const Eigen::MatrixXd gram = a.transpose() * a;
  const Eigen::VectorXd atb = a.transpose() * b;

  NnlsResult res;
  res.x = Eigen::VectorXd::Zero(n);
  std::vector<char> passive(n, 0), rejected(n, 0);
  PassiveFactor factor(gram);

  while (res.iterations < max_iter) {
    const Eigen::VectorXd w = atb - gram * res.x;
    Eigen::Index t = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[j] && !rejected[j] && w[j] > best) {
        best = w[j];
        t = j;
      }
    if (t < 0) {
      res.converged = true;
      break;
    }
    ++res.iterations;
    if (!factor.add(t)) {
      rejected[t] = 1;
      continue;
    }
    passive[t] = 1;
    std::fill(rejected.begin(), rejected.end(), 0);

    for (;;) {
      const Eigen::VectorXd z = factor.solve(atb);
      const auto& p = factor.indices();
      double alpha = 1.0;
      bool feasible = true;
      for (std::size_t i = 0; i < p.size(); ++i)
        if (z[i] <= 0) {
          feasible = false;
          const double xi = res.x[p[i]];
          alpha = std::min(alpha, xi / (xi - z[i]));
        }
      if (feasible) {
        for (std::size_t i = 0; i < p.size(); ++i) res.x[p[i]] = z[i];
        break;
      }
      std::vector<Eigen::Index> keep;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const Eigen::Index j = p[i];
        const double xj = res.x[j] + alpha * (z[i] - res.x[j]);
        const bool blocking = z[i] <= 0 && res.x[j] / (res.x[j] - z[i]) <= alpha;
        if (blocking || xj <= 0) {
          res.x[j] = 0.0;
          passive[j] = 0;
        } else {
          res.x[j] = xj;
          keep.push_back(j);
        }
      }
      factor.rebuild(std::move(keep));
      if (factor.indices().empty()) break;
    }
  }
  res.residual_norm = (a * res.x - b).norm();
  return res;
}

}  // namespace sphfit
