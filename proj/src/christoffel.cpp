#include "christoffel/christoffel.hpp"

#include <cmath>

#include "christoffel/errors.hpp"

namespace christoffel {

namespace {

// Eigen's LLT reports NumericalIssue for indefinite input, but a
// semidefinite matrix can slip through with zero/denormal pivots; treat
// any non-positive or non-finite pivot as failure too.
bool try_cholesky(const Eigen::MatrixXd& m, Eigen::MatrixXd& factor) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return false;
  factor = llt.matrixL();
  for (Eigen::Index i = 0; i < factor.rows(); ++i) {
    if (!(factor(i, i) > 0.0) || !std::isfinite(factor(i, i))) return false;
  }
  return true;
}

}  // namespace

ChristoffelModel::ChristoffelModel(MomentMatrix matrix, Eigen::MatrixXd factor,
                                   double jitter)
    : matrix_(std::move(matrix)), factor_(std::move(factor)), jitter_applied_(jitter) {
  const auto diag = factor_.diagonal();
  const double ratio = diag.maxCoeff() / diag.minCoeff();
  condition_estimate_ = ratio * ratio;
}

ChristoffelModel ChristoffelModel::build(MomentMatrix matrix, JitterPolicy policy) {
  const Eigen::MatrixXd& m = matrix.values;
  if (m.rows() != m.cols() ||
      m.rows() != static_cast<Eigen::Index>(matrix.index_set.size())) {
    throw DimensionMismatch("ChristoffelModel::build: matrix/index set size mismatch");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("ChristoffelModel::build: non-finite moment matrix");
  }
  if (!m.isApprox(m.transpose(), 1e-14)) {
    throw std::invalid_argument("ChristoffelModel::build: matrix not symmetric");
  }

  Eigen::MatrixXd factor;
  if (try_cholesky(m, factor)) {
    return ChristoffelModel(std::move(matrix), std::move(factor), 0.0);
  }
  if (policy.enabled) {
    const double jitter =
        policy.lambda_rel * m.trace() / static_cast<double>(m.rows());
    Eigen::MatrixXd regularized = m;
    regularized.diagonal().array() += jitter;
    if (try_cholesky(regularized, factor)) {
      return ChristoffelModel(std::move(matrix), std::move(factor), jitter);
    }
  }
  throw NotPositiveDefinite(
      "moment matrix is not positive definite; the moments are rank-deficient "
      "(for empirical measures: fewer samples than basis functions, m < s(n))");
}

Eigen::VectorXd ChristoffelModel::whiten(const Eigen::VectorXd& v) const {
  return factor_.triangularView<Eigen::Lower>().solve(v);
}

Eigen::VectorXd ChristoffelModel::solve(const Eigen::VectorXd& v) const {
  Eigen::VectorXd w = factor_.triangularView<Eigen::Lower>().solve(v);
  return factor_.transpose().triangularView<Eigen::Upper>().solve(w);
}

double ChristoffelModel::lambda_inv(const Eigen::VectorXd& x) const {
  return whiten(monomial_vector(matrix_.index_set, x)).squaredNorm();
}

double ChristoffelModel::cd_kernel(const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& y) const {
  return whiten(monomial_vector(matrix_.index_set, x))
      .dot(whiten(monomial_vector(matrix_.index_set, y)));
}

Eigen::MatrixXd ChristoffelModel::orthonormal_basis() const {
  const Eigen::Index s = factor_.rows();
  return factor_.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXd::Identity(s, s));
}

ChristoffelModel build_model(const MomentProvider& provider, int degree) {
  const JitterPolicy policy =
      provider.is_empirical() ? JitterPolicy::relative(1e-12) : JitterPolicy::none();
  return build_model(provider, degree, policy);
}

ChristoffelModel build_model(const MomentProvider& provider, int degree,
                             JitterPolicy policy) {
  IndexSet set = IndexSet::enumerate(provider.dim(), degree);
  return ChristoffelModel::build(moment_matrix(provider, set), policy);
}

}  // namespace christoffel
