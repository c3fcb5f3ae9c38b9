#pragma once

#include <Eigen/Dense>

#include "christoffel/measures.hpp"
#include "christoffel/multi_index.hpp"

namespace christoffel {

// What to do when the Cholesky factorization fails: either fail loudly,
// or add lambda_rel * trace(M)/s(n) to the diagonal once and retry.
struct JitterPolicy {
  bool enabled = false;
  double lambda_rel = 0.0;

  static JitterPolicy none() { return {}; }
  static JitterPolicy relative(double lambda_rel) { return {true, lambda_rel}; }
};

// Immutable bundle of an index set and a Cholesky factor L of the moment
// matrix (M = L L^T). Quadratic forms v^T M^{-1} v are evaluated as
// |L^{-1} v|^2 through triangular solves; M^{-1} is never formed. Moment
// matrices in the monomial basis are badly conditioned as the degree
// grows, so a cheap condition proxy is recorded for diagnostics.
class ChristoffelModel {
 public:
  static ChristoffelModel build(MomentMatrix matrix, JitterPolicy policy);

  const IndexSet& index_set() const { return matrix_.index_set; }
  int dim() const { return matrix_.index_set.dim(); }
  int degree() const { return matrix_.index_set.degree(); }
  const Eigen::MatrixXd& moment_values() const { return matrix_.values; }
  const Eigen::MatrixXd& cholesky_factor() const { return factor_; }
  double jitter_applied() const { return jitter_applied_; }
  // (max_i L_ii / min_i L_ii)^2 -- a cheap proxy, reported not enforced.
  double condition_estimate() const { return condition_estimate_; }

  // L^{-1} v via forward substitution.
  Eigen::VectorXd whiten(const Eigen::VectorXd& v) const;
  // (L L^T)^{-1} v = M^{-1} v via two triangular solves.
  Eigen::VectorXd solve(const Eigen::VectorXd& v) const;

  // v_n(x)^T M^{-1} v_n(x); reciprocal of the Christoffel function.
  double lambda_inv(const Eigen::VectorXd& x) const;
  double lambda(const Eigen::VectorXd& x) const { return 1.0 / lambda_inv(x); }

  // Christoffel-Darboux kernel K(x, y) = v_n(x)^T M^{-1} v_n(y).
  double cd_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  // Rows are the coefficient vectors (monomial basis) of polynomials
  // orthonormal with respect to the measure: D = L^{-1}, D^T D = M^{-1}.
  Eigen::MatrixXd orthonormal_basis() const;

 private:
  ChristoffelModel(MomentMatrix matrix, Eigen::MatrixXd factor, double jitter);

  MomentMatrix matrix_;
  Eigen::MatrixXd factor_;
  double jitter_applied_ = 0.0;
  double condition_estimate_ = 1.0;
};

// Assemble the degree-n moment matrix of the provider and factorize it
// with the default policy for the provider kind: relative(1e-12) jitter
// for empirical measures (sampling noise produces near-singular
// matrices), none for analytic ones (failures should be loud).
ChristoffelModel build_model(const MomentProvider& provider, int degree);
ChristoffelModel build_model(const MomentProvider& provider, int degree, JitterPolicy policy);

}  // namespace christoffel
