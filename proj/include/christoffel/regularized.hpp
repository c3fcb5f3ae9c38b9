#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "christoffel/christoffel.hpp"
#include "christoffel/measures.hpp"
#include "christoffel/multi_index.hpp"

namespace christoffel {

// Cube B(center, width) = { x : |x - center|_inf <= width/2 }, with
// volume width^d. width = 0 is the legal degenerate case and means point
// evaluation at the center.
struct BoxQuery {
  Eigen::VectorXd center;
  double width = 0.0;

  BoxQuery(Eigen::VectorXd center_, double width_);
  int dim() const { return static_cast<int>(center.size()); }
};

// Average of y^beta over the query cube, computed per axis with the
// telescoped form
//   (1/(b_i+1)) * sum_{j=0..b_i} a_i^{b_i-j} * b_i^j,  a/b = center +- width/2,
// which is a polynomial in (center, width) and needs no division by the
// width. width = 0 routes to exact point evaluation of the monomial.
double box_avg_monomial(const MultiIndex& beta, const BoxQuery& q);

// Entrywise box averages over an index set: the box-averaged monomial
// vector. Equals monomial_vector(set, center) exactly at width 0, and for
// degree <= 1 sets at every width.
Eigen::VectorXd box_avg_vector(const IndexSet& set, const BoxQuery& q);

// Reciprocal of the box-regularized Christoffel function,
// vtilde^T M^{-1} vtilde, evaluated as |L^{-1} vtilde|^2. Strictly
// positive for every query; coincides with lambda_inv at width 0.
double lambda_tilde_inv(const ChristoffelModel& model, const BoxQuery& q);

struct RegularizedEvaluation {
  double lambda_tilde = 0.0;
  double lambda_tilde_inv = 0.0;
  // width^{-d} * lambda_tilde; only defined for width > 0.
  std::optional<double> density_estimate;
  int degree = 0;
};

RegularizedEvaluation evaluate_regularized(const ChristoffelModel& model,
                                           const BoxQuery& q);

// Coefficients (monomial basis) of the unique minimizer of int p^2 dmu
// subject to a unit box average:  p* = lambda_tilde * M^{-1} vtilde.
// The two optimality identities <p*, vtilde> = 1 and p*^T M p* =
// lambda_tilde are verified to 1e-10 before returning.
Eigen::VectorXd optimal_polynomial(const ChristoffelModel& model, const BoxQuery& q);

// width^{-d} * lambda_tilde; estimates the density of the measure near
// the query center. Throws ZeroWidth at width 0.
double density_estimate(const ChristoffelModel& model, const BoxQuery& q);

// Boundary-aware variant for a measure supported on an axis box: the box
// average is taken over B \cap domain (keeping the width^d
// normalization), and the estimate is multiplied by vol(B cap domain) /
// width^d to remove the overlap bias. Agrees with density_estimate when
// the query box lies inside the domain.
struct BoundaryCorrectedEvaluation {
  double lambda_tilde_inv = 0.0;  // clipped-functional value
  double overlap_volume = 0.0;    // vol(B cap domain)
  double uncorrected = 0.0;       // width^{-d} * lambda_tilde (clipped)
  double corrected = 0.0;         // uncorrected * overlap_volume / width^d
};

BoundaryCorrectedEvaluation boundary_corrected_evaluation(const ChristoffelModel& model,
                                                          const BoxQuery& q,
                                                          const AxisBox& domain);

double density_estimate_boundary_corrected(const ChristoffelModel& model,
                                           const BoxQuery& q, const AxisBox& domain);

// ---------------------------------------------------------------------------
// Support inference

// Width schedule for degree sweeps: either a fixed width, or
// width(n) = 1/n^r.
struct EpsilonRule {
  enum class Kind { fixed, power };
  Kind kind = Kind::fixed;
  double value = 0.0;  // fixed width, or the exponent r

  static EpsilonRule fixed(double eps);
  static EpsilonRule one_over_n(double r = 1.0);
  double width_for(int n) const;
};

enum class SupportVerdict { inside, outside, uncertain };

const char* to_string(SupportVerdict v);

struct SupportOptions {
  EpsilonRule rule = EpsilonRule::fixed(0.1);
  std::vector<int> degrees;  // >= 4 entries, strictly increasing
  double slope_hi = 0.25;    // nats per unit degree
  double slope_lo = 0.05;
  JitterPolicy jitter;       // applied to every per-degree model build
};

struct SupportReport {
  SupportVerdict verdict = SupportVerdict::uncertain;
  double decay_slope = 0.0;
  std::vector<int> degrees_used;
  std::vector<double> log_lambda_tilde_inv;  // y_n = log lambda_tilde_inv(xi, eps(n))
};

// Builds one model per degree, collects y_n = log lambda_tilde_inv and
// fits a least-squares slope over the most-converged tail of the sweep
// (the last max(4, ceil(K/2)) degrees). Under the 1/n^r rule the
// polynomial trend r*d*log n is subtracted before fitting, so that the
// at-most-polynomial growth inside the support reads as a flat line.
// Verdict: outside if slope > slope_hi, inside if slope < slope_lo,
// uncertain otherwise.
SupportReport classify_support(const MomentProvider& provider, const Eigen::VectorXd& xi,
                               const SupportOptions& options);

// Least-squares slope of y against x; helper shared with the CLI.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace christoffel
