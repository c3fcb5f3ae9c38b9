#pragma once

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <vector>

#include "christoffel/measures.hpp"
#include "christoffel/multi_index.hpp"

// Independent brute-force references used to validate the fast paths.
// These deliberately avoid the Cholesky machinery of the main library so
// that agreement between the two routes is evidence, not tautology.
namespace christoffel::oracle {

// min p^T G p  s.t.  c^T p = 1, with G symmetric positive definite.
struct QPInstance {
  Eigen::MatrixXd gram;
  Eigen::VectorXd constraint;
};

struct QPSolution {
  double value = 0.0;
  Eigen::VectorXd solution;
};

// Closed-form KKT solution p* = G^{-1}c / (c^T G^{-1} c), value =
// 1 / (c^T G^{-1} c), computed through a symmetric eigendecomposition.
// Throws SingularGram if G fails the positive-definiteness check and
// InfeasibleConstraint if c = 0.
QPSolution solve_min_quadratic(const QPInstance& instance);

// Adaptive Gauss-Kronrod (7-15) panel quadrature of f over [lo, hi] with
// a global error budget: the worst panel is split until the summed error
// estimate drops below tol. Throws NoConvergence when the panel budget
// runs out. Meant for smooth integrands; an endpoint singularity stalls
// the panel refinement in double precision (use tanh_sinh_integrate).
double adaptive_integrate(const std::function<double(double)>& f, double lo, double hi,
                          double tol, std::size_t max_panels = 200000);

// Tanh-sinh (double-exponential) quadrature with level refinement.
// Handles integrable endpoint singularities: the integrand receives the
// distance s to the nearer interval endpoint, computed without
// cancellation, so 1/sqrt(1-x^2)-type weights can be evaluated stably as
// a function of s. Throws NoConvergence if the level budget runs out.
double tanh_sinh_integrate(const std::function<double(double, double)>& f, double lo,
                           double hi, double tol);

// int_box x^alpha w(x) dx, nesting the tanh-sinh rule per axis. The
// two-argument form passes per-axis distances to the nearer box face for
// weights that are singular there.
double quadrature_moment(const std::function<double(const Eigen::VectorXd&)>& weight,
                         const AxisBox& box, const MultiIndex& alpha, double tol);
double quadrature_moment(
    const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& weight,
    const AxisBox& box, const MultiIndex& alpha, double tol);

using Rational = boost::multiprecision::cpp_rational;

// Exact rational value of the box-averaged monomial,
//   prod_i [(xi_i + eps/2)^{b_i+1} - (xi_i - eps/2)^{b_i+1}] / ((b_i+1) eps),
// for rational center and width. Throws ZeroWidth at eps = 0 (this exact
// path divides by eps; the fast path covers the degenerate case).
Rational symbolic_box_average(const MultiIndex& beta, const std::vector<Rational>& xi,
                              const Rational& eps);

}  // namespace christoffel::oracle
