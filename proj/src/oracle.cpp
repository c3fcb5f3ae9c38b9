#include "christoffel/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <algorithm>
#include <vector>

#include "christoffel/errors.hpp"

namespace christoffel::oracle {

QPSolution solve_min_quadratic(const QPInstance& instance) {
  const Eigen::MatrixXd& g = instance.gram;
  const Eigen::VectorXd& c = instance.constraint;
  if (g.rows() != g.cols() || g.rows() != c.size()) {
    throw DimensionMismatch("solve_min_quadratic: gram/constraint size mismatch");
  }
  if (c.lpNorm<Eigen::Infinity>() == 0.0) {
    throw InfeasibleConstraint("solve_min_quadratic: zero constraint vector");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  if (eig.info() != Eigen::Success) {
    throw SingularGram("solve_min_quadratic: eigendecomposition failed");
  }
  const Eigen::VectorXd& lam = eig.eigenvalues();
  if (!(lam.minCoeff() > 0.0)) {
    throw SingularGram("solve_min_quadratic: gram matrix is not positive definite");
  }

  const Eigen::VectorXd z = eig.eigenvectors().transpose() * c;
  const double quad = (z.array().square() / lam.array()).sum();  // c^T G^{-1} c
  QPSolution out;
  out.value = 1.0 / quad;
  out.solution = eig.eigenvectors() * (z.array() / lam.array()).matrix() / quad;
  return out;
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7-15 panel rule (classic QUADPACK abscissae).

namespace {

constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
// Gauss-7 weights attach to kKronrodNodes[1], [3], [5], [7].
constexpr double kGaussWeights[4] = {0.129484966168870, 0.279705391489277,
                                     0.381830050505119, 0.417959183673469};

struct Panel {
  double lo, hi, integral, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double kronrod = 0.0, gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double offset = half * kKronrodNodes[i];
    const double v =
        (i == 7) ? f(mid) : f(mid - offset) + f(mid + offset);
    kronrod += kKronrodWeights[i] * v;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * v;
  }
  kronrod *= half;
  gauss *= half;
  double err = std::abs(kronrod - gauss);
  if (!std::isfinite(kronrod)) err = std::numeric_limits<double>::infinity();
  return Panel{lo, hi, kronrod, err};
}

}  // namespace

double adaptive_integrate(const std::function<double(double)>& f, double lo, double hi,
                          double tol, std::size_t max_panels) {
  if (!(tol > 0.0)) throw std::invalid_argument("adaptive_integrate: tol must be > 0");
  if (!(lo < hi)) throw std::invalid_argument("adaptive_integrate: requires lo < hi");

  std::vector<Panel> heap;
  heap.push_back(evaluate_panel(f, lo, hi));
  const auto exact_error = [&heap] {
    double sum = 0.0;
    for (const Panel& p : heap) sum += p.error;
    return sum;
  };
  // Incrementally tracked error total; re-summed before exiting because
  // removing one dominant panel error can cancel the running total to
  // rounding noise.
  double total_error = heap.front().error;

  while (true) {
    if (total_error <= tol) {
      total_error = exact_error();
      if (total_error <= tol) break;
    }
    if (heap.size() >= max_panels) {
      throw NoConvergence("adaptive_integrate: refinement budget exhausted");
    }
    std::pop_heap(heap.begin(), heap.end());
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      throw NoConvergence("adaptive_integrate: panel width underflow before tolerance");
    }
    const Panel left = evaluate_panel(f, worst.lo, mid);
    const Panel right = evaluate_panel(f, mid, worst.hi);
    total_error += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
  }

  // Sum smallest-to-largest contributions for a slightly tighter result.
  std::vector<double> parts;
  parts.reserve(heap.size());
  for (const Panel& p : heap) parts.push_back(p.integral);
  std::sort(parts.begin(), parts.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  double sum = 0.0;
  for (double p : parts) sum += p;
  return sum;
}

// ---------------------------------------------------------------------------
// Tanh-sinh rule: x = mid + half*tanh((pi/2) sinh t), trapezoid in t with
// step halving. The distance of a node to the nearer endpoint is
// half * (1 - |tanh(v)|) with 1 - tanh(v) = 2 e^{-2v} / (1 + e^{-2v}),
// which stays accurate long after mid + half*u has rounded onto the
// endpoint itself.

namespace {

constexpr double kTanhSinhTMax = 6.8;  // node weights underflow past this

struct TanhSinhNode {
  double u;       // abscissa in [-1, 1]
  double s;       // 1 - |u| without cancellation
  double weight;  // (pi/2) cosh t / cosh^2((pi/2) sinh t)
};

bool tanh_sinh_node(double t, TanhSinhNode& node) {
  const double v = 1.5707963267948966 * std::sinh(t);
  const double av = std::abs(v);
  const double e = std::exp(-2.0 * av);
  const double s = 2.0 * e / (1.0 + e);  // 1 - |tanh(v)|
  // sech^2(v) = 4 e^{-2|v|} / (1 + e^{-2|v|})^2
  const double sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
  const double w = 1.5707963267948966 * std::cosh(t) * sech2;
  if (!(w > 0.0) || s == 0.0) return false;
  node.u = std::copysign(1.0 - s, v);
  node.s = s;
  node.weight = w;
  return true;
}

}  // namespace

double tanh_sinh_integrate(const std::function<double(double, double)>& f, double lo,
                           double hi, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tanh_sinh_integrate: tol must be > 0");
  if (!(lo < hi)) throw std::invalid_argument("tanh_sinh_integrate: requires lo < hi");
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  const auto eval = [&](double t) {
    TanhSinhNode node;
    if (!tanh_sinh_node(t, node)) return 0.0;
    const double x = mid + half * node.u;
    const double s = half * node.s;  // distance to the nearer endpoint
    const double value = f(x, s) * node.weight;
    return std::isfinite(value) ? value : 0.0;
  };

  constexpr int kMaxLevel = 12;
  double step = 1.0;
  double sum = eval(0.0);
  for (int j = 1; step * j <= kTanhSinhTMax; ++j) {
    sum += eval(step * j) + eval(-step * j);
  }
  double integral = sum * step * half;

  for (int level = 1; level <= kMaxLevel; ++level) {
    step *= 0.5;
    double add = 0.0;
    for (int j = 1; step * j <= kTanhSinhTMax; j += 2) {  // new (odd) nodes only
      add += eval(step * j) + eval(-step * j);
    }
    const double refined = integral / 2.0 + add * step * half;
    const double err = std::abs(refined - integral);
    integral = refined;
    // The relative floor concedes convergence once the estimate hits
    // double-precision granularity; matters for large-magnitude inner
    // integrals of nested quadratures with absolute tolerances.
    if (level >= 3 && err <= std::max(tol, 4e-16 * std::abs(integral))) return integral;
  }
  throw NoConvergence("tanh_sinh_integrate: level budget exhausted");
}

namespace {

using BoxWeight = std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>;

double quadrature_moment_rec(const BoxWeight& weight, const AxisBox& box,
                             const MultiIndex& alpha, double tol, Eigen::VectorXd& point,
                             Eigen::VectorXd& dist, int axis) {
  const int d = box.dim();
  const auto integrand = [&](double x, double s) {
    point[axis] = x;
    dist[axis] = s;
    const double inner =
        (axis == d - 1)
            ? weight(point, dist)
            // inner integrals run tighter so their error stays subdominant
            : quadrature_moment_rec(weight, box, alpha, tol * 1e-2, point, dist, axis + 1);
    return inner * std::pow(x, alpha[axis]);
  };
  return tanh_sinh_integrate(integrand, box.lo[axis], box.hi[axis], tol);
}

}  // namespace

double quadrature_moment(const BoxWeight& weight, const AxisBox& box,
                         const MultiIndex& alpha, double tol) {
  if (alpha.dim() != box.dim()) {
    throw DimensionMismatch("quadrature_moment: index/box dimension mismatch");
  }
  Eigen::VectorXd point(box.dim());
  Eigen::VectorXd dist(box.dim());
  return quadrature_moment_rec(weight, box, alpha, tol, point, dist, 0);
}

double quadrature_moment(const std::function<double(const Eigen::VectorXd&)>& weight,
                         const AxisBox& box, const MultiIndex& alpha, double tol) {
  return quadrature_moment(
      [&](const Eigen::VectorXd& x, const Eigen::VectorXd&) { return weight(x); }, box,
      alpha, tol);
}

// ---------------------------------------------------------------------------

namespace {

Rational rational_pow(const Rational& base, int exponent) {
  Rational out = 1;
  for (int i = 0; i < exponent; ++i) out *= base;
  return out;
}

}  // namespace

Rational symbolic_box_average(const MultiIndex& beta, const std::vector<Rational>& xi,
                              const Rational& eps) {
  if (static_cast<int>(xi.size()) != beta.dim()) {
    throw DimensionMismatch("symbolic_box_average: index/center dimension mismatch");
  }
  if (eps == 0) {
    throw ZeroWidth("symbolic_box_average: exact path requires eps > 0");
  }
  if (eps < 0) {
    throw std::invalid_argument("symbolic_box_average: eps must be >= 0");
  }
  Rational value = 1;
  const Rational half = Rational(1, 2) * eps;
  for (int i = 0; i < beta.dim(); ++i) {
    const Rational a = xi[static_cast<std::size_t>(i)] + half;
    const Rational b = xi[static_cast<std::size_t>(i)] - half;
    const int k = beta[i];
    value *= (rational_pow(a, k + 1) - rational_pow(b, k + 1)) /
             (Rational(k + 1) * eps);
  }
  return value;
}

}  // namespace christoffel::oracle
