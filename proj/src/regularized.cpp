#include "christoffel/regularized.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "christoffel/errors.hpp"

namespace christoffel {

BoxQuery::BoxQuery(Eigen::VectorXd center_, double width_)
    : center(std::move(center_)), width(width_) {
  if (center.size() == 0 || !center.allFinite()) {
    throw std::invalid_argument("BoxQuery: center must be finite and non-empty");
  }
  if (!(width >= 0.0) || !std::isfinite(width)) {
    throw std::invalid_argument("BoxQuery: width must be finite and >= 0");
  }
}

namespace {

// (1/(t+1)) * sum_{j=0..t} a^{t-j} b^j with a = hi endpoint, b = lo
// endpoint of one axis: the average of y^t over [b, a] without dividing
// by a - b.
double axis_average(int t, double a, double b) {
  if (t == 0) return 1.0;
  double pa = 1.0;
  std::vector<double> pb(static_cast<std::size_t>(t) + 1);
  pb[0] = 1.0;
  for (int j = 1; j <= t; ++j) pb[static_cast<std::size_t>(j)] = pb[static_cast<std::size_t>(j - 1)] * b;
  double sum = 0.0;
  for (int j = t; j >= 0; --j) {
    sum += pa * pb[static_cast<std::size_t>(j)];
    pa *= a;
  }
  return sum / static_cast<double>(t + 1);
}

// Per-axis table of axis_average(t, .) for t = 0..maxdeg, so a full
// box-averaged vector costs O(d n^2 + s(n)) instead of O(s(n) n).
std::vector<std::vector<double>> axis_tables(const BoxQuery& q, int maxdeg) {
  std::vector<std::vector<double>> tables(static_cast<std::size_t>(q.dim()));
  for (int i = 0; i < q.dim(); ++i) {
    const double a = q.center[i] + q.width / 2.0;
    const double b = q.center[i] - q.width / 2.0;
    auto& tab = tables[static_cast<std::size_t>(i)];
    tab.resize(static_cast<std::size_t>(maxdeg) + 1);
    for (int t = 0; t <= maxdeg; ++t) tab[static_cast<std::size_t>(t)] = axis_average(t, a, b);
  }
  return tables;
}

}  // namespace

double box_avg_monomial(const MultiIndex& beta, const BoxQuery& q) {
  if (beta.dim() != q.dim()) {
    throw DimensionMismatch("box_avg_monomial: index/query dimension mismatch");
  }
  double value = 1.0;
  if (q.width == 0.0) {
    for (int i = 0; i < q.dim(); ++i) value *= std::pow(q.center[i], beta[i]);
    return value;
  }
  for (int i = 0; i < q.dim(); ++i) {
    value *= axis_average(beta[i], q.center[i] + q.width / 2.0,
                          q.center[i] - q.width / 2.0);
  }
  return value;
}

Eigen::VectorXd box_avg_vector(const IndexSet& set, const BoxQuery& q) {
  if (set.dim() != q.dim()) {
    throw DimensionMismatch("box_avg_vector: index set/query dimension mismatch");
  }
  if (q.width == 0.0 || set.degree() <= 1) {
    // Degenerate box, or a set where the average of every entry is the
    // value at the center (constants and linear monomials).
    return monomial_vector(set, q.center);
  }
  const auto tables = axis_tables(q, set.degree());
  Eigen::VectorXd v(static_cast<Eigen::Index>(set.size()));
  for (std::size_t k = 0; k < set.size(); ++k) {
    const MultiIndex& beta = set[k];
    double value = 1.0;
    for (int i = 0; i < set.dim(); ++i) {
      value *= tables[static_cast<std::size_t>(i)][static_cast<std::size_t>(beta[i])];
    }
    v[static_cast<Eigen::Index>(k)] = value;
  }
  return v;
}

double lambda_tilde_inv(const ChristoffelModel& model, const BoxQuery& q) {
  return model.whiten(box_avg_vector(model.index_set(), q)).squaredNorm();
}

RegularizedEvaluation evaluate_regularized(const ChristoffelModel& model,
                                           const BoxQuery& q) {
  RegularizedEvaluation out;
  out.degree = model.degree();
  out.lambda_tilde_inv = lambda_tilde_inv(model, q);
  out.lambda_tilde = 1.0 / out.lambda_tilde_inv;
  if (q.width > 0.0) {
    out.density_estimate =
        out.lambda_tilde / std::pow(q.width, model.dim());
  }
  return out;
}

Eigen::VectorXd optimal_polynomial(const ChristoffelModel& model, const BoxQuery& q) {
  const Eigen::VectorXd vtilde = box_avg_vector(model.index_set(), q);
  const Eigen::VectorXd w = model.whiten(vtilde);
  const double lti = w.squaredNorm();
  const double lambda_tilde = 1.0 / lti;
  Eigen::VectorXd coeffs =
      lambda_tilde *
      model.cholesky_factor().transpose().triangularView<Eigen::Upper>().solve(w);

  // Optimality identities from the KKT system; violations signal a
  // factorization too ill-conditioned to trust.
  const double constraint = coeffs.dot(vtilde);
  const double objective = coeffs.dot(model.moment_values() * coeffs);
  if (std::abs(constraint - 1.0) > 1e-10 ||
      std::abs(objective - lambda_tilde) > 1e-10 * std::max(1.0, lambda_tilde)) {
    throw NotPositiveDefinite(
        "optimal_polynomial: optimality residuals exceed 1e-10; the moment "
        "matrix is too ill-conditioned at this degree");
  }
  return coeffs;
}

double density_estimate(const ChristoffelModel& model, const BoxQuery& q) {
  if (q.width == 0.0) {
    throw ZeroWidth("density_estimate: undefined at a point query (width 0)");
  }
  return 1.0 / (lambda_tilde_inv(model, q) * std::pow(q.width, model.dim()));
}

BoundaryCorrectedEvaluation boundary_corrected_evaluation(const ChristoffelModel& model,
                                                          const BoxQuery& q,
                                                          const AxisBox& domain) {
  if (domain.dim() != q.dim()) {
    throw DimensionMismatch("boundary_corrected_evaluation: domain dimension mismatch");
  }
  if (q.width == 0.0) {
    throw ZeroWidth("boundary_corrected_evaluation: undefined at width 0");
  }
  const int d = q.dim();

  // Clip the query cube to the domain, axis by axis.
  double overlap_volume = 1.0;
  Eigen::VectorXd a(d), b(d);
  for (int i = 0; i < d; ++i) {
    a[i] = std::min(q.center[i] + q.width / 2.0, domain.hi[i]);
    b[i] = std::max(q.center[i] - q.width / 2.0, domain.lo[i]);
    overlap_volume *= std::max(0.0, a[i] - b[i]);
  }
  if (overlap_volume <= 0.0) {
    throw EmptyIntersection(
        "boundary_corrected_evaluation: query box does not meet the domain");
  }

  // Box average over B cap domain, still normalized by width^d:
  // per axis, int_{[b_i, a_i]} y^t dy / width = ((a_i-b_i)/width) * avg.
  const IndexSet& set = model.index_set();
  Eigen::VectorXd vclip(static_cast<Eigen::Index>(set.size()));
  for (std::size_t k = 0; k < set.size(); ++k) {
    const MultiIndex& beta = set[k];
    double value = 1.0;
    for (int i = 0; i < d; ++i) {
      value *= (a[i] - b[i]) / q.width * axis_average(beta[i], a[i], b[i]);
    }
    vclip[static_cast<Eigen::Index>(k)] = value;
  }

  BoundaryCorrectedEvaluation out;
  out.lambda_tilde_inv = model.whiten(vclip).squaredNorm();
  out.overlap_volume = overlap_volume;
  const double tau = std::pow(q.width, d);
  out.uncorrected = 1.0 / (out.lambda_tilde_inv * tau);
  out.corrected = out.uncorrected * overlap_volume / tau;
  return out;
}

double density_estimate_boundary_corrected(const ChristoffelModel& model,
                                           const BoxQuery& q, const AxisBox& domain) {
  return boundary_corrected_evaluation(model, q, domain).corrected;
}

// ---------------------------------------------------------------------------

EpsilonRule EpsilonRule::fixed(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    throw std::invalid_argument("EpsilonRule::fixed: width must be >= 0");
  }
  return {Kind::fixed, eps};
}

EpsilonRule EpsilonRule::one_over_n(double r) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("EpsilonRule::one_over_n: exponent must be > 0");
  }
  return {Kind::power, r};
}

double EpsilonRule::width_for(int n) const {
  if (kind == Kind::fixed) return value;
  return std::pow(static_cast<double>(n), -value);
}

const char* to_string(SupportVerdict v) {
  switch (v) {
    case SupportVerdict::inside: return "inside";
    case SupportVerdict::outside: return "outside";
    default: return "uncertain";
  }
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("fitted_slope: needs >= 2 matching points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SupportReport classify_support(const MomentProvider& provider, const Eigen::VectorXd& xi,
                               const SupportOptions& options) {
  if (xi.size() != provider.dim()) {
    throw DimensionMismatch("classify_support: point dimension mismatch");
  }
  const auto& degrees = options.degrees;
  if (degrees.size() < 4) {
    throw ConfigError("classify_support: needs at least 4 degrees");
  }
  if (!std::is_sorted(degrees.begin(), degrees.end()) ||
      std::adjacent_find(degrees.begin(), degrees.end()) != degrees.end() ||
      degrees.front() < 0) {
    throw ConfigError("classify_support: degrees must be strictly increasing and >= 0");
  }
  if (options.rule.kind == EpsilonRule::Kind::power && degrees.front() < 1) {
    throw ConfigError("classify_support: the 1/n^r width rule needs degrees >= 1");
  }

  SupportReport report;
  report.degrees_used = degrees;
  report.log_lambda_tilde_inv.reserve(degrees.size());
  for (int n : degrees) {
    ChristoffelModel model = build_model(provider, n, options.jitter);
    const BoxQuery q(xi, options.rule.width_for(n));
    report.log_lambda_tilde_inv.push_back(std::log(lambda_tilde_inv(model, q)));
  }

  // Early degrees are still converging even deep inside the support; fit
  // on the tail where the trend, not the transient, dominates.
  const std::size_t total = degrees.size();
  const std::size_t window = std::max<std::size_t>(4, (total + 1) / 2);
  const std::size_t start = total - window;
  std::vector<double> xs, ys;
  for (std::size_t i = start; i < total; ++i) {
    const double n = static_cast<double>(degrees[i]);
    double y = report.log_lambda_tilde_inv[i];
    if (options.rule.kind == EpsilonRule::Kind::power) {
      y -= options.rule.value * provider.dim() * std::log(n);
    }
    xs.push_back(n);
    ys.push_back(y);
  }
  report.decay_slope = fitted_slope(xs, ys);

  if (report.decay_slope > options.slope_hi) {
    report.verdict = SupportVerdict::outside;
  } else if (report.decay_slope < options.slope_lo) {
    report.verdict = SupportVerdict::inside;
  } else {
    report.verdict = SupportVerdict::uncertain;
  }
  return report;
}

}  // namespace christoffel
