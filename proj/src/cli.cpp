#include "christoffel/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "christoffel/errors.hpp"
#include "christoffel/oracle.hpp"
#include "christoffel/sample_io.hpp"

namespace christoffel::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(part);
  return parts;
}

double parse_double_or_throw(const std::string& text, const std::string& what) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw ConfigError(what + ": not a finite number: '" + text + "'");
  }
  return v;
}

}  // namespace

EpsSpec parse_eps_spec(const std::string& text) {
  EpsSpec spec;
  if (text.rfind("rule:", 0) == 0) {
    const std::string rule = text.substr(5);
    if (rule == "1/n") {
      spec.rule_r = 1.0;
    } else if (rule.rfind("1/n^", 0) == 0) {
      const double r = parse_double_or_throw(rule.substr(4), "eps rule exponent");
      if (!(r > 0.0)) throw ConfigError("eps rule: exponent must be > 0");
      spec.rule_r = r;
    } else {
      throw ConfigError("eps rule: expected rule:1/n or rule:1/n^r, got '" + text + "'");
    }
    return spec;
  }
  for (const auto& field : split(text, ',')) {
    const double v = parse_double_or_throw(field, "eps");
    if (v < 0.0) throw ConfigError("eps: widths must be >= 0");
    spec.values.push_back(v);
  }
  if (spec.values.empty()) throw ConfigError("eps: empty specification");
  std::sort(spec.values.begin(), spec.values.end());
  return spec;
}

Eigen::VectorXd parse_point(const std::string& text) {
  const auto fields = split(text, ',');
  if (fields.empty()) throw ConfigError("point: empty specification");
  Eigen::VectorXd x(static_cast<Eigen::Index>(fields.size()));
  for (std::size_t i = 0; i < fields.size(); ++i) {
    x[static_cast<Eigen::Index>(i)] = parse_double_or_throw(fields[i], "point");
  }
  return x;
}

std::vector<Eigen::VectorXd> parse_grid(const std::string& text) {
  const auto axes = split(text, ';');
  if (axes.empty()) throw ConfigError("grid: empty specification");
  std::vector<std::vector<double>> ticks;
  for (const auto& axis : axes) {
    const auto parts = split(axis, ':');
    if (parts.size() != 3) {
      throw ConfigError("grid: each axis needs min:max:count, got '" + axis + "'");
    }
    const double lo = parse_double_or_throw(parts[0], "grid min");
    const double hi = parse_double_or_throw(parts[1], "grid max");
    const long count = std::lround(parse_double_or_throw(parts[2], "grid count"));
    if (count < 1) throw ConfigError("grid: count must be >= 1");
    if (count > 1 && !(hi > lo)) throw ConfigError("grid: needs max > min when count > 1");
    std::vector<double> axis_ticks;
    for (long i = 0; i < count; ++i) {
      axis_ticks.push_back(count == 1 ? lo
                                      : lo + (hi - lo) * static_cast<double>(i) /
                                                 static_cast<double>(count - 1));
    }
    ticks.push_back(std::move(axis_ticks));
  }

  std::vector<Eigen::VectorXd> points;
  const std::size_t d = ticks.size();
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) p[static_cast<Eigen::Index>(i)] = ticks[i][idx[i]];
    points.push_back(std::move(p));
    std::size_t axis = d;
    while (axis > 0) {
      --axis;
      if (++idx[axis] < ticks[axis].size()) break;
      idx[axis] = 0;
      if (axis == 0) return points;
    }
  }
}

std::vector<int> parse_degrees(const std::string& text) {
  std::vector<int> degrees;
  for (const auto& field : split(text, ',')) {
    const double v = parse_double_or_throw(field, "degrees");
    const int n = static_cast<int>(std::lround(v));
    if (n < 0 || static_cast<double>(n) != v) {
      throw ConfigError("degrees: expected non-negative integers");
    }
    degrees.push_back(n);
  }
  if (degrees.empty()) throw ConfigError("degrees: empty list");
  return degrees;
}

AxisBox parse_axis_box(const std::string& text) {
  const auto fields = split(text, ',');
  if (fields.empty() || fields.size() % 2 != 0) {
    throw ConfigError("box: expected a1,b1,a2,b2,... with one pair per axis");
  }
  const auto d = static_cast<Eigen::Index>(fields.size() / 2);
  Eigen::VectorXd lo(d), hi(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    lo[i] = parse_double_or_throw(fields[static_cast<std::size_t>(2 * i)], "box bound");
    hi[i] = parse_double_or_throw(fields[static_cast<std::size_t>(2 * i + 1)], "box bound");
  }
  try {
    return AxisBox(lo, hi);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("box: ") + e.what());
  }
}

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

void write_table_csv(const ResultTable& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << row[i] << (i + 1 < row.size() ? "," : "");
    }
    out << "\n";
  }
}

namespace {

bool is_numeric_token(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  (void)std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

}  // namespace

void write_table_jsonl(const ResultTable& table, std::ostream& out) {
  for (const auto& row : table.rows) {
    out << "{";
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << "\"" << table.columns[i] << "\":";
      if (is_numeric_token(row[i])) {
        out << row[i];
      } else {
        out << "\"" << row[i] << "\"";
      }
      if (i + 1 < row.size()) out << ",";
    }
    out << "}\n";
  }
}

ResultTable read_table_csv(std::istream& in) {
  ResultTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("result table: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.columns = split(line, ',');
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto row = split(line, ',');
    if (row.size() != table.columns.size()) {
      throw ConfigError("result table line " + std::to_string(line_no) +
                        ": field count mismatch");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_table_file(const ResultTable& table, const std::string& path,
                      const std::string& format) {
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!path.empty() && path != "-") {
    file.open(path);
    if (!file) throw ConfigError("cannot open output file: " + path);
    out = &file;
  }
  if (format == "csv") {
    write_table_csv(table, *out);
  } else if (format == "jsonl") {
    write_table_jsonl(table, *out);
  } else {
    throw ConfigError("unknown output format: '" + format + "' (use csv or jsonl)");
  }
}

EvalMode parse_eval_mode(const std::string& text) {
  if (text == "lambda") return EvalMode::lambda;
  if (text == "lambda-tilde") return EvalMode::lambda_tilde;
  if (text == "density") return EvalMode::density;
  throw ConfigError("mode: expected lambda | lambda-tilde | density, got '" + text + "'");
}

// ---------------------------------------------------------------------------
// Shared evaluation context: loads the measure, optionally transports it
// onto [-1,1]^d (the affine map leaves every Christoffel value
// unchanged and keeps the moment matrix well conditioned), and maps
// queries into the internal frame.

namespace {

struct EvalContext {
  MomentProviderPtr provider;
  Eigen::VectorXd shift;
  double scale = 1.0;

  static EvalContext make(const std::string& measure, bool rescale) {
    EvalContext ctx;
    ctx.provider = load_measure(measure);
    ctx.shift = Eigen::VectorXd::Zero(ctx.provider->dim());
    if (rescale) {
      const AxisBox box = ctx.provider->bounding_box();
      ctx.shift = 0.5 * (box.lo + box.hi);
      ctx.scale = 0.5 * (box.hi - box.lo).maxCoeff();
      ctx.provider = ctx.provider->pushforward(ctx.shift, ctx.scale);
    }
    return ctx;
  }

  Eigen::VectorXd to_internal(const Eigen::VectorXd& x) const {
    return (x - shift) / scale;
  }
  AxisBox to_internal(const AxisBox& box) const {
    return AxisBox((box.lo - shift) / scale, (box.hi - shift) / scale);
  }
};

ChristoffelModel build_with_warning(const MomentProvider& provider, int degree) {
  ChristoffelModel model = build_model(provider, degree);
  if (model.condition_estimate() > 1e12) {
    std::cerr << "warning: moment matrix condition estimate "
              << format_double(model.condition_estimate()) << " at degree " << degree
              << "; results may lose precision (rescaling the domain into [-1,1]^d "
                 "with --rescale usually helps)\n";
  }
  return model;
}

std::vector<Eigen::VectorXd> resolve_points(const std::vector<std::string>& points,
                                            const std::string& grid, int dim) {
  if (!points.empty() && !grid.empty()) {
    throw ConfigError("give either --point or --grid, not both");
  }
  std::vector<Eigen::VectorXd> out;
  if (!grid.empty()) {
    out = parse_grid(grid);
  } else {
    if (points.empty()) throw ConfigError("no query points: give --point or --grid");
    for (const auto& p : points) out.push_back(parse_point(p));
  }
  for (const auto& p : out) {
    if (p.size() != dim) {
      throw ConfigError("query point dimension " + std::to_string(p.size()) +
                        " does not match measure dimension " + std::to_string(dim));
    }
  }
  return out;
}

void append_coord_columns(ResultTable& table, int dim) {
  for (int i = 0; i < dim; ++i) table.columns.push_back("x" + std::to_string(i + 1));
}

}  // namespace

ResultTable run_eval(const EvalConfig& config) {
  if (config.degree < 0) throw ConfigError("degree must be >= 0");
  const EvalContext ctx = EvalContext::make(config.measure, config.rescale);
  const int d = ctx.provider->dim();
  const auto points = resolve_points(config.points, config.grid, d);
  const EpsSpec eps_spec = parse_eps_spec(config.eps);

  std::vector<double> widths;
  if (config.mode == EvalMode::lambda) {
    widths = {0.0};  // point evaluation; any --eps is irrelevant here
  } else if (eps_spec.rule_r) {
    if (config.degree < 1) throw ConfigError("eps rule needs degree >= 1");
    widths.push_back(std::pow(static_cast<double>(config.degree), -*eps_spec.rule_r));
  } else {
    widths = eps_spec.values;
  }
  if (config.mode == EvalMode::density) {
    for (double w : widths) {
      if (w <= 0.0) throw ConfigError("density mode needs eps > 0");
    }
  }

  std::optional<AxisBox> domain;
  if (!config.boundary_box.empty()) {
    if (config.mode != EvalMode::density) {
      throw ConfigError("--boundary-box only applies to density mode");
    }
    AxisBox box = parse_axis_box(config.boundary_box);
    if (box.dim() != d) throw ConfigError("--boundary-box dimension mismatch");
    domain = box;
  }

  const ChristoffelModel model = build_with_warning(*ctx.provider, config.degree);

  ResultTable table;
  append_coord_columns(table, d);
  table.columns.insert(table.columns.end(), {"epsilon", "n", "lambda", "lambda_inv"});
  if (config.mode == EvalMode::density) table.columns.push_back("density_estimate");

  for (const auto& point : points) {
    const Eigen::VectorXd internal_point = ctx.to_internal(point);
    for (double eps : widths) {
      double lam_inv = 0.0;
      if (config.mode == EvalMode::lambda) {
        lam_inv = model.lambda_inv(internal_point);
      } else {
        lam_inv = lambda_tilde_inv(model, BoxQuery(internal_point, eps / ctx.scale));
      }

      std::vector<std::string> row;
      for (int i = 0; i < d; ++i) row.push_back(format_double(point[i]));
      row.push_back(format_double(eps));
      row.push_back(std::to_string(config.degree));
      row.push_back(format_double(1.0 / lam_inv));
      row.push_back(format_double(lam_inv));

      if (config.mode == EvalMode::density) {
        const double tau = std::pow(eps, d);
        if (domain) {
          const auto bce = boundary_corrected_evaluation(
              model, BoxQuery(internal_point, eps / ctx.scale), ctx.to_internal(*domain));
          const double overlap = bce.overlap_volume * std::pow(ctx.scale, d);
          row.push_back(
              format_double(overlap / (bce.lambda_tilde_inv * tau * tau)));
        } else {
          row.push_back(format_double(1.0 / (lam_inv * tau)));
        }
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

ResultTable run_support(const SupportCliConfig& config) {
  const EvalContext ctx = EvalContext::make(config.measure, /*rescale=*/false);
  const int d = ctx.provider->dim();
  const auto points = resolve_points(config.points, "", d);

  SupportOptions options;
  options.degrees = parse_degrees(config.degrees);
  options.slope_hi = config.slope_hi;
  options.slope_lo = config.slope_lo;
  options.jitter = ctx.provider->is_empirical() ? JitterPolicy::relative(1e-12)
                                                : JitterPolicy::none();
  const EpsSpec eps_spec = parse_eps_spec(config.eps);
  if (eps_spec.rule_r) {
    options.rule = EpsilonRule::one_over_n(*eps_spec.rule_r);
  } else {
    if (eps_spec.values.size() != 1) {
      throw ConfigError("support: --eps must be a single width or rule:1/n");
    }
    options.rule = EpsilonRule::fixed(eps_spec.values.front());
  }

  ResultTable table;
  append_coord_columns(table, d);
  table.columns.insert(table.columns.end(),
                       {"n", "epsilon", "log_lambda_tilde_inv", "decay_slope", "verdict"});

  for (const auto& point : points) {
    const SupportReport report = classify_support(*ctx.provider, point, options);
    for (std::size_t i = 0; i < report.degrees_used.size(); ++i) {
      std::vector<std::string> row;
      for (int k = 0; k < d; ++k) row.push_back(format_double(point[k]));
      row.push_back(std::to_string(report.degrees_used[i]));
      row.push_back(format_double(options.rule.width_for(report.degrees_used[i])));
      row.push_back(format_double(report.log_lambda_tilde_inv[i]));
      row.push_back(format_double(report.decay_slope));
      row.push_back(to_string(report.verdict));
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

ResultTable run_sweep(const SweepConfig& config) {
  const EvalContext ctx = EvalContext::make(config.measure, config.rescale);
  const int d = ctx.provider->dim();
  const auto points = resolve_points(config.points, "", d);
  const auto degrees = parse_degrees(config.degrees);

  EpsilonRule rule = EpsilonRule::one_over_n(config.r);
  if (!config.eps_rule.empty()) {
    if (config.eps_rule == "1/n^r") {
      // literal form: the exponent comes from --r
      rule = EpsilonRule::one_over_n(config.r);
    } else {
      const EpsSpec spec = parse_eps_spec("rule:" + config.eps_rule);
      if (!spec.rule_r) throw ConfigError("sweep: --eps-rule must look like 1/n or 1/n^r");
      rule = EpsilonRule::one_over_n(*spec.rule_r);
    }
  } else if (!config.eps.empty()) {
    rule = EpsilonRule::fixed(parse_double_or_throw(config.eps, "eps"));
  }

  ResultTable table;
  append_coord_columns(table, d);
  table.columns.insert(table.columns.end(),
                       {"n", "epsilon", "epsd_lambda_tilde_inv", "density_estimate",
                        "nd_lambda_tilde"});

  for (const auto& point : points) {
    const Eigen::VectorXd internal_point = ctx.to_internal(point);
    for (int n : degrees) {
      const double eps = rule.width_for(n);
      if (!(eps > 0.0)) throw ConfigError("sweep: eps(n) must be > 0");
      const ChristoffelModel model = build_with_warning(*ctx.provider, n);
      const double lam_inv =
          lambda_tilde_inv(model, BoxQuery(internal_point, eps / ctx.scale));
      const double tau = std::pow(eps, d);
      const double lam = 1.0 / lam_inv;

      std::vector<std::string> row;
      for (int k = 0; k < d; ++k) row.push_back(format_double(point[k]));
      row.push_back(std::to_string(n));
      row.push_back(format_double(eps));
      row.push_back(format_double(tau * lam_inv));
      row.push_back(format_double(lam / tau));
      row.push_back(format_double(std::pow(static_cast<double>(n), d) * lam));
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

void run_gen_samples(const GenSamplesConfig& config) {
  if (config.count < 1) throw ConfigError("gen-samples: --m must be >= 1");
  const MomentProviderPtr provider = load_measure(config.measure);
  std::mt19937_64 rng(config.seed);
  Eigen::MatrixXd points(config.count, provider->dim());
  for (long long j = 0; j < config.count; ++j) {
    points.row(j) = provider->sample(rng).transpose();
  }
  const SampleCloud cloud(std::move(points));
  if (config.out.empty() || config.out == "-") {
    write_samples_csv(cloud, std::cout);
  } else {
    write_samples_csv_file(cloud, config.out);
  }
}

// ---------------------------------------------------------------------------
// Self-check: the oracle agreement suite.

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Dyadic rational in [lo, hi] with denominator 2^10; exactly
// representable in double, so the exact oracle sees the same number.
double dyadic(std::mt19937_64& rng, double lo, double hi) {
  const double t = static_cast<double>(rng() % 1025) / 1024.0;
  return lo + (hi - lo) * t;
}

oracle::Rational to_rational(double v) {
  // v is dyadic with denominator <= 2^20 by construction above.
  const long long scaled = std::llround(v * 1048576.0);
  return oracle::Rational(scaled, 1048576);
}

bool check_box_average_agreement(std::ostream& out) {
  std::mt19937_64 rng(7101);  // fixed seed: reproducible suite
  int failures = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 3);
    std::vector<int> exps(static_cast<std::size_t>(d), 0);
    int budget = 8;
    for (auto& e : exps) {
      e = static_cast<int>(rng() % static_cast<unsigned>(budget + 1));
      budget -= e;
    }
    Eigen::VectorXd center(d);
    std::vector<oracle::Rational> center_q;
    for (int i = 0; i < d; ++i) {
      center[i] = dyadic(rng, -1.0, 1.0);
      center_q.push_back(to_rational(center[i]));
    }
    const double eps = dyadic(rng, 1.0 / 1024.0, 1.0);
    const MultiIndex beta(exps);
    const double fast = box_avg_monomial(beta, BoxQuery(center, eps));
    const double exact =
        static_cast<double>(oracle::symbolic_box_average(beta, center_q, to_rational(eps)));
    if (std::abs(fast - exact) > 1e-12 * std::max(1.0, std::abs(exact))) ++failures;
  }
  out << (failures == 0 ? "PASS" : "FAIL")
      << " box-average fast path vs exact rational oracle (200 cases)\n";
  return failures == 0;
}

bool check_qp_agreement(std::ostream& out) {
  std::mt19937_64 rng(7102);
  int failures = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 2);
    const int n = 1 + static_cast<int>(rng() % 3);
    std::vector<MomentProviderPtr> factors;
    for (int i = 0; i < d; ++i) {
      if (rng() % 2 == 0) {
        const double a = dyadic(rng, -2.0, 0.0);
        const double b = a + 0.5 + uniform01(rng);
        Eigen::VectorXd lo(1), hi(1);
        lo[0] = a;
        hi[0] = b;
        factors.push_back(std::make_shared<LebesgueBoxProvider>(AxisBox(lo, hi)));
      } else {
        factors.push_back(std::make_shared<Chebyshev1dProvider>());
      }
    }
    const MomentProviderPtr provider =
        factors.size() == 1 ? factors.front()
                            : std::make_shared<ProductProvider>(factors);
    const ChristoffelModel model = build_model(*provider, n);

    Eigen::VectorXd xi(d);
    for (int i = 0; i < d; ++i) xi[i] = dyadic(rng, -1.0, 1.0);
    const double eps = uniform01(rng);
    const BoxQuery q(xi, eps);

    const oracle::QPInstance instance{model.moment_values(),
                                      box_avg_vector(model.index_set(), q)};
    const double via_matrix = 1.0 / lambda_tilde_inv(model, q);
    const double via_qp = oracle::solve_min_quadratic(instance).value;
    if (std::abs(via_matrix - via_qp) > 1e-8 * std::max(std::abs(via_qp), 1e-30)) {
      ++failures;
    }
  }
  out << (failures == 0 ? "PASS" : "FAIL")
      << " matrix formula vs KKT quadratic-program oracle (60 cases)\n";
  return failures == 0;
}

bool check_quadrature_agreement(std::ostream& out) {
  int failures = 0;

  const Chebyshev1dProvider cheb;
  for (int k = 0; k <= 12; ++k) {
    const double closed = cheb.moment(MultiIndex({k}));
    // 1/sqrt(1-x^2) written against the distance s to the nearer
    // endpoint: (1-x)(1+x) = s(2-s) on either side.
    const double quad = oracle::quadrature_moment(
        [](const Eigen::VectorXd&, const Eigen::VectorXd& s) {
          return 1.0 / std::sqrt(s[0] * (2.0 - s[0]));
        },
        cheb.bounding_box(), MultiIndex({k}), 1e-12);
    if (std::abs(closed - quad) > 1e-10 * std::max(1.0, std::abs(closed))) ++failures;
  }

  Eigen::VectorXd lo(1), hi(1);
  lo[0] = -0.5;
  hi[0] = 1.5;
  const LebesgueBoxProvider box(AxisBox(lo, hi), 2.5);
  for (int k = 0; k <= 12; ++k) {
    const double closed = box.moment(MultiIndex({k}));
    const double quad = oracle::quadrature_moment(
        [&](const Eigen::VectorXd&) { return box.density_value(); },
        box.bounding_box(), MultiIndex({k}), 1e-11);
    if (std::abs(closed - quad) > 1e-9 * std::max(1.0, std::abs(closed))) ++failures;
  }

  out << (failures == 0 ? "PASS" : "FAIL")
      << " closed-form moments vs adaptive quadrature (|alpha| <= 12)\n";
  return failures == 0;
}

}  // namespace

int run_selfcheck(std::ostream& out) {
  int failures = 0;
  if (!check_box_average_agreement(out)) ++failures;
  if (!check_qp_agreement(out)) ++failures;
  if (!check_quadrature_agreement(out)) ++failures;
  out << (failures == 0 ? "selfcheck: all agreement suites passed\n"
                        : "selfcheck: FAILURES detected\n");
  return failures;
}

}  // namespace christoffel::cli
