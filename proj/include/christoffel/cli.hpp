#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "christoffel/regularized.hpp"

// Command implementations behind the `christoffel` binary. Everything
// here is deterministic: identical configs (and seeds) produce
// byte-identical output files.
namespace christoffel::cli {

// Width specification: a single value, a comma-separated list, or a rule
// "rule:1/n" / "rule:1/n^r".
struct EpsSpec {
  std::vector<double> values;      // ascending; empty when rule is set
  std::optional<double> rule_r;
};
EpsSpec parse_eps_spec(const std::string& text);

Eigen::VectorXd parse_point(const std::string& text);

// Per-axis "min:max:count" specs joined by ';' (e.g. "0:1:3;0:1:3").
// Points enumerate in row-major order (last axis fastest).
std::vector<Eigen::VectorXd> parse_grid(const std::string& text);

std::vector<int> parse_degrees(const std::string& text);

AxisBox parse_axis_box(const std::string& text);  // "a1,b1,a2,b2,..."

// Flat result table; numeric cells are pre-formatted with 17 significant
// digits so CSV output round-trips doubles exactly.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string format_double(double v);
void write_table_csv(const ResultTable& table, std::ostream& out);
void write_table_jsonl(const ResultTable& table, std::ostream& out);
ResultTable read_table_csv(std::istream& in);
void write_table_file(const ResultTable& table, const std::string& path,
                      const std::string& format);

enum class EvalMode { lambda, lambda_tilde, density };
EvalMode parse_eval_mode(const std::string& text);

struct EvalConfig {
  std::string measure;
  int degree = 0;
  std::vector<std::string> points;  // exclusive with grid
  std::string grid;
  std::string eps = "0";
  EvalMode mode = EvalMode::lambda;
  std::string boundary_box;  // optional, density mode only
  bool rescale = false;
};

struct SupportCliConfig {
  std::string measure;
  std::vector<std::string> points;
  std::string eps = "0.1";  // value or rule:1/n
  std::string degrees = "4,6,8,10,12,14,16";
  double slope_hi = 0.25;
  double slope_lo = 0.05;
};

struct SweepConfig {
  std::string measure;
  std::vector<std::string> points;
  std::string eps;       // fixed width, or empty when a rule is used
  std::string eps_rule;  // "1/n^r" text form, or empty
  double r = 1.0;        // exponent used when eps_rule is "1/n^r"
  std::string degrees = "4,6,8,10,12,14,16";
  bool rescale = false;
};

struct GenSamplesConfig {
  std::string measure;
  long long count = 0;
  unsigned long long seed = 42;
  std::string out;
};

ResultTable run_eval(const EvalConfig& config);
ResultTable run_support(const SupportCliConfig& config);
ResultTable run_sweep(const SweepConfig& config);
void run_gen_samples(const GenSamplesConfig& config);

// Oracle agreement suite (box averages, QP duality, quadrature vs closed
// forms). Prints one line per check; returns the number of failures.
int run_selfcheck(std::ostream& out);

}  // namespace christoffel::cli
