// Command-line front end: evaluate Christoffel functions and their
// box-regularized variant over points and grids, run support-inference
// sweeps, generate seeded sample clouds, and run the oracle self-check.
//
// Exit codes: 0 ok, 2 config error, 3 numerical failure.

#include <CLI11.hpp>
#include <iostream>

#include "christoffel/cli.hpp"
#include "christoffel/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace christoffel;

  CLI::App app{"Christoffel function and box-regularized Christoffel function toolkit"};
  app.require_subcommand(1);

  cli::EvalConfig eval_cfg;
  std::string eval_mode = "lambda";
  std::string eval_out;
  std::string eval_format = "csv";
  auto* eval = app.add_subcommand("eval", "Evaluate lambda / lambda-tilde / density over points");
  eval->add_option("--measure", eval_cfg.measure,
                   "Measure: inline JSON, .json config, or CSV sample file")->required();
  eval->add_option("--n", eval_cfg.degree, "Polynomial degree")->required();
  eval->add_option("--point", eval_cfg.points, "Query point x1,..,xd (repeatable)");
  eval->add_option("--grid", eval_cfg.grid, "Grid spec min:max:count per axis, ';'-separated");
  eval->add_option("--eps", eval_cfg.eps, "Box width: value, list, or rule:1/n^r");
  eval->add_option("--mode", eval_mode, "lambda | lambda-tilde | density");
  eval->add_option("--boundary-box", eval_cfg.boundary_box,
                   "Domain bounds a1,b1,a2,b2,.. for boundary-corrected density");
  eval->add_option("--out", eval_out, "Output path (default stdout)");
  eval->add_option("--format", eval_format, "csv | jsonl");
  eval->add_flag("--rescale", eval_cfg.rescale,
                 "Transport the measure onto [-1,1]^d before building (better conditioning)");

  cli::SupportCliConfig support_cfg;
  std::string support_out;
  std::string support_format = "csv";
  auto* support = app.add_subcommand("support", "Classify points as inside/outside the support");
  support->add_option("--measure", support_cfg.measure, "Measure spec")->required();
  support->add_option("--point", support_cfg.points, "Query point (repeatable)")->required();
  support->add_option("--eps", support_cfg.eps, "Box width value or rule:1/n");
  support->add_option("--degrees", support_cfg.degrees, "Comma-separated degree sweep (>= 4)");
  support->add_option("--slope-hi", support_cfg.slope_hi, "Outside threshold (nats per degree)");
  support->add_option("--slope-lo", support_cfg.slope_lo, "Inside threshold (nats per degree)");
  support->add_option("--out", support_out, "Output path (default stdout)");
  support->add_option("--format", support_format, "csv | jsonl");

  cli::SweepConfig sweep_cfg;
  std::string sweep_out;
  std::string sweep_format = "csv";
  auto* sweep = app.add_subcommand("sweep", "Convergence sweep over degrees");
  sweep->add_option("--measure", sweep_cfg.measure, "Measure spec")->required();
  sweep->add_option("--point", sweep_cfg.points, "Query point (repeatable)")->required();
  sweep->add_option("--eps", sweep_cfg.eps, "Fixed box width");
  sweep->add_option("--eps-rule", sweep_cfg.eps_rule, "Width rule, 1/n or 1/n^r");
  sweep->add_option("--r", sweep_cfg.r, "Exponent for --eps-rule 1/n^r");
  sweep->add_option("--degrees", sweep_cfg.degrees, "Comma-separated degrees");
  sweep->add_option("--out", sweep_out, "Output path (default stdout)");
  sweep->add_option("--format", sweep_format, "csv | jsonl");
  sweep->add_flag("--rescale", sweep_cfg.rescale, "Transport onto [-1,1]^d first");

  cli::GenSamplesConfig gen_cfg;
  auto* gen = app.add_subcommand("gen-samples", "Draw seeded samples from an analytic measure");
  gen->add_option("--measure", gen_cfg.measure, "Analytic measure JSON")->required();
  gen->add_option("--m", gen_cfg.count, "Number of samples")->required();
  gen->add_option("--seed", gen_cfg.seed, "RNG seed (default 42)");
  gen->add_option("--out", gen_cfg.out, "Output CSV path (default stdout)");

  auto* selfcheck = app.add_subcommand("selfcheck", "Run the oracle agreement suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (eval->parsed()) {
      eval_cfg.mode = cli::parse_eval_mode(eval_mode);
      cli::write_table_file(cli::run_eval(eval_cfg), eval_out, eval_format);
    } else if (support->parsed()) {
      cli::write_table_file(cli::run_support(support_cfg), support_out, support_format);
    } else if (sweep->parsed()) {
      cli::write_table_file(cli::run_sweep(sweep_cfg), sweep_out, sweep_format);
    } else if (gen->parsed()) {
      cli::run_gen_samples(gen_cfg);
    } else if (selfcheck->parsed()) {
      if (cli::run_selfcheck(std::cout) != 0) return kExitNumerical;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NotPositiveDefinite& e) {
    std::cerr << "numerical failure: " << e.what()
              << " (increase samples or reduce n)\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
