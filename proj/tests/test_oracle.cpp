#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "christoffel/errors.hpp"
#include "christoffel/oracle.hpp"
#include "christoffel/regularized.hpp"
#include "test_support.hpp"

using namespace christoffel;
using oracle::Rational;

TEST_CASE("solve_min_quadratic: closed-form cases") {
  {
    oracle::QPInstance inst{Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Zero(3)};
    inst.constraint[0] = 1.0;
    const auto sol = oracle::solve_min_quadratic(inst);
    CHECK(sol.value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sol.solution[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sol.solution.tail(2).cwiseAbs().maxCoeff() < 1e-14);
  }
  {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    g(0, 0) = 1.0;
    g(1, 1) = 2.0;
    Eigen::VectorXd c(2);
    c << 1.0, 1.0;
    const auto sol = oracle::solve_min_quadratic({g, c});
    CHECK(sol.value == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(sol.solution[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
    CHECK(sol.solution[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  }
}

TEST_CASE("solve_min_quadratic: error paths") {
  CHECK_THROWS_AS(
      oracle::solve_min_quadratic({Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2)}),
      InfeasibleConstraint);

  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
  Eigen::VectorXd c(2);
  c << 1.0, 0.0;
  CHECK_THROWS_AS(oracle::solve_min_quadratic({indefinite, c}), SingularGram);
}

TEST_CASE("adaptive_integrate: smooth references and budget error") {
  const double cubic = oracle::adaptive_integrate([](double x) { return x * x * x; },
                                                  0.0, 1.0, 1e-12);
  CHECK(cubic == doctest::Approx(0.25).epsilon(1e-11));

  const double wave = oracle::adaptive_integrate([](double x) { return std::cos(x); },
                                                 0.0, 10.0, 1e-12);
  CHECK(wave == doctest::Approx(std::sin(10.0)).epsilon(1e-11));

  CHECK_THROWS_AS(oracle::adaptive_integrate(
                      [](double x) { return 1.0 / std::sqrt(std::abs(x) + 1e-300); },
                      -1.0, 1.0, 1e-13, /*max_panels=*/8),
                  NoConvergence);
}

TEST_CASE("tanh_sinh_integrate: endpoint-singular references") {
  const double mass = oracle::tanh_sinh_integrate(
      [](double, double s) { return 1.0 / std::sqrt(s * (2.0 - s)); }, -1.0, 1.0, 1e-12);
  CHECK(std::abs(mass - std::numbers::pi) < 1e-10);

  const double m1 = oracle::tanh_sinh_integrate(
      [](double x, double s) { return x / std::sqrt(s * (2.0 - s)); }, -1.0, 1.0, 1e-12);
  CHECK(std::abs(m1) < 1e-12);

  const double smooth = oracle::tanh_sinh_integrate(
      [](double x, double) { return std::exp(x); }, 0.0, 1.0, 1e-12);
  CHECK(smooth == doctest::Approx(std::numbers::e - 1.0).epsilon(1e-12));
}

TEST_CASE("quadrature_moment: documented values") {
  Eigen::VectorXd lo(1), hi(1);
  lo[0] = 0.0;
  hi[0] = 1.0;
  const double cube = oracle::quadrature_moment(
      [](const Eigen::VectorXd&) { return 1.0; }, AxisBox(lo, hi), MultiIndex({3}), 1e-12);
  CHECK(cube == doctest::Approx(0.25).epsilon(1e-11));

  lo[0] = -1.0;
  const AxisBox sym(lo, hi);
  const auto cheb_weight = [](const Eigen::VectorXd&, const Eigen::VectorXd& s) {
    return 1.0 / std::sqrt(s[0] * (2.0 - s[0]));
  };
  CHECK(std::abs(oracle::quadrature_moment(cheb_weight, sym, MultiIndex({0}), 1e-12) -
                 std::numbers::pi) < 1e-10);
  CHECK(std::abs(oracle::quadrature_moment(cheb_weight, sym, MultiIndex({1}), 1e-12)) <
        1e-12);
}

TEST_CASE("quadrature_moment: 2-D product box") {
  Eigen::VectorXd lo(2), hi(2);
  lo << 0.0, -1.0;
  hi << 1.0, 1.0;
  const double v = oracle::quadrature_moment([](const Eigen::VectorXd&) { return 0.5; },
                                             AxisBox(lo, hi), MultiIndex({2, 2}), 1e-11);
  // 0.5 * (1/3) * (2/3)
  CHECK(v == doctest::Approx(1.0 / 9.0).epsilon(1e-9));
}

TEST_CASE("symbolic_box_average: exact rational values") {
  CHECK(oracle::symbolic_box_average(MultiIndex({2}), {Rational(0)}, Rational(1)) ==
        Rational(1, 12));
  CHECK(oracle::symbolic_box_average(MultiIndex({1}), {Rational(3, 7)}, Rational(1, 5)) ==
        Rational(3, 7));
  CHECK(oracle::symbolic_box_average(MultiIndex({2, 2}), {Rational(0), Rational(0)},
                                     Rational(1)) == Rational(1, 144));
  CHECK_THROWS_AS(
      oracle::symbolic_box_average(MultiIndex({2}), {Rational(0)}, Rational(0)),
      ZeroWidth);
}

TEST_CASE("symbolic_box_average agrees with the fast path on random queries") {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 3);
    std::vector<int> exps(static_cast<std::size_t>(d), 0);
    int budget = 8;
    for (auto& e : exps) {
      e = static_cast<int>(rng() % static_cast<unsigned>(budget + 1));
      budget -= e;
    }
    Eigen::VectorXd center(d);
    std::vector<Rational> center_q;
    for (int i = 0; i < d; ++i) {
      center[i] = testsupport::dyadic(rng, -1.0, 1.0);
      center_q.emplace_back(std::llround(center[i] * 1048576.0), 1048576);
    }
    const double eps = testsupport::dyadic(rng, 1.0 / 1024.0, 1.0);
    const Rational eps_q(std::llround(eps * 1048576.0), 1048576);

    const MultiIndex beta(exps);
    const double fast = box_avg_monomial(beta, BoxQuery(center, eps));
    const double exact =
        static_cast<double>(oracle::symbolic_box_average(beta, center_q, eps_q));
    CHECK(std::abs(fast - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
  }
}
