#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "christoffel/errors.hpp"
#include "christoffel/measures.hpp"
#include "christoffel/oracle.hpp"
#include "christoffel/sample_io.hpp"
#include "test_support.hpp"

using namespace christoffel;

namespace {

constexpr double kPi = std::numbers::pi;

AxisBox box1d(double a, double b) {
  Eigen::VectorXd lo(1), hi(1);
  lo[0] = a;
  hi[0] = b;
  return AxisBox(lo, hi);
}

}  // namespace

TEST_CASE("chebyshev moments: closed form against quadrature oracle") {
  const Chebyshev1dProvider cheb;
  CHECK(cheb.moment(MultiIndex({0})) == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(cheb.moment(MultiIndex({2})) == doctest::Approx(kPi / 2.0).epsilon(1e-14));
  CHECK(cheb.moment(MultiIndex({4})) == doctest::Approx(3.0 * kPi / 8.0).epsilon(1e-14));
  for (int k = 1; k <= 13; k += 2) CHECK(cheb.moment(MultiIndex({k})) == 0.0);
  CHECK(cheb.total_mass() == doctest::Approx(kPi).epsilon(1e-14));

  for (int k = 0; k <= 12; ++k) {
    const double quad = oracle::quadrature_moment(
        [](const Eigen::VectorXd&, const Eigen::VectorXd& s) {
          return 1.0 / std::sqrt(s[0] * (2.0 - s[0]));
        },
        cheb.bounding_box(), MultiIndex({k}), 1e-12);
    CHECK(cheb.moment(MultiIndex({k})) ==
          doctest::Approx(quad).epsilon(1e-10));
  }
}

TEST_CASE("lebesgue box moments, mass handling") {
  const LebesgueBoxProvider unit(box1d(0.0, 1.0));
  for (int k = 0; k <= 8; ++k) {
    CHECK(unit.moment(MultiIndex({k})) ==
          doctest::Approx(1.0 / (k + 1)).epsilon(1e-14));
  }
  CHECK(unit.total_mass() == doctest::Approx(1.0));

  const LebesgueBoxProvider two(box1d(-1.0, 1.0));
  CHECK(two.total_mass() == doctest::Approx(2.0));

  const LebesgueBoxProvider prob(box1d(-1.0, 1.0), 1.0);
  CHECK(prob.total_mass() == doctest::Approx(1.0));
  CHECK(prob.density_value() == doctest::Approx(0.5));
  CHECK(prob.moment(MultiIndex({2})) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  CHECK_THROWS_AS(LebesgueBoxProvider(box1d(0.0, 1.0), -1.0), std::invalid_argument);
  CHECK_THROWS_AS(AxisBox(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)),
                  std::invalid_argument);
}

TEST_CASE("empirical moments") {
  Eigen::MatrixXd pts(1, 1);
  pts(0, 0) = 2.0;
  const EmpiricalProvider single((SampleCloud(pts)));
  CHECK(single.moment(MultiIndex({3})) == doctest::Approx(8.0));
  CHECK(single.total_mass() == doctest::Approx(1.0));

  Eigen::MatrixXd two(2, 1);
  two << 1.0, 3.0;
  const EmpiricalProvider weighted(SampleCloud(two, {0.25, 0.75}));
  CHECK(weighted.moment(MultiIndex({1})) == doctest::Approx(0.25 + 2.25));
}

TEST_CASE("sample cloud validation") {
  Eigen::MatrixXd pts(2, 1);
  pts << 0.0, 1.0;
  CHECK_THROWS_AS(SampleCloud(pts, {0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(SampleCloud(pts, {-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(SampleCloud(pts, {0.5}), DimensionMismatch);
  pts(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(SampleCloud{pts}, std::invalid_argument);
}

TEST_CASE("moment matrix: documented instances") {
  {
    const Chebyshev1dProvider cheb;
    const MomentMatrix m = moment_matrix(cheb, IndexSet::enumerate(1, 1));
    CHECK(m.values(0, 0) == doctest::Approx(kPi));
    CHECK(m.values(0, 1) == 0.0);
    CHECK(m.values(1, 0) == 0.0);
    CHECK(m.values(1, 1) == doctest::Approx(kPi / 2.0));
  }
  {
    const LebesgueBoxProvider unit(box1d(0.0, 1.0));
    const MomentMatrix m = moment_matrix(unit, IndexSet::enumerate(1, 1));
    CHECK(m.values(0, 0) == doctest::Approx(1.0));
    CHECK(m.values(0, 1) == doctest::Approx(0.5));
    CHECK(m.values(1, 1) == doctest::Approx(1.0 / 3.0));
  }
}

TEST_CASE("moment matrix: Hankel entries are bit-identical") {
  std::mt19937_64 rng(77);
  const auto provider = testsupport::random_analytic_measure(rng, 2);
  const IndexSet set = IndexSet::enumerate(2, 3);
  const MomentMatrix m = moment_matrix(*provider, set);
  for (std::size_t a = 0; a < set.size(); ++a) {
    for (std::size_t b = 0; b < set.size(); ++b) {
      for (std::size_t c = 0; c < set.size(); ++c) {
        for (std::size_t e = 0; e < set.size(); ++e) {
          if ((set[a] + set[b]).exponents == (set[c] + set[e]).exponents) {
            CHECK(m.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) ==
                  m.values(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(e)));
          }
        }
      }
    }
  }
}

TEST_CASE("empirical moment matrix rank is capped by the sample count") {
  std::mt19937_64 rng(80);
  Eigen::MatrixXd pts(2, 1);
  pts << testsupport::uniform(rng, -1.0, 1.0), testsupport::uniform(rng, -1.0, 1.0);
  const EmpiricalProvider provider((SampleCloud(pts)));
  const MomentMatrix m = moment_matrix(provider, IndexSet::enumerate(1, 2));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m.values);
  CHECK(lu.rank() <= 2);  // s(2) = 3 basis functions, only 2 atoms
}

TEST_CASE("empirical moment matrix equals the outer-product assembly") {
  std::mt19937_64 rng(78);
  const int d = 2, n = 3;
  const Eigen::Index m = 100;
  Eigen::MatrixXd pts(m, d);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (int i = 0; i < d; ++i) pts(j, i) = testsupport::uniform(rng, -1.0, 1.0);
  }
  const EmpiricalProvider provider((SampleCloud(pts)));
  const IndexSet set = IndexSet::enumerate(d, n);
  const MomentMatrix viaMoments = moment_matrix(provider, set);

  Eigen::MatrixXd viaOuter = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(set.size()),
                                                   static_cast<Eigen::Index>(set.size()));
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::VectorXd v = monomial_vector(set, pts.row(j).transpose());
    viaOuter += v * v.transpose();
  }
  viaOuter /= static_cast<double>(m);
  CHECK((viaMoments.values - viaOuter).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("pushforward: documented cases") {
  {
    Eigen::MatrixXd pts(1, 1);
    pts(0, 0) = 2.0;
    const EmpiricalProvider base((SampleCloud(pts)));
    Eigen::VectorXd shift(1);
    shift << 2.0;
    const auto moved = base.pushforward(shift, 1.0);
    CHECK(moved->moment(MultiIndex({1})) == doctest::Approx(0.0));
    CHECK(moved->moment(MultiIndex({0})) == doctest::Approx(1.0));
  }
  {
    const LebesgueBoxProvider unit(box1d(0.0, 1.0));
    const auto same = unit.pushforward(Eigen::VectorXd::Zero(1), 1.0);
    for (int k = 0; k <= 6; ++k) {
      CHECK(same->moment(MultiIndex({k})) == doctest::Approx(unit.moment(MultiIndex({k}))));
    }
  }
  {
    const Chebyshev1dProvider cheb;
    const auto halved = cheb.pushforward(Eigen::VectorXd::Zero(1), 2.0);
    CHECK(halved->moment(MultiIndex({2})) == doctest::Approx(kPi / 8.0).epsilon(1e-14));
  }
  const Chebyshev1dProvider cheb;
  CHECK_THROWS_AS(cheb.pushforward(Eigen::VectorXd::Zero(1), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cheb.pushforward(Eigen::VectorXd::Zero(2), 1.0), DimensionMismatch);
}

TEST_CASE("pushforward moments match the quadrature oracle") {
  const Chebyshev1dProvider cheb;
  Eigen::VectorXd shift(1);
  shift << 0.3;
  const double r = 1.7;
  const auto moved = cheb.pushforward(shift, r);
  for (int k = 0; k <= 4; ++k) {
    // int ((x - shift)/r)^k dmu, with the transformed monomial folded
    // into the weight so the whole integrand goes through the oracle
    const double expected = oracle::quadrature_moment(
        [&](const Eigen::VectorXd& x, const Eigen::VectorXd& s) {
          return std::pow((x[0] - shift[0]) / r, k) / std::sqrt(s[0] * (2.0 - s[0]));
        },
        cheb.bounding_box(), MultiIndex({0}), 1e-12);
    CHECK(moved->moment(MultiIndex({k})) == doctest::Approx(expected).epsilon(1e-10));
  }

  // composition of two pushforwards collapses to one affine map
  Eigen::VectorXd shift2(1);
  shift2 << -0.4;
  const auto twice = moved->pushforward(shift2, 0.5);
  for (int k = 0; k <= 4; ++k) {
    const double direct = oracle::quadrature_moment(
        [&](const Eigen::VectorXd& x, const Eigen::VectorXd& s) {
          const double y = (x[0] - shift[0]) / r;
          return std::pow((y - shift2[0]) / 0.5, k) / std::sqrt(s[0] * (2.0 - s[0]));
        },
        cheb.bounding_box(), MultiIndex({0}), 1e-12);
    CHECK(twice->moment(MultiIndex({k})) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("product measure factorizes and transforms per factor") {
  auto cheb = std::make_shared<Chebyshev1dProvider>();
  auto unit = std::make_shared<LebesgueBoxProvider>(box1d(0.0, 1.0));
  const ProductProvider prod({cheb, unit});
  CHECK(prod.dim() == 2);
  CHECK(prod.moment(MultiIndex({2, 3})) ==
        doctest::Approx((kPi / 2.0) * (1.0 / 4.0)).epsilon(1e-14));

  // full 2-D quadrature across the product structure; s[0] is the
  // distance to the nearer face of the [-1,1] axis
  const double quad = oracle::quadrature_moment(
      [](const Eigen::VectorXd&, const Eigen::VectorXd& s) {
        return 1.0 / std::sqrt(s[0] * (2.0 - s[0]));
      },
      prod.bounding_box(), MultiIndex({2, 3}), 1e-11);
  CHECK(prod.moment(MultiIndex({2, 3})) == doctest::Approx(quad).epsilon(1e-9));
  const AxisBox bb = prod.bounding_box();
  CHECK(bb.lo[0] == -1.0);
  CHECK(bb.hi[1] == 1.0);

  Eigen::VectorXd shift(2);
  shift << 0.1, 0.5;
  const auto moved = prod.pushforward(shift, 2.0);
  CHECK(moved->moment(MultiIndex({2, 0})) ==
        doctest::Approx(cheb->pushforward(shift.head(1), 2.0)->moment(MultiIndex({2}))));
}

TEST_CASE("moment cache is safe for concurrent readers") {
  std::mt19937_64 rng(79);
  const auto provider = testsupport::random_analytic_measure(rng, 2);
  const IndexSet set = IndexSet::enumerate(2, 4);
  std::vector<std::vector<double>> results(4);
  std::vector<std::thread> threads;
  for (auto& out : results) {
    threads.emplace_back([&provider, &set, &out] {
      for (const auto& alpha : set.entries()) out.push_back(provider->moment(alpha));
    });
  }
  for (auto& t : threads) t.join();
  for (std::size_t i = 1; i < results.size(); ++i) CHECK(results[i] == results[0]);
}

TEST_CASE("samples CSV: round trip, headers, weight column") {
  Eigen::MatrixXd pts(3, 2);
  pts << 0.25, -1.0, 0.5, 2.0, 0.125, 0.0009765625;
  const SampleCloud cloud(pts, {0.5, 0.25, 0.25});
  std::stringstream io;
  write_samples_csv(cloud, io);
  const SampleCloud back = read_samples_csv(io);
  CHECK(back.points == cloud.points);
  CHECK(back.weights == cloud.weights);

  std::stringstream noheader("1.0,2.0\n3.0,4.0\n");
  const SampleCloud plain = read_samples_csv(noheader);
  CHECK(plain.count() == 2);
  CHECK(plain.dim() == 2);
  CHECK(plain.weights.empty());

  std::stringstream headered("a,b\n1.0,2.0\n");
  CHECK(read_samples_csv(headered).dim() == 2);
}

TEST_CASE("samples CSV: malformed input is rejected") {
  std::stringstream nan_row("x1\nnan\n");
  CHECK_THROWS_AS(read_samples_csv(nan_row), ConfigError);
  std::stringstream inf_row("x1\n1.0\ninf\n");
  CHECK_THROWS_AS(read_samples_csv(inf_row), ConfigError);
  std::stringstream ragged("x1,x2\n1.0\n");
  CHECK_THROWS_AS(read_samples_csv(ragged), ConfigError);
  std::stringstream empty("");
  CHECK_THROWS_AS(read_samples_csv(empty), ConfigError);
  std::stringstream header_only("x1,x2\n");
  CHECK_THROWS_AS(read_samples_csv(header_only), ConfigError);
  std::stringstream junk("x1\n1.0\n0.5abc\n");
  CHECK_THROWS_AS(read_samples_csv(junk), ConfigError);
  std::stringstream bad_weights("x1,weight\n1.0,0.6\n2.0,0.6\n");
  CHECK_THROWS_AS(read_samples_csv(bad_weights), ConfigError);
}

TEST_CASE("measure config JSON") {
  const auto cheb = parse_measure_config(R"({"kind":"chebyshev-1d"})");
  CHECK(cheb->kind() == "chebyshev-1d");
  CHECK(cheb->dim() == 1);

  const auto box = parse_measure_config(
      R"({"kind":"lebesgue-box","params":{"bounds":[[0,1],[0,1]],"mass":1.0}})");
  CHECK(box->dim() == 2);
  CHECK(box->total_mass() == doctest::Approx(1.0));

  const auto prod = parse_measure_config(
      R"({"kind":"product","params":{"factors":[{"kind":"chebyshev-1d"},)"
      R"({"kind":"lebesgue-box","params":{"bounds":[[-1,1]]}}]}})");
  CHECK(prod->dim() == 2);
  CHECK(prod->total_mass() == doctest::Approx(2.0 * kPi).epsilon(1e-12));

  CHECK_THROWS_AS(parse_measure_config(R"({"kind":"simplex"})"), ConfigError);
  CHECK_THROWS_AS(parse_measure_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_measure_config(R"({"kind":"lebesgue-box"})"), ConfigError);
  CHECK_THROWS_AS(
      parse_measure_config(R"({"kind":"lebesgue-box","params":{"bounds":[[1,0]]}})"),
      ConfigError);
}

TEST_CASE("load_measure: empirical CSV path") {
  const std::string path = "test_measures_cloud.csv";
  {
    std::ofstream out(path);
    out << "x1,x2\n0.1,0.2\n0.3,0.4\n0.5,0.6\n";
  }
  const auto provider = load_measure(path);
  CHECK(provider->kind() == "empirical");
  CHECK(provider->dim() == 2);
  CHECK(provider->total_mass() == doctest::Approx(1.0));
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_measure("does_not_exist.csv"), ConfigError);
}

TEST_CASE("load_measure: json config file") {
  const std::string path = "test_measures_config.json";
  {
    std::ofstream out(path);
    out << R"({"kind":"lebesgue-box","params":{"bounds":[[-1,1]],"mass":1.0}})";
  }
  const auto provider = load_measure(path);
  CHECK(provider->kind() == "lebesgue-box");
  CHECK(provider->total_mass() == doctest::Approx(1.0));
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_measure("does_not_exist.json"), ConfigError);
}
