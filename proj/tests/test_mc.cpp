#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "stein_wilks/kernels.hpp"
#include "stein_wilks/mc.hpp"
#include "stein_wilks/models.hpp"
#include "stein_wilks/stats.hpp"

using namespace stein_wilks;

namespace {

TestFunction lambda(std::function<double(double)> f) {
  TestFunction h;
  h.name = "test";
  h.h = std::move(f);
  h.h1 = [](double) { return 0.0; };
  h.h2 = [](double) { return 0.0; };
  return h;
}

// E h(-2 log Lambda) for the exponential model: the statistic is
// 2n(u - 1 - log u) with u = Xbar/theta0 ~ Gamma(n, 1/n).
double exact_exponential_expectation(std::size_t n, const TestFunction& h) {
  const double nn = static_cast<double>(n);
  const boost::math::gamma_distribution<double> g(nn, 1.0 / nn);
  auto f = [&](double u) { return h.h(2.0 * nn * (u - 1.0 - std::log(u))) * boost::math::pdf(g, u); };
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 20, 1e-14) +
         gauss_kronrod<double, 61>::integrate(f, 1.0, 30.0, 20, 1e-14);
}

}  // namespace

TEST_CASE("chi-square expectations: trivial and polynomial cases") {
  CHECK(chisq_expectation(lambda([](double) { return 1.0; }), 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(chisq_expectation(lambda([](double x) { return x; }), 3) == doctest::Approx(3.0).epsilon(1e-12));
  for (int r : {1, 2, 3, 5, 8}) {
    const double rr = r;
    CHECK(std::abs(chisq_expectation(lambda([](double x) { return x * x; }), r) - rr * (rr + 2)) < 1e-10);
    CHECK(std::abs(chisq_expectation(lambda([](double x) { return x * x * x; }), r) -
                   rr * (rr + 2) * (rr + 4)) < 1e-10 * rr * (rr + 2) * (rr + 4));
    CHECK(std::abs(chisq_expectation(lambda([](double x) { return x * x * x * x; }), r) -
                   rr * (rr + 2) * (rr + 4) * (rr + 6)) < 1e-10 * rr * (rr + 2) * (rr + 4) * (rr + 6));
  }
  CHECK_THROWS_AS(chisq_expectation(TestFunction::ht(), 0), ConfigError);
  CHECK_THROWS_AS(chisq_expectation(lambda([](double x) { return std::exp(0.6 * x); }), 2),
                  QuadratureNonconvergence);
}

TEST_CASE("chi-square expectation of h_t matches 1e7 draws") {
  const TestFunction h = TestFunction::ht();
  const double q = chisq_expectation(h, 1);
  CHECK(q == doctest::Approx(0.3729517050441891).epsilon(1e-12));
  std::mt19937_64 rng(123);
  std::normal_distribution<double> z;
  RunningStats s;
  for (int i = 0; i < 10000000; ++i) {
    const double k = z(rng);
    s.add(h.h(k * k));
  }
  CHECK(std::abs(s.mean() - q) < 5 * s.stderr_of_mean());
}

TEST_CASE("distance estimate against the exact exponential LRT law") {
  const ExponentialModel m;
  const Vector t0 = Vector::Constant(1, 3.0);
  const TestFunction h = TestFunction::ht();
  for (std::size_t n : {5UL, 50UL}) {
    const MCEstimate e = estimate_distance(m, t0, n, 1, h, 200000, 42);
    const double exact = exact_exponential_expectation(n, h);
    CHECK(std::abs(e.mc_expectation - exact) < 5 * e.stderr_);
    CHECK(e.failed_reps == 0);
    CHECK(e.reps == 200000);
  }
  CHECK(std::abs(exact_exponential_expectation(5, h) - chisq_expectation(h, 1)) ==
        doctest::Approx(3.2e-3).epsilon(0.05));
}

TEST_CASE("constant h gives a zero distance with zero error") {
  const MCEstimate e = estimate_distance(ExponentialModel(), Vector::Constant(1, 3.0), 20, 1,
                                         TestFunction::constant(0.7), 10000, 1);
  CHECK(e.mean < 1e-12);
  CHECK(e.stderr_ == 0.0);
  CHECK_THROWS_AS(estimate_distance(ExponentialModel(), Vector::Constant(1, 3.0), 20, 1,
                                    TestFunction::ht(), 9999, 1),
                  ConfigError);
}

TEST_CASE("fit failures above 0.1 percent are rejected") {
  std::vector<double> stats(10000, 1.0);
  for (int i = 0; i < 10; ++i) stats[i] = std::numeric_limits<double>::quiet_NaN();
  CHECK(distance_from_statistics(stats, TestFunction::ht(), 1, 0).failed_reps == 10);
  stats[10] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(distance_from_statistics(stats, TestFunction::ht(), 1, 0), ExcessiveFitFailures);
}

TEST_CASE("Kolmogorov-Smirnov distance") {
  std::mt19937_64 rng(77);
  std::chi_squared_distribution<double> chi(1.0);
  std::vector<double> draws(40000);
  for (double& x : draws) x = chi(rng);
  CHECK(ks_distance_chisq(draws, 1) <= 1.63 / std::sqrt(40000.0));
  CHECK(ks_distance_chisq(std::vector<double>{0.0, 0.0}, 1) == doctest::Approx(1.0));
  const ExponentialModel m;
  const Vector t0 = Vector::Constant(1, 3.0);
  CHECK(wilks_ks_check(m, t0, 5, 1, 20000, 4) > wilks_ks_check(m, t0, 2000, 1, 20000, 4));
}

TEST_CASE("parallel kernels reproduce the serial reference bit for bit") {
  struct Case {
    std::unique_ptr<ParametricModel> model;
    Vector theta0;
    int r;
    std::size_t n;
  };
  Vector nt(2);
  nt << 0.0, 1.0;
  Case cases[] = {{std::make_unique<ExponentialModel>(), Vector::Constant(1, 3.0), 1, 30},
                  {std::make_unique<NormalModel>(), nt, 1, 30},
                  {std::make_unique<LogisticModel>(2, CovariateLaw::normal), Vector::Constant(2, 0.2), 1, 200}};
  for (const Case& c : cases) {
    const SimulationResult serial = simulate_statistics_serial(*c.model, c.theta0, c.n, c.r, 3000, 9);
    for (int threads : {1, 2, 3}) {
      const SimulationResult par = simulate_statistics(*c.model, c.theta0, c.n, c.r, 3000, 9, threads);
      CHECK(par.failed == serial.failed);
      CHECK(par.statistics == serial.statistics);
    }
  }
}

TEST_CASE("rate sweep") {
  const std::vector<std::size_t> grid = {10, 100, 1000, 10000, 100000};
  CHECK(rate_sweep([](std::size_t) { return 2.0; }, grid).slope == doctest::Approx(0.0));
  CHECK(rate_sweep([](std::size_t n) { return 1.0 / std::sqrt(double(n)); }, grid).slope ==
        doctest::Approx(-0.5));
  const std::vector<std::size_t> short_grid = {10, 100, 1000};
  CHECK_THROWS_AS(rate_sweep([](std::size_t) { return 1.0; }, short_grid), ConfigError);
  const std::vector<std::size_t> narrow = {10, 20, 50, 100, 200};
  CHECK_THROWS_AS(rate_sweep([](std::size_t) { return 1.0; }, narrow), ConfigError);
  const std::vector<std::size_t> big = {10000, 100000, 1000000, 10000000, 100000000, 1000000000, 10000000000};
  const RateSweep s = rate_sweep(ExponentialModel(), Vector::Constant(1, 3.0), 1, TestFunction::ht(), big);
  CHECK(s.slope >= -0.55);
  CHECK(s.slope <= -0.45);
}

TEST_CASE("dimension sweep") {
  DimensionSweepOptions o;
  o.simulate = false;
  o.n = 2000;
  const std::vector<int> grid = {1, 2, 4, 8};
  const auto rows = dimension_sweep(grid, TestFunction::ht(), o);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) CHECK(rows[i + 1].bound_total / rows[i].bound_total <= 128 * 1.1);
  // Linear growth of d with n leaves the regime.
  const std::vector<int> wide = {200};
  CHECK(dimension_sweep(wide, TestFunction::ht(), o).front().bound_total > 1.0);

  o.simulate = true;
  o.n = 300;
  o.reps = 10000;
  const std::vector<int> small = {1, 2};
  const auto sim = dimension_sweep(small, TestFunction::ht(), o);
  for (const SweepRow& r : sim) {
    REQUIRE(r.mc);
    CHECK(std::isfinite(r.mc->mean));
    CHECK(r.ks);
    CHECK(*r.ks < 0.05);
  }
}

TEST_CASE("sweep csv layout") {
  SweepRow a;
  a.key = 10;
  a.bound_total = 0.5;
  SweepRow b = a;
  b.chisq_ref = 0.25;
  b.ks = 0.125;
  std::ostringstream os;
  const std::vector<SweepRow> rows = {a, b};
  write_sweep_csv(os, rows);
  CHECK(os.str() == "key,bound_total,mc_mean,mc_stderr,chisq_ref,ks\n10,0.5,,,,\n10,0.5,,,0.25,0.125\n");
}
