#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "stein_wilks/moments.hpp"

using namespace stein_wilks;

namespace {

// E (X - theta)^k for X ~ Gamma(n, theta/n) by quadrature of the density.
double gamma_quadrature(long long n, double theta, int k) {
  const boost::math::gamma_distribution<double> g(static_cast<double>(n), theta / static_cast<double>(n));
  auto f = [&](double x) { return std::pow(x - theta, k) * boost::math::pdf(g, x); };
  using boost::math::quadrature::gauss_kronrod;
  const double hi = theta * 200.0;
  return gauss_kronrod<double, 61>::integrate(f, 0.0, theta, 15, 1e-14) +
         gauss_kronrod<double, 61>::integrate(f, theta, hi, 15, 1e-14);
}

double double_factorial(int k) {
  double p = 1.0;
  for (int i = k; i > 1; i -= 2) p *= i;
  return p;
}

}  // namespace

TEST_CASE("gamma mean central moments match density quadrature") {
  for (long long n : {1LL, 3LL, 10LL, 50LL}) {
    for (int k : {2, 4, 6, 8}) {
      const double exact = gamma_quadrature(n, 3.0, k);
      CHECK(gamma_mean_central_moment(n, 3.0, k) == doctest::Approx(exact).epsilon(1e-9));
    }
  }
  CHECK(gamma_mean_central_moment(7, 2.0, 2) == doctest::Approx(4.0 / 7.0));
  CHECK(gamma_mean_central_moment(7, 2.0, 4) ==
        doctest::Approx(3.0 * 16.0 / 49.0 + 6.0 * 16.0 / 343.0));
}

TEST_CASE("chi-square central moments") {
  for (long long nu : {1LL, 4LL, 9LL}) {
    const double v = static_cast<double>(nu);
    CHECK(chisq_central_moment(nu, 2, v) == doctest::Approx(2.0 * v));
    CHECK(chisq_central_moment(nu, 4, v) == doctest::Approx(12.0 * v * v + 48.0 * v));
    // Shifted second moment: variance plus squared bias.
    CHECK(chisq_central_moment(nu, 2, v + 1.0) == doctest::Approx(2.0 * v + 1.0));
  }
  // chi^2_10 = 10 Xbar with Xbar the mean of 5 unit exponentials.
  CHECK(chisq_central_moment(10, 6, 10.0) == doctest::Approx(1e6 * gamma_mean_central_moment(5, 1.0, 6)));
}

TEST_CASE("half-normal and normal moments") {
  const double c = std::sqrt(2.0 / std::numbers::pi);
  const double expected[6] = {c, 1.0, 2.0 * c, 3.0, 8.0 * c, 15.0};
  for (int k = 1; k <= 6; ++k) CHECK(halfnormal_abs_moment(k) == doctest::Approx(expected[k - 1]));
  CHECK_THROWS_AS(halfnormal_abs_moment(7), UnsupportedOrder);
  for (int k = 0; k <= 8; ++k) {
    const double want = k % 2 ? 0.0 : std::pow(2.0, k / 2.0) * double_factorial(k - 1);
    CHECK(normal_central_moment(2.0, k) == doctest::Approx(want));
  }
}

TEST_CASE("central moments from cumulants: Poisson") {
  const double lambda = 2.5;
  std::vector<double> kappa(7, lambda);
  const auto mu = central_moments_from_cumulants(kappa, 6);
  CHECK(mu[2] == doctest::Approx(lambda));
  CHECK(mu[3] == doctest::Approx(lambda));
  CHECK(mu[4] == doctest::Approx(lambda + 3.0 * lambda * lambda));
  CHECK(mu[5] == doctest::Approx(lambda + 10.0 * lambda * lambda));
}

TEST_CASE("unsupported orders and bad arguments") {
  CHECK_THROWS_AS(gamma_mean_central_moment(5, 1.0, 3), UnsupportedOrder);
  CHECK_THROWS_AS(chisq_central_moment(5, 10, 5.0), UnsupportedOrder);
  CHECK_THROWS_AS(gamma_mean_central_moment(0, 1.0, 2), ConfigError);
}

TEST_CASE("moment table access") {
  MomentTable t("t", 3, 2);
  CHECK_FALSE(t.has(std::array<std::size_t, 2>{0, 1}));
  CHECK_THROWS_AS(t(0, 1), MissingMoment);
  CHECK_THROWS_AS(t(3, 0), MissingMoment);
  t.set(std::array<std::size_t, 2>{0, 1}, MomentValue::bound(2.0));
  CHECK(t.value(0, 1) == 2.0);
  CHECK(t(0, 1).upper_bound);
  t.fill([](std::span<const std::size_t> i) { return MomentValue::exact(10.0 * i[0] + i[1]); });
  std::vector<double> seen;
  t.for_each([&](std::span<const std::size_t>, const MomentValue& v) { seen.push_back(v.value); });
  REQUIRE(seen.size() == 9);
  CHECK(seen[1] == 1.0);
  CHECK(seen[3] == 10.0);
  CHECK_FALSE(t.any_monte_carlo());
}
