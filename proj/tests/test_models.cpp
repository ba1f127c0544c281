#include "doctest.h"

#include <cmath>
#include <memory>
#include <random>

#include "stein_wilks/acceptance.hpp"
#include "stein_wilks/bound.hpp"
#include "stein_wilks/lrt.hpp"
#include "stein_wilks/models.hpp"
#include "stein_wilks/stats.hpp"

using namespace stein_wilks;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// Score, Hessian and third derivatives against central differences.
void check_derivatives(const ParametricModel& m, const Vector& theta, const Dataset& data) {
  const double e = 1e-5;
  const int d = m.dim();
  for (std::size_t i = 0; i < std::min<std::size_t>(data.size(), 5); ++i) {
    const auto x = data.row(i);
    const Vector s = m.score(x, theta);
    const Matrix H = m.hessian(x, theta);
    for (int j = 0; j < d; ++j) {
      Vector up = theta, down = theta;
      up(j) += e;
      down(j) -= e;
      CHECK(s(j) == doctest::Approx((m.log_density(x, up) - m.log_density(x, down)) / (2 * e)).epsilon(1e-6));
      const Vector ds = (m.score(x, up) - m.score(x, down)) / (2 * e);
      for (int k = 0; k < d; ++k) CHECK(H(k, j) == doctest::Approx(ds(k)).epsilon(1e-6));
    }
  }
  for (int l = 0; l < d; ++l) {
    Vector up = theta, down = theta;
    up(l) += e;
    down(l) -= e;
    const Matrix dH = (m.total_hessian(data, up) - m.total_hessian(data, down)) / (2 * e);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        CHECK(m.third_derivative(data, theta, j, k, l) == doctest::Approx(dH(j, k)).epsilon(1e-5));
  }
}

// |third derivative| <= M_jkl at random points of the eps-box.
void check_domination(const ParametricModel& m, const Vector& theta0, double eps, const Dataset& data) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.999, 0.999);
  const int d = m.dim();
  for (int trial = 0; trial < 50; ++trial) {
    Vector theta = theta0;
    for (int j = 0; j < d; ++j) theta(j) += eps * u(rng);
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const double bound = m.dominating_function(data, theta0, eps, j, k, l, 0, false);
          CHECK(std::abs(m.third_derivative(data, theta, j, k, l)) <= bound * (1 + 1e-12) + 1e-12);
        }
  }
}

}  // namespace

TEST_CASE("exponential model") {
  const ExponentialModel m;
  const Vector t0 = Vector::Constant(1, 3.0);
  const Dataset data = m.sample(t0, 40, 1);
  check_derivatives(m, t0, data);
  check_domination(m, t0, 1.5, data);
  CHECK(m.epsilon_default(t0) == 1.5);
  double mean = 0.0;
  for (double v : data.values()) mean += v / 40.0;
  CHECK(m.fit(data, 0, t0)(0) == doctest::Approx(mean));
  const LRTResult lrt = neg2_log_lambda(m, data, 1, t0);
  REQUIRE(lrt.closed_form);
  CHECK(lrt.statistic == doctest::Approx(*lrt.closed_form).epsilon(1e-10));
  CHECK(lrt.statistic >= 0.0);
  const Dataset bad(1, std::vector<double>{1.0, -2.0});
  CHECK_THROWS_AS(m.validate_data(bad), ConfigError);
}

TEST_CASE("normal model") {
  const NormalModel m;
  const Vector t0 = v2(0.0, 2.0);
  const Dataset data = m.sample(v2(0.3, 2.0), 30, 2);
  check_derivatives(m, v2(0.2, 1.7), data);
  check_domination(m, t0, 1.0, data);
  RunningStats s;
  for (double v : data.values()) s.add(v);
  const Vector full = m.fit(data, 0, t0);
  CHECK(full(0) == doctest::Approx(s.mean()));
  CHECK(full(1) == doctest::Approx(s.variance() * 29.0 / 30.0));
  double ss0 = 0.0;
  for (double v : data.values()) ss0 += v * v;
  const Vector res = m.fit(data, 1, t0);
  CHECK(res(0) == 0.0);
  CHECK(res(1) == doctest::Approx(ss0 / 30.0));
  const LRTResult lrt = neg2_log_lambda(m, data, 1, t0);
  REQUIRE(lrt.closed_form);
  CHECK(lrt.statistic == doctest::Approx(*lrt.closed_form).epsilon(1e-10));
  CHECK(lrt.grad_norm[0] < 1e-8);
  // Simple null: both coordinates pinned.
  const LRTResult simple = neg2_log_lambda(m, data, 2, t0);
  CHECK(simple.statistic >= lrt.statistic);
}

TEST_CASE("logistic model: derivatives, domination and fits") {
  for (CovariateLaw law : {CovariateLaw::rademacher, CovariateLaw::normal}) {
    const LogisticModel m(3, law);
    Vector t0(3);
    t0 << 0.4, -0.2, 0.1;
    const Dataset data = m.sample(t0, 500, 3);
    check_derivatives(m, t0, data);
    check_domination(m, t0, 1.0, data);
    int iterations = 0;
    const Vector fit = m.fit(data, 0, t0, &iterations);
    CHECK(m.total_score(data, fit).lpNorm<Eigen::Infinity>() < 1e-8);
    CHECK(iterations > 0);
    const Vector res = m.fit(data, 1, t0);
    CHECK(res(0) == t0(0));
    CHECK(m.total_score(data, res).tail(2).lpNorm<Eigen::Infinity>() < 1e-8);
    const LRTResult lrt = neg2_log_lambda(m, data, 1, t0);
    CHECK(lrt.statistic >= 0.0);
    CHECK_FALSE(lrt.closed_form);
  }
}

TEST_CASE("logistic Fisher information") {
  const LogisticModel rad(3);
  CHECK((rad.fisher_info(Vector::Zero(3)) - 0.25 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);
  // Monte Carlo oracle for E psi'(theta'x) x x' with Gaussian covariates.
  const LogisticModel gauss(2, CovariateLaw::normal);
  const Vector t = v2(0.8, -0.5);
  const Matrix info = gauss.fisher_info(t);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z;
  std::vector<RunningStats> acc(4);
  for (int i = 0; i < 400000; ++i) {
    const Vector x = v2(z(rng), z(rng));
    const double w = logistic_psi1(t.dot(x));
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) acc[2 * a + b].add(w * x(a) * x(b));
  }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      CHECK(std::abs(info(a, b) - acc[2 * a + b].mean()) < 5 * acc[2 * a + b].stderr_of_mean());
}

TEST_CASE("logistic separation") {
  const LogisticModel m(2);
  std::vector<double> rows;
  for (int rep = 0; rep < 5; ++rep)
    for (double x1 : {-1.0, 1.0})
      for (double x2 : {-1.0, 1.0}) rows.insert(rows.end(), {x1, x2, x2 > 0 ? 1.0 : 0.0});
  const Dataset data(3, rows);
  CHECK_THROWS_AS(m.fit(data, 0, Vector::Zero(2)), Separation);
  // Pinning the separating coordinate leaves a well-posed null fit.
  std::vector<double> pinned_rows;
  for (int rep = 0; rep < 5; ++rep)
    for (double x1 : {-1.0, 1.0})
      for (double x2 : {-1.0, 1.0}) pinned_rows.insert(pinned_rows.end(), {x2, x1, x2 > 0 ? 1.0 : 0.0});
  CHECK_THROWS_AS(m.fit(Dataset(3, pinned_rows), 0, Vector::Zero(2)), Separation);
  CHECK_NOTHROW(m.fit(Dataset(3, pinned_rows), 1, v2(0.0, 0.0)));
}

TEST_CASE("analytic oracles agree with an independent simulation") {
  for (const MomentCheck& c : check_moment_oracle(ExponentialModel(), Vector::Constant(1, 3.0), 1, 12, 1.5,
                                                  100000, 17)) {
    INFO(c.table);
    CHECK(c.passed);
  }
  for (const MomentCheck& c : check_moment_oracle(NormalModel(), v2(0.0, 1.5), 1, 12, 0.6, 100000, 18)) {
    INFO(c.table);
    CHECK(c.passed);
  }
}

TEST_CASE("logistic oracle is Monte Carlo backed and uncertified") {
  BoundOptions o;
  o.oracle.reps = 10000;
  // Rademacher covariates at theta0 = 0 make the null Hessian constant, so use Gaussian ones.
  const BoundBreakdown b = assemble_bound(LogisticModel(2, CovariateLaw::normal), Vector::Constant(2, 0.3),
                                          400, 1, TestFunction::ht(), o);
  CHECK_FALSE(b.certified);
  CHECK(b.uncertainty > 0.0);
  CHECK(b.k1_star_term > 0.0);
  CHECK(std::isfinite(b.total));
  const BoundBreakdown single = assemble_bound(LogisticModel(1), Vector::Zero(1), 400, 1, TestFunction::ht(), o);
  CHECK(single.k1_star_term == 0.0);
  CHECK(single.k2_star_term == 0.0);
  o.oracle.reps = 100;
  CHECK_THROWS_AS(assemble_bound(LogisticModel(2), Vector::Zero(2), 400, 1, TestFunction::ht(), o), ConfigError);
}

TEST_CASE("model registry") {
  CHECK(make_model("exponential")->dim() == 1);
  CHECK(make_model("normal")->dim() == 2);
  ModelOptions o;
  o.logistic_d = 4;
  CHECK(make_model("logistic", o)->dim() == 4);
  CHECK_THROWS_AS(make_model("poisson"), ConfigError);
}
