#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>

#include "stein_wilks/model.hpp"
#include "stein_wilks/models.hpp"
#include "stein_wilks/parallel.hpp"
#include "stein_wilks/stats.hpp"

using namespace stein_wilks;

TEST_CASE("h_t derivatives match central differences and declared norms") {
  const TestFunction h = TestFunction::ht();
  CHECK(h.norm_h == 0.5);
  CHECK(h.norm_h1 == doctest::Approx(3.0 * std::sqrt(1.5) / 16.0));
  CHECK(h.norm_h2 == 0.5);
  const double e = 1e-5;
  for (double x : {0.0, 0.3, 1.0, 2.5, 7.0}) {
    CHECK(h.h1(x) == doctest::Approx((h.h(x + e) - h.h(x - e)) / (2 * e)).epsilon(1e-6));
    CHECK(h.h2(x) == doctest::Approx((h.h1(x + e) - h.h1(x - e)) / (2 * e)).epsilon(1e-6));
  }
  const TestFunctionReport rep = validate_test_function(h);
  CHECK(rep.sup_h == doctest::Approx(0.5));
  CHECK(rep.sup_h1 <= h.norm_h1);
}

TEST_CASE("norm validation rejects understated norms") {
  TestFunction h = TestFunction::ht();
  h.norm_h1 = 0.1;
  CHECK_THROWS_AS(validate_test_function(h), NormViolation);
  CHECK_THROWS_AS(validate_test_function(TestFunction::ht(), GridSpec{50.0, 100}), ConfigError);
  CHECK_NOTHROW(validate_test_function(TestFunction::zero()));
}

TEST_CASE("tabulated test function from a table file") {
  std::istringstream in(
      "# h(x) = x on [0,1], clamped\nnorm_h=1\nnorm_h1=1\nnorm_h2=0\n0,0,1,0\n1,1,1,0\n");
  const TestFunction h = TestFunction::read_table(in);
  CHECK(h.h(0.25) == doctest::Approx(0.25));
  CHECK(h.h(5.0) == doctest::Approx(1.0));
  CHECK(h.norm_h == 1.0);
  CHECK_NOTHROW(validate_test_function(h));
  std::istringstream missing("0,0,1,0\n1,1,1,0\n");
  CHECK_THROWS_AS(TestFunction::read_table(missing), ConfigError);
}

TEST_CASE("dataset csv round trip") {
  const Dataset d(2, std::vector<double>{1.5, -2.0, 3.25, 4.0});
  std::ostringstream out;
  write_csv(out, d);
  std::istringstream in("# comment\n" + out.str() + "\n");
  CHECK(read_csv(in, 2) == d);
  std::istringstream bad("1,2,3\n");
  CHECK_THROWS_AS(read_csv(bad, 2), ConfigError);
}

TEST_CASE("replicate seeds are a pure function of (master, index)") {
  static_assert(replicate_seed(1, 2) == replicate_seed(1, 2));
  CHECK(replicate_seed(1, 2) != replicate_seed(1, 3));
  CHECK(replicate_seed(1, 2) != replicate_seed(2, 2));
}

TEST_CASE("running stats block merge equals one pass") {
  RunningStats all, a, b;
  for (int i = 0; i < 1000; ++i) {
    const double x = std::sin(i * 0.37) * 3.0 + i * 1e-3;
    all.add(x);
    (i < 400 ? a : b).add(x);
  }
  a.merge(b);
  CHECK(a.count() == all.count());
  CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-13));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
}

TEST_CASE("Gaussian reference moments for an identity information") {
  WMomentSet w(2);
  fill_gaussian_moments(w, Matrix::Identity(2, 2));
  const double c = std::sqrt(2.0 / std::numbers::pi);
  CHECK(w.zabs.value(0) == doctest::Approx(c));
  CHECK(w.zabs_sq.value(0, 0) == doctest::Approx(2.0 * c));  // E|Z|^3
  CHECK(w.zabs_sq.value(0, 1) == doctest::Approx(c));        // E|Z_0| E Z_1^2
  CHECK_THROWS_AS(fill_gaussian_moments(w, Matrix::Identity(3, 3)), DimensionMismatch);
}

namespace {

// Exponential model with a score shifted away from mean zero.
class BrokenScore final : public ParametricModel {
 public:
  std::string id() const override { return "broken"; }
  int dim() const override { return 1; }
  std::size_t arity() const override { return 1; }
  ModelCapabilities capabilities() const override { return {}; }
  bool in_domain(const Vector& t) const override { return base.in_domain(t); }
  double log_density(std::span<const double> x, const Vector& t) const override { return base.log_density(x, t); }
  Vector score(std::span<const double> x, const Vector& t) const override {
    return base.score(x, t).array() + 0.5;
  }
  Matrix hessian(std::span<const double> x, const Vector& t) const override { return base.hessian(x, t); }
  Matrix fisher_info(const Vector& t) const override { return base.fisher_info(t); }
  double third_derivative(const Dataset& d, const Vector& t, int j, int k, int l) const override {
    return base.third_derivative(d, t, j, k, l);
  }
  double dominating_function(const Dataset& d, const Vector& t, double e, int j, int k, int l, int r,
                             bool res) const override {
    return base.dominating_function(d, t, e, j, k, l, r, res);
  }
  void sample_into(const Vector& t, std::size_t n, Rng& rng, Dataset& out) const override {
    base.sample_into(t, n, rng, out);
  }
  Vector fit(const Dataset& d, int r, const Vector& nv, int* it) const override { return base.fit(d, r, nv, it); }

 private:
  ExponentialModel base;
};

}  // namespace

TEST_CASE("model validation: score mean zero and information identity") {
  Vector theta(1);
  theta << 2.0;
  const ModelValidationReport rep = validate_model(ExponentialModel(), theta, 20, 20000, 3);
  CHECK(rep.max_abs_z <= 5.0);
  Vector nt(2);
  nt << 0.5, 2.0;
  CHECK_NOTHROW(validate_model(NormalModel(), nt, 20, 20000, 3));
  CHECK_NOTHROW(validate_model(LogisticModel(3, CovariateLaw::normal), Vector::Constant(3, 0.3), 50, 20000, 3));
  try {
    validate_model(BrokenScore(), theta, 20, 20000, 3);
    FAIL("expected ContractViolation");
  } catch (const ContractViolation& e) {
    CHECK(e.coordinate == 1);
    CHECK(std::abs(e.z_score) > 5.0);
  }
  CHECK_THROWS_AS(validate_model(ExponentialModel(), theta, 20, 100, 3), ConfigError);
}
