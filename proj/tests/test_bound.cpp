#include "doctest.h"

#include <cmath>
#include <numbers>

#include "stein_wilks/bound.hpp"
#include "stein_wilks/models.hpp"

using namespace stein_wilks;

namespace {

Vector vec1(double a) { return Vector::Constant(1, a); }

// The exponential corollary, typed in from the published statement.
struct ExpCorollary {
  double h_part, r_poly, k_part;
};

ExpCorollary exponential_reference(double t, double n, const TestFunction& h) {
  ExpCorollary c;
  c.h_part = 8.0 * h.norm_h / n;
  c.r_poly = std::sqrt(2.0) / (std::pow(t, 8) * std::sqrt(std::numbers::pi)) *
             (19 * std::pow(t, 4) + 325 * t * t + 2733 + 36973 / n);
  c.k_part = h.norm_h1 / std::sqrt(n) *
             (6 * std::sqrt(3 + 6 / n) +
              std::sqrt(15 + 130 / n + 120 / (n * n)) *
                  (1120.0 / 3 + (320 * std::pow(3 + 6 / n, 0.25) + 4) / std::sqrt(n)) +
              6400 / std::sqrt(n) * std::sqrt(105 + 2380 / n + 7308 / (n * n) + 5040 / (n * n * n)));
  return c;
}

}  // namespace

TEST_CASE("uncertain arithmetic propagates absolute first-order errors") {
  const Uncertain a{2.0, 0.1}, b{3.0, 0.2};
  const Uncertain s = a + b;
  CHECK(s.value == 5.0);
  CHECK(s.uncertainty == doctest::Approx(0.3));
  const Uncertain p = a * b;
  CHECK(p.value == 6.0);
  CHECK(p.uncertainty == doctest::Approx(3.0 * 0.1 + 2.0 * 0.2));
  const Uncertain q = a / b;
  CHECK(q.uncertainty == doctest::Approx(0.1 / 3.0 + 2.0 * 0.2 / 9.0));
  const Uncertain r = pow(Uncertain{4.0, 0.4}, 0.5);
  CHECK(r.value == 2.0);
  CHECK(r.uncertainty == doctest::Approx(0.5 / 2.0 * 0.4));
  const Uncertain z = pow(Uncertain{0.0, 0.01}, 0.5);
  CHECK(z.uncertainty == doctest::Approx(0.1));
}

TEST_CASE("exponential: generic K1 and K2 equal the corollary; R stays below its polynomial") {
  const ExponentialModel m;
  const TestFunction h = TestFunction::ht();
  for (double t : {1.0, 3.0, 7.5}) {
    for (std::size_t n : {100UL, 100000UL, 100000000UL}) {
      const BoundBreakdown b = assemble_bound(m, vec1(t), n, 1, h);
      const ExpCorollary ref = exponential_reference(t, static_cast<double>(n), h);
      CHECK(b.k1_term + b.k2_term == doctest::Approx(ref.h_part + ref.k_part).epsilon(1e-11));
      const double pre = 2.0 * (h.norm_h1 + h.norm_h2) / std::sqrt(static_cast<double>(n));
      CHECK(b.r_term <= pre * ref.r_poly);
      CHECK(b.k1_star_term == 0.0);
      CHECK(b.k2_star_term == 0.0);
      CHECK(b.certified);
      CHECK(exponential_corollary_bound(t, static_cast<double>(n), h, true) ==
            doctest::Approx(ref.h_part + pre * ref.r_poly + ref.k_part).epsilon(1e-12));
      CHECK(exponential_corollary_bound(t, static_cast<double>(n), h, false) ==
            doctest::Approx(ref.h_part + ref.r_poly + ref.k_part).epsilon(1e-12));
    }
  }
}

TEST_CASE("exponential paper example: theta0 = 3, n = 1e5") {
  const BoundBreakdown b = assemble_bound(ExponentialModel(), vec1(3.0), 100000, 1, TestFunction::ht());
  CHECK(b.total >= 1.206);
  CHECK(b.total <= 1.226);
  CHECK(std::abs(b.k1_term - 0.008) <= 0.001);
  CHECK(b.r_term < 0.004);
  CHECK(b.k2_term < 1.205);
  CHECK(b.total == doctest::Approx(b.r_term + b.k1_term + b.k1_star_term + b.k2_term + b.k2_star_term));
  CHECK(std::abs(exponential_corollary_bound(3.0, 1e5, TestFunction::ht(), true) - 1.216) < 5e-4);
}

TEST_CASE("unprefactored corollary keeps the raw R polynomial") {
  CHECK(exponential_corollary_bound(3.0, 1e5, TestFunction::ht(), false) > 0.87);
  CHECK(exponential_corollary_bound(3.0, 1e5, TestFunction::zero(), true) == 0.0);
}

TEST_CASE("hand evaluation of R for the exponential model") {
  const double t = 3.0;
  const std::size_t n = 1000;
  const ExponentialModel m;
  const FisherBlocks blocks = partition_fisher(m.fisher_info(vec1(t)), 1);
  const OracleMoments o = m.moment_oracle(vec1(t), 1, n, t / 2, {});
  const double c = 1.0 / (t * t);
  const double a3 = std::sqrt(265.0) / std::pow(t, 3), a5 = std::sqrt(1334961.0) / std::pow(t, 5);
  const double a1 = 1.0 / t, w2 = 1.0 / (t * t), cross = 1.0 / (t * t);
  const double ev = std::sqrt(2.0 / std::numbers::pi) * t;
  const double ratio = 2.0;
  const double nn = static_cast<double>(n);
  const double braces = a3 + 8 * c * (4 * a3 * w2 + 4 / nn * a5 + ratio * a3) +
                        2 * cross * (a1 + 16 * c * (4 * a1 * w2 + 4 / nn * a3 + ratio * a1));
  CHECK(compute_R(o.w, blocks, n, c).value == doctest::Approx(c * ev * braces).epsilon(1e-12));
}

TEST_CASE("zero test function gives a zero bound") {
  const BoundBreakdown b = assemble_bound(ExponentialModel(), vec1(3.0), 100000, 1, TestFunction::zero());
  CHECK(b.total == 0.0);
}

TEST_CASE("normal model: composite null has starred terms, simple null does not") {
  Vector theta(2);
  theta << 0.0, 1.0;
  const TestFunction h = TestFunction::ht();
  const BoundBreakdown composite = assemble_bound(NormalModel(), theta, 10000, 1, h);
  CHECK(composite.k1_star_term > 0.0);
  CHECK(composite.k2_star_term > 0.0);
  CHECK(composite.certified);
  const BoundBreakdown simple = assemble_bound(NormalModel(), theta, 10000, 2, h);
  CHECK(simple.k1_star_term == 0.0);
  CHECK(simple.k2_star_term == 0.0);
  // O(n^{-1/2}) decay.
  const BoundBreakdown mid = assemble_bound(NormalModel(), theta, 1000000, 1, h);
  const BoundBreakdown big = assemble_bound(NormalModel(), theta, 100000000, 1, h);
  const double ratio = big.total / mid.total;
  CHECK(ratio > 0.08);
  CHECK(ratio < 0.12);
}

TEST_CASE("normal corollary: constants and value at sigma^2 = 1") {
  CHECK(NormalCorollaryConstants::r_coefficient == 47456.0);
  CHECK(NormalCorollaryConstants::k_coefficient == 418433114.0);
  CHECK(NormalCorollaryConstants::h_coefficient == 8.0);
  const TestFunction h = TestFunction::ht();
  const double n = 1e6;
  const double want = 47456.0 * (h.norm_h2 + h.norm_h1) / std::sqrt(n * std::numbers::pi) +
                      418433114.0 * h.norm_h1 / std::sqrt(n) + 8.0 * h.norm_h / n * 5.0;
  CHECK(normal_corollary_bound(1.0, n, h) == doctest::Approx(want).epsilon(1e-12));
  // Small sigma: the max{1, sigma^-9} factor takes over.
  CHECK(normal_corollary_bound(0.25, n, h) > normal_corollary_bound(1.0, n, h));
}

TEST_CASE("argument validation") {
  const TestFunction h = TestFunction::ht();
  const ExponentialModel m;
  CHECK_THROWS_AS(assemble_bound(m, vec1(3.0), 1, 1, h), ConfigError);
  CHECK_THROWS_AS(assemble_bound(m, vec1(3.0), 100, 2, h), ConfigError);
  CHECK_THROWS_AS(assemble_bound(m, Vector::Constant(2, 3.0), 100, 1, h), DimensionMismatch);
  BoundOptions o;
  o.epsilon = 0.0;
  CHECK_THROWS_AS(assemble_bound(m, vec1(3.0), 100, 1, h, o), NonpositiveEpsilon);
  const FisherBlocks blocks = partition_fisher(Matrix::Identity(2, 2), 1);
  CHECK_THROWS_AS(compute_K1(QTMomentSet(1), blocks, 10, false), DimensionMismatch);
}

TEST_CASE("logistic scaling orders") {
  const LogisticScaling s = logistic_bound_scaling(4, 2, 1e6, MomentCaps::rademacher());
  CHECK(s.r_order == doctest::Approx(4.0 * 2.0 * 256.0));
  CHECK(s.k1_order == 16.0);
  CHECK(s.k2_order == 64.0);
  CHECK(s.bound_order == doctest::Approx((2048.0 + 16 + 64) / 1000.0));
  CHECK(s.regime_limit == doctest::Approx(std::pow(1e6, 1.0 / 14.0)));
  CHECK_FALSE(s.in_regime);
  const MomentCaps g = MomentCaps::standard_normal();
  CHECK(g.mu3 == doctest::Approx(2.0 * std::sqrt(2.0 / std::numbers::pi)));
  CHECK(g.mu5 == doctest::Approx(8.0 * std::sqrt(2.0 / std::numbers::pi)));
  CHECK_THROWS_AS(logistic_bound_scaling(2, 3, 100, g), ConfigError);
}
