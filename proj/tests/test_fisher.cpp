#include "doctest.h"

#include <random>

#include "stein_wilks/fisher.hpp"

using namespace stein_wilks;

namespace {

Matrix random_spd(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = g(rng);
  return m * m.transpose() / d + 0.3 * Matrix::Identity(d, d);
}

}  // namespace

TEST_CASE("linf norm is the maximum absolute row sum") {
  Matrix m(2, 3);
  m << 1, -2, 3, -4, 0.5, 0;
  CHECK(linf_norm(m) == doctest::Approx(6.0));
  CHECK(linf_norm(Matrix(0, 0)) == 0.0);
}

TEST_CASE("spd inverse agrees with a dense LU inverse") {
  std::mt19937_64 rng(7);
  for (int d = 1; d <= 12; ++d) {
    const Matrix m = random_spd(d, rng);
    const Matrix inv = spd_inverse(m, "m");
    CHECK((inv - m.fullPivLu().inverse()).cwiseAbs().maxCoeff() < 1e-10);
    const Matrix root = spd_inverse_sqrt(m);
    CHECK((root * root * m - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("spd inverse guards") {
  Matrix asym(2, 2);
  asym << 1, 0.5, 0, 1;
  CHECK_THROWS_AS(spd_inverse(asym, "a"), NotSymmetric);
  Matrix indef(2, 2);
  indef << 1, 2, 2, 1;
  CHECK_THROWS_AS(spd_inverse(indef, "b"), NotPositiveDefinite);
  Matrix ill(2, 2);
  ill << 1, 0, 0, 1e-14;
  CHECK_THROWS_AS(spd_inverse(ill, "c"), IllConditioned);
}

TEST_CASE("partition of a 3x3 information by hand") {
  Matrix info(3, 3);
  info << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const FisherBlocks b = partition_fisher(info, 1);
  // C = [[3,1],[1,2]], C^-1 = [[2,-1],[-1,3]]/5, B = [1, 0].
  CHECK(b.D(0, 0) == doctest::Approx(0.4));
  CHECK(b.D(0, 1) == doctest::Approx(-0.2));
  const double schur = 4.0 - 0.4;
  CHECK(b.U(0, 0) == doctest::Approx(1.0 / schur));
  CHECK(b.full_inverse(0, 0) == doctest::Approx(1.0 / schur));
  const double c = std::max({1.0 / schur, 0.6 * 0.4 / schur, 0.4 / schur});
  CHECK(b.c == doctest::Approx(c));
  CHECK_THROWS_AS(partition_fisher(info, 0), DimensionMismatch);
  CHECK_THROWS_AS(partition_fisher(info, 4), DimensionMismatch);
}

TEST_CASE("r == d gives U = A^-1 and empty nuisance blocks") {
  Matrix info(2, 2);
  info << 2, 0.5, 0.5, 1;
  const FisherBlocks b = partition_fisher(info, 2);
  CHECK(b.B.size() == 0);
  CHECK(b.C.size() == 0);
  CHECK((b.U - info.inverse()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(b.c == doctest::Approx(linf_norm(info.inverse())));
}

TEST_CASE("Schur identity for random partitions") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 10);
    const int r = 1 + static_cast<int>(rng() % static_cast<unsigned>(d));
    const FisherBlocks b = partition_fisher(random_spd(d, rng), r);
    Vector xi(r), eta(d - r);
    for (int i = 0; i < r; ++i) xi(i) = g(rng);
    for (int i = 0; i < d - r; ++i) eta(i) = g(rng);
    const QuadraticForms q = quadratic_form_g(xi, eta, b);
    CHECK(q.full == doctest::Approx(q.schur).epsilon(1e-10));
  }
  const FisherBlocks b = partition_fisher(Matrix::Identity(3, 3), 2);
  CHECK_THROWS_AS(quadratic_form_g(Vector::Zero(1), Vector::Zero(2), b), DimensionMismatch);
}
