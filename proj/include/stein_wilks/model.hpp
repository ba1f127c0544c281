#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stein_wilks/errors.hpp"
#include "stein_wilks/moments.hpp"

namespace stein_wilks {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

struct FisherBlocks;

// Parameter vector with the number of leading coordinates pinned by the null.
struct Theta {
  Vector values;
  int r = 0;

  Theta() = default;
  explicit Theta(Vector v, int pinned = 0);

  int dim() const { return static_cast<int>(values.size()); }
};

// n observations of arity t, stored row-major.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t n, std::size_t arity);
  Dataset(std::size_t arity, std::vector<double> values);

  std::size_t size() const noexcept { return n_; }
  std::size_t arity() const noexcept { return t_; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * t_, t_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * t_, t_}; }
  std::span<const double> values() const { return data_; }

  // Resizes in place; keeps capacity so per-thread buffers can be reused.
  void reshape(std::size_t n, std::size_t arity);

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t t_ = 0;
  std::vector<double> data_;
};

// One observation per row, comma separated; blank lines and '#' comments skipped.
Dataset read_csv(std::istream& in, std::size_t arity);
void write_csv(std::ostream& out, const Dataset& data);

// A C^2-bounded test function with declared sup-norm bounds.
struct TestFunction {
  std::string name;
  std::function<double(double)> h, h1, h2;
  double norm_h = 0.0, norm_h1 = 0.0, norm_h2 = 0.0;

  // h_t(x) = 1/(x^2 + 2) with ||h|| <= 1/2, ||h'|| <= 3 sqrt(1.5)/16, ||h''|| <= 1/2.
  static TestFunction ht();
  static TestFunction zero();
  static TestFunction constant(double value);
  // Piecewise-linear interpolation of tabulated (x, h, h', h'') rows sorted by
  // x; evaluations outside the table clamp to the end rows.
  static TestFunction tabulated(std::vector<std::array<double, 4>> rows, double norm_h,
                                double norm_h1, double norm_h2);
  // Reads "norm_h=", "norm_h1=", "norm_h2=" header lines followed by x,h,h1,h2 rows.
  static TestFunction read_table(std::istream& in);

  TestFunction scaled(double factor) const;
};

struct GridSpec {
  double x_max = 50.0;
  std::size_t points = 20001;
};

struct TestFunctionReport {
  double sup_h = 0.0, sup_h1 = 0.0, sup_h2 = 0.0;
  std::size_t points = 0;
};

// Samples |h|, |h'|, |h''| over an even grid on [0, x_max] and throws
// NormViolation at the worst excess over a declared norm (+1e-9).
TestFunctionReport validate_test_function(const TestFunction& h, const GridSpec& grid = {});

// Moments of the MLE error Q = theta_hat - theta0 and of the centred Hessian
// T = d^2 l(theta0) + n I(theta0), for a full or restricted model.
struct QTMomentSet {
  std::size_t dim = 0;
  MomentTable q2;         // E(Q_j^2)
  MomentTable eq2;        // E(Q_j^2 Q_k^2)
  MomentTable eq6;        // E(Q_j^6)
  MomentTable eq_triple;  // E(Q_j^2 Q_k^2 Q_l^2)
  MomentTable eq_quad;    // E(Q_j^2 Q_k^2 Q_s^2 Q_l^2)
  MomentTable var_hess;   // Var(d^2/dtheta_l dtheta_j log f(X_1 | theta0))
  MomentTable t6;         // E(T_mk^6)
  MomentTable t4_cond;    // E(T_kj^4 | |Q_(m)| < eps)
  MomentTable m2_cond;    // E(M_jkl^2 | |Q_(m)| < eps)
  MomentTable m4_cond;    // E(M_jkl^4 | |Q_(m)| < eps)

  explicit QTMomentSet(std::size_t d = 0);
  bool any_monte_carlo() const;
};

// Moments of the per-observation score Y and of the Gaussian reference vector.
struct WMomentSet {
  std::size_t dim = 0;
  MomentTable abs1;    // E|Y_j|
  MomentTable cross2;  // |E(Y_j Y_k)|
  MomentTable abs3;    // E|Y_j Y_k Y_l|
  MomentTable abs5;    // E|Y_j Y_k Y_l Y_t^2|
  MomentTable w2;      // E(W_t^2)
  MomentTable zabs;    // E|([I]^{-1/2} Z)_s|
  MomentTable zabs_sq; // E|([I]^{-1/2} Z)_s Z_t^2|

  explicit WMomentSet(std::size_t d = 0);
  bool any_monte_carlo() const;
};

struct OracleMoments {
  QTMomentSet full;
  std::optional<QTMomentSet> restricted;  // absent when r == d
  WMomentSet w;
  double epsilon = 0.0;
};

struct OracleOptions {
  std::size_t reps = 20000;  // Monte Carlo fits for MC-backed oracles
  std::uint64_t seed = 0x5eed;
  int threads = 0;           // 0: use worker_count()
};

struct ModelCapabilities {
  bool fisher_analytic = false;
  bool oracle_analytic = false;
  bool closed_form_mle = false;
};

// Contract every parametric model satisfies. Implementations are immutable and
// safe to share across threads.
class ParametricModel {
 public:
  virtual ~ParametricModel() = default;

  virtual std::string id() const = 0;
  virtual int dim() const = 0;
  virtual std::size_t arity() const = 0;
  virtual ModelCapabilities capabilities() const = 0;
  virtual bool in_domain(const Vector& theta) const = 0;
  virtual void validate_data(const Dataset& data) const;

  virtual double log_density(std::span<const double> x, const Vector& theta) const = 0;
  virtual Vector score(std::span<const double> x, const Vector& theta) const = 0;
  virtual Matrix hessian(std::span<const double> x, const Vector& theta) const = 0;
  virtual Matrix fisher_info(const Vector& theta) const = 0;

  virtual double log_likelihood(const Dataset& data, const Vector& theta) const;
  virtual Vector total_score(const Dataset& data, const Vector& theta) const;
  virtual Matrix total_hessian(const Dataset& data, const Vector& theta) const;

  // Third derivative d^3 l / dtheta_j dtheta_k dtheta_l of the full-sample
  // log-likelihood.
  virtual double third_derivative(const Dataset& data, const Vector& theta, int j, int k,
                                  int l) const = 0;

  // Dominating function M_jkl(X) bounding |d^3 l| on the box
  // |theta_i - theta0_i| < eps. With restricted=true, indices refer to the
  // free coordinates r..d-1 of the null model.
  virtual double dominating_function(const Dataset& data, const Vector& theta0, double eps,
                                     int j, int k, int l, int r, bool restricted) const = 0;

  // Default neighbourhood radius; throws ConfigError when a model does not declare one.
  virtual double epsilon_default(const Vector& theta0) const;

  virtual void sample_into(const Vector& theta, std::size_t n, Rng& rng, Dataset& out) const = 0;
  Dataset sample(const Vector& theta, std::size_t n, std::uint64_t seed) const;

  // MLE over the free coordinates; the first r coordinates are pinned to
  // null_values[0..r). r == 0 is the unrestricted fit. Reports iterations.
  virtual Vector fit(const Dataset& data, int r, const Vector& null_values,
                     int* iterations = nullptr) const = 0;

  // -2 log Lambda; overridable when a numerically stable closed form exists.
  virtual std::optional<double> closed_form_statistic(const Dataset& data, int r,
                                                      const Vector& theta0) const;

  virtual OracleMoments moment_oracle(const Vector& theta0, int r, std::size_t n, double eps,
                                      const OracleOptions& options) const;

  // Constant c entering the R(W,U,D) term. Defaults to blocks.c.
  virtual double schur_constant(const FisherBlocks& blocks, const Vector& theta0) const;
};

struct ModelValidationReport {
  std::vector<double> score_z;  // per coordinate
  Matrix fisher_z;              // entrywise
  double max_abs_z = 0.0;
  std::size_t reps = 0;
};

// Monte Carlo spot checks of E[S(theta0)] = 0 and E[S S^T] = n I(theta0).
// Throws ContractViolation when any |z| > 5.
ModelValidationReport validate_model(const ParametricModel& model, const Vector& theta0,
                                     std::size_t n, std::size_t reps, std::uint64_t seed,
                                     int threads = 0);

// Gaussian reference moments for W ~ [I]^{1/2} Z: fills zabs and zabs_sq.
void fill_gaussian_moments(WMomentSet& w, const Matrix& info);

}  // namespace stein_wilks
