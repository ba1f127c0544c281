#pragma once

#include <memory>
#include <string>

#include "stein_wilks/model.hpp"

namespace stein_wilks {

// X ~ Exp with mean theta (d = 1).
class ExponentialModel final : public ParametricModel {
 public:
  std::string id() const override { return "exponential"; }
  int dim() const override { return 1; }
  std::size_t arity() const override { return 1; }
  ModelCapabilities capabilities() const override { return {true, true, true}; }
  bool in_domain(const Vector& theta) const override;
  void validate_data(const Dataset& data) const override;

  double log_density(std::span<const double> x, const Vector& theta) const override;
  Vector score(std::span<const double> x, const Vector& theta) const override;
  Matrix hessian(std::span<const double> x, const Vector& theta) const override;
  Matrix fisher_info(const Vector& theta) const override;
  double third_derivative(const Dataset& data, const Vector& theta, int j, int k,
                          int l) const override;
  double dominating_function(const Dataset& data, const Vector& theta0, double eps, int j, int k,
                             int l, int r, bool restricted) const override;
  double epsilon_default(const Vector& theta0) const override;

  void sample_into(const Vector& theta, std::size_t n, Rng& rng, Dataset& out) const override;
  Vector fit(const Dataset& data, int r, const Vector& null_values,
             int* iterations = nullptr) const override;
  std::optional<double> closed_form_statistic(const Dataset& data, int r,
                                              const Vector& theta0) const override;
  OracleMoments moment_oracle(const Vector& theta0, int r, std::size_t n, double eps,
                              const OracleOptions& options) const override;
  // The worked exponential example takes c = |||I|||, i.e. 1/theta0^2.
  double schur_constant(const FisherBlocks& blocks, const Vector& theta0) const override;
};

// X ~ N(mu, sigma^2) with theta = (mu, sigma^2); the null pins mu.
class NormalModel final : public ParametricModel {
 public:
  std::string id() const override { return "normal"; }
  int dim() const override { return 2; }
  std::size_t arity() const override { return 1; }
  ModelCapabilities capabilities() const override { return {true, true, true}; }
  bool in_domain(const Vector& theta) const override;

  double log_density(std::span<const double> x, const Vector& theta) const override;
  Vector score(std::span<const double> x, const Vector& theta) const override;
  Matrix hessian(std::span<const double> x, const Vector& theta) const override;
  Matrix fisher_info(const Vector& theta) const override;
  double third_derivative(const Dataset& data, const Vector& theta, int j, int k,
                          int l) const override;
  double dominating_function(const Dataset& data, const Vector& theta0, double eps, int j, int k,
                             int l, int r, bool restricted) const override;
  double epsilon_default(const Vector& theta0) const override;

  void sample_into(const Vector& theta, std::size_t n, Rng& rng, Dataset& out) const override;
  Vector fit(const Dataset& data, int r, const Vector& null_values,
             int* iterations = nullptr) const override;
  std::optional<double> closed_form_statistic(const Dataset& data, int r,
                                              const Vector& theta0) const override;
  OracleMoments moment_oracle(const Vector& theta0, int r, std::size_t n, double eps,
                              const OracleOptions& options) const override;
};

enum class CovariateLaw { rademacher, normal };

// Logistic regression without intercept: records are (x_1..x_d, y).
class LogisticModel final : public ParametricModel {
 public:
  explicit LogisticModel(int d, CovariateLaw law = CovariateLaw::rademacher);

  std::string id() const override { return "logistic"; }
  int dim() const override { return d_; }
  std::size_t arity() const override { return static_cast<std::size_t>(d_) + 1; }
  ModelCapabilities capabilities() const override;
  bool in_domain(const Vector& theta) const override;
  void validate_data(const Dataset& data) const override;
  CovariateLaw covariate_law() const { return law_; }

  double log_density(std::span<const double> x, const Vector& theta) const override;
  Vector score(std::span<const double> x, const Vector& theta) const override;
  Matrix hessian(std::span<const double> x, const Vector& theta) const override;
  Matrix fisher_info(const Vector& theta) const override;
  double third_derivative(const Dataset& data, const Vector& theta, int j, int k,
                          int l) const override;
  // |x_j x_k x_l| summed over observations; holds for every theta.
  double dominating_function(const Dataset& data, const Vector& theta0, double eps, int j, int k,
                             int l, int r, bool restricted) const override;
  double epsilon_default(const Vector& theta0) const override;

  void sample_into(const Vector& theta, std::size_t n, Rng& rng, Dataset& out) const override;
  // Damped Newton: stops at |grad|_inf <= 1e-10; at most 100 iterations and
  // 30 step halvings per iteration.
  Vector fit(const Dataset& data, int r, const Vector& null_values,
             int* iterations = nullptr) const override;
  OracleMoments moment_oracle(const Vector& theta0, int r, std::size_t n, double eps,
                              const OracleOptions& options) const override;

 private:
  int d_;
  CovariateLaw law_;
};

struct ModelOptions {
  int logistic_d = 2;
  CovariateLaw covariates = CovariateLaw::rademacher;
};

// "exponential", "normal" or "logistic"; ConfigError otherwise.
std::unique_ptr<ParametricModel> make_model(const std::string& id, const ModelOptions& options = {});

// Logistic link and its first two derivatives.
double logistic_psi(double t);
double logistic_psi1(double t);
double logistic_psi2(double t);

}  // namespace stein_wilks
