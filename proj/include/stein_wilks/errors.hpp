#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace stein_wilks {

// Configuration errors map to CLI exit code 2, numerical failures to 3.
enum class ErrorKind { config, numerical };

class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what, ErrorKind kind);

  const std::string& name() const noexcept { return name_; }
  ErrorKind kind() const noexcept { return kind_; }

 private:
  std::string name_;
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what);
};

class NormViolation : public Error {
 public:
  NormViolation(std::string norm_name, double location, double sampled_value,
                double declared);

  std::string norm_name;
  double location;
  double sampled_value;
  double declared;
};

class ContractViolation : public Error {
 public:
  ContractViolation(std::string condition, int coordinate, double z_score);

  std::string condition;
  int coordinate;  // 1-based
  double z_score;
};

class NotSymmetric : public Error {
 public:
  explicit NotSymmetric(const std::string& what);
};

class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(const std::string& what);
};

class IllConditioned : public Error {
 public:
  explicit IllConditioned(double condition_estimate);
  double condition_estimate;
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& what);
};

class UnsupportedOrder : public Error {
 public:
  explicit UnsupportedOrder(int order);
};

class MissingMoment : public Error {
 public:
  MissingMoment(std::string table, std::vector<std::size_t> index);
  std::string table;
  std::vector<std::size_t> index;
};

class NonpositiveEpsilon : public Error {
 public:
  explicit NonpositiveEpsilon(double epsilon);
};

// Base for MLE failures. The Monte Carlo harness excludes and counts these.
class FitFailure : public Error {
 public:
  FitFailure(std::string name, const std::string& what);
};

class Separation : public FitFailure {
 public:
  explicit Separation(const std::string& what);
};

class SingularHessian : public FitFailure {
 public:
  explicit SingularHessian(const std::string& what);
};

class MaxIterations : public FitFailure {
 public:
  explicit MaxIterations(int iterations, double grad_norm);
};

class OracleUnavailable : public Error {
 public:
  explicit OracleUnavailable(const std::string& model_id);
};

class InsufficientAcceptance : public Error {
 public:
  InsufficientAcceptance(std::size_t accepted, std::size_t required);
};

class QuadratureNonconvergence : public Error {
 public:
  QuadratureNonconvergence(double estimate, double error);
};

class ExcessiveFitFailures : public Error {
 public:
  ExcessiveFitFailures(std::size_t failed, std::size_t reps);
};

}  // namespace stein_wilks
