#include "stein_wilks/errors.hpp"

#include <sstream>

namespace stein_wilks {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

Error::Error(std::string name, const std::string& what, ErrorKind kind)
    : std::runtime_error(name + ": " + what), name_(std::move(name)), kind_(kind) {}

ConfigError::ConfigError(const std::string& what)
    : Error("ConfigError", what, ErrorKind::config) {}

NormViolation::NormViolation(std::string norm, double loc, double sampled, double decl)
    : Error("NormViolation",
            norm + " sampled " + fmt_double(sampled) + " at x=" + fmt_double(loc) +
                " exceeds declared " + fmt_double(decl),
            ErrorKind::config),
      norm_name(std::move(norm)),
      location(loc),
      sampled_value(sampled),
      declared(decl) {}

ContractViolation::ContractViolation(std::string cond, int coord, double z)
    : Error("ContractViolation",
            cond + " fails on coordinate " + std::to_string(coord) +
                " (z=" + fmt_double(z) + ")",
            ErrorKind::numerical),
      condition(std::move(cond)),
      coordinate(coord),
      z_score(z) {}

NotSymmetric::NotSymmetric(const std::string& what)
    : Error("NotSymmetric", what, ErrorKind::numerical) {}

NotPositiveDefinite::NotPositiveDefinite(const std::string& what)
    : Error("NotPositiveDefinite", what, ErrorKind::numerical) {}

IllConditioned::IllConditioned(double cond)
    : Error("IllConditioned", "condition estimate " + fmt_double(cond) + " exceeds 1e12",
            ErrorKind::numerical),
      condition_estimate(cond) {}

DimensionMismatch::DimensionMismatch(const std::string& what)
    : Error("DimensionMismatch", what, ErrorKind::numerical) {}

UnsupportedOrder::UnsupportedOrder(int order)
    : Error("UnsupportedOrder", "moment order " + std::to_string(order) + " not supported",
            ErrorKind::numerical) {}

MissingMoment::MissingMoment(std::string tbl, std::vector<std::size_t> idx)
    : Error("MissingMoment",
            [&] {
              std::string s = tbl + "[";
              for (std::size_t i = 0; i < idx.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(idx[i] + 1);
              }
              return s + "]";
            }(),
            ErrorKind::numerical),
      table(std::move(tbl)),
      index(std::move(idx)) {}

NonpositiveEpsilon::NonpositiveEpsilon(double eps)
    : Error("NonpositiveEpsilon", "epsilon=" + fmt_double(eps), ErrorKind::config) {}

FitFailure::FitFailure(std::string name, const std::string& what)
    : Error(std::move(name), what, ErrorKind::numerical) {}

Separation::Separation(const std::string& what) : FitFailure("Separation", what) {}

SingularHessian::SingularHessian(const std::string& what)
    : FitFailure("SingularHessian", what) {}

MaxIterations::MaxIterations(int iterations, double grad_norm)
    : FitFailure("MaxIterations", "no convergence after " + std::to_string(iterations) +
                                      " iterations, |grad|=" + fmt_double(grad_norm)) {}

OracleUnavailable::OracleUnavailable(const std::string& model_id)
    : Error("OracleUnavailable", "no moment oracle for model '" + model_id + "'",
            ErrorKind::config) {}

InsufficientAcceptance::InsufficientAcceptance(std::size_t accepted, std::size_t required)
    : Error("InsufficientAcceptance",
            std::to_string(accepted) + " accepted replicates, need " + std::to_string(required),
            ErrorKind::numerical) {}

QuadratureNonconvergence::QuadratureNonconvergence(double estimate, double error)
    : Error("QuadratureNonconvergence",
            "estimate " + fmt_double(estimate) + " with error " + fmt_double(error),
            ErrorKind::numerical) {}

ExcessiveFitFailures::ExcessiveFitFailures(std::size_t failed, std::size_t reps)
    : Error("ExcessiveFitFailures",
            std::to_string(failed) + " of " + std::to_string(reps) + " fits failed",
            ErrorKind::numerical) {}

}  // namespace stein_wilks
