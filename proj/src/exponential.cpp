#include <cmath>

#include "oracle_util.hpp"
#include "stein_wilks/fisher.hpp"
#include "stein_wilks/models.hpp"

namespace stein_wilks {

bool ExponentialModel::in_domain(const Vector& theta) const {
  return theta.size() == 1 && theta(0) > 0.0 && std::isfinite(theta(0));
}

void ExponentialModel::validate_data(const Dataset& data) const {
  ParametricModel::validate_data(data);
  for (double v : data.values()) {
    if (!(v > 0.0)) throw ConfigError("exponential: observations must be > 0");
  }
}

double ExponentialModel::log_density(std::span<const double> x, const Vector& theta) const {
  return -std::log(theta(0)) - x[0] / theta(0);
}

Vector ExponentialModel::score(std::span<const double> x, const Vector& theta) const {
  const double t = theta(0);
  return Vector::Constant(1, (x[0] - t) / (t * t));
}

Matrix ExponentialModel::hessian(std::span<const double> x, const Vector& theta) const {
  const double t = theta(0);
  return Matrix::Constant(1, 1, 1.0 / (t * t) - 2.0 * x[0] / (t * t * t));
}

Matrix ExponentialModel::fisher_info(const Vector& theta) const {
  if (!in_domain(theta)) throw ConfigError("exponential: theta must be > 0");
  return Matrix::Constant(1, 1, 1.0 / (theta(0) * theta(0)));
}

double ExponentialModel::third_derivative(const Dataset& data, const Vector& theta, int, int,
                                          int) const {
  double s = 0.0;
  for (double v : data.values()) s += v;
  const double t = theta(0);
  const double n = static_cast<double>(data.size());
  return -2.0 * n / (t * t * t) + 6.0 * s / (t * t * t * t);
}

double ExponentialModel::dominating_function(const Dataset& data, const Vector& theta0,
                                             double eps, int, int, int, int, bool) const {
  const double lo = theta0(0) - eps;
  if (!(eps > 0.0) || !(lo > 0.0)) throw ConfigError("exponential: need 0 < eps < theta0");
  double s = 0.0;
  for (double v : data.values()) s += v;
  const double n = static_cast<double>(data.size());
  return 2.0 * n / (lo * lo * lo) + 6.0 * s / (lo * lo * lo * lo);
}

double ExponentialModel::epsilon_default(const Vector& theta0) const { return 0.5 * theta0(0); }

void ExponentialModel::sample_into(const Vector& theta, std::size_t n, Rng& rng,
                                   Dataset& out) const {
  out.reshape(n, 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double t = theta(0);
  for (std::size_t i = 0; i < n; ++i) out.row(i)[0] = -t * std::log1p(-unif(rng));
}

Vector ExponentialModel::fit(const Dataset& data, int r, const Vector& null_values,
                             int* iterations) const {
  if (iterations) *iterations = 0;
  if (r >= 1) return null_values.head(1);
  double s = 0.0;
  for (double v : data.values()) s += v;
  return Vector::Constant(1, s / static_cast<double>(data.size()));
}

std::optional<double> ExponentialModel::closed_form_statistic(const Dataset& data, int r,
                                                              const Vector& theta0) const {
  if (r != 1) return std::nullopt;
  double s = 0.0;
  for (double v : data.values()) s += v;
  const double n = static_cast<double>(data.size());
  const double dev = s / n / theta0(0) - 1.0;  // u - 1 with u = xbar/theta0
  return 2.0 * n * (dev - std::log1p(dev));
}

OracleMoments ExponentialModel::moment_oracle(const Vector& theta0, int r, std::size_t n,
                                              double eps, const OracleOptions&) const {
  if (!in_domain(theta0)) throw ConfigError("exponential: theta0 must be > 0");
  if (r != 1) throw ConfigError("exponential: only the simple null r = 1 is defined");
  if (n < 2) throw ConfigError("moment oracle needs n >= 2");
  const double t = theta0(0);
  if (!(eps > 0.0)) throw NonpositiveEpsilon(eps);
  if (!(eps < t)) throw ConfigError("exponential: eps must be < theta0");
  const auto nn = static_cast<long long>(n);
  const double N = static_cast<double>(n);

  // Q = Xbar - theta0 with Xbar ~ Gamma(n, n/theta0).
  const double q[5] = {1.0, gamma_mean_central_moment(nn, t, 2), gamma_mean_central_moment(nn, t, 4),
                       gamma_mean_central_moment(nn, t, 6), gamma_mean_central_moment(nn, t, 8)};
  auto by_order = [&](const std::vector<int>& m) { return MomentValue::exact(q[m[0]]); };

  OracleMoments out;
  out.epsilon = eps;
  QTMomentSet& Q = out.full;
  Q = QTMomentSet(1);
  detail::fill_by_counts(Q.q2, by_order);
  detail::fill_by_counts(Q.eq2, by_order);
  Q.eq6.fill([&](auto) { return MomentValue::exact(q[3]); });
  detail::fill_by_counts(Q.eq_triple, by_order);
  detail::fill_by_counts(Q.eq_quad, by_order);
  // d^2/dtheta^2 log f = 1/theta^2 - 2X/theta^3, variance 4/theta^4.
  Q.var_hess.fill([&](auto) { return MomentValue::exact(4.0 / (t * t * t * t)); });
  // T = -(2n/theta0^3) Q.
  const double slope = 2.0 * N / (t * t * t);
  Q.t6.fill([&](auto) { return MomentValue::exact(std::pow(slope, 6) * q[3]); });
  // Conditioning on |Q| < eps does not raise the moment of an increasing function of |Q|.
  Q.t4_cond.fill([&](auto) { return MomentValue::bound(std::pow(slope, 4) * q[2]); });
  // On |Xbar - theta0| < eps the dominating function is at most this constant.
  const double lo = t - eps;
  const double m_sup = 2.0 * N / (lo * lo * lo) + 6.0 * N * (t + eps) / (lo * lo * lo * lo);
  Q.m2_cond.fill([&](auto) { return MomentValue::bound(m_sup * m_sup); });
  Q.m4_cond.fill([&](auto) { return MomentValue::bound(std::pow(m_sup, 4)); });

  // Score Y = (X - theta0)/theta0^2.
  WMomentSet& W = out.w;
  W = WMomentSet(1);
  W.abs1.fill([&](auto) { return MomentValue::bound(1.0 / t); });
  W.cross2.fill([&](auto) { return MomentValue::exact(1.0 / (t * t)); });
  W.abs3.fill([&](auto) { return MomentValue::bound(std::sqrt(265.0) / std::pow(t, 3)); });
  W.abs5.fill([&](auto) { return MomentValue::bound(std::sqrt(1334961.0) / std::pow(t, 5)); });
  W.w2.fill([&](auto) { return MomentValue::exact(1.0 / (t * t)); });
  fill_gaussian_moments(W, fisher_info(theta0));
  return out;
}

double ExponentialModel::schur_constant(const FisherBlocks& blocks, const Vector&) const {
  return linf_norm(blocks.full);
}

}  // namespace stein_wilks
