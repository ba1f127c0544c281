#include "stein_wilks/lrt.hpp"

namespace stein_wilks {

LRTResult neg2_log_lambda(const ParametricModel& model, const Dataset& data, int r,
                          const Vector& theta0) {
  const int d = model.dim();
  if (r < 1 || r > d) throw ConfigError("r must lie in [1, d]");
  if (theta0.size() != d) throw DimensionMismatch("theta0 has the wrong length");
  model.validate_data(data);

  LRTResult out;
  const Vector full = model.fit(data, 0, theta0, &out.iterations[0]);
  const Vector res = model.fit(data, r, theta0, &out.iterations[1]);
  out.theta_hat = Theta(full, 0);
  out.theta_res_hat = Theta(res, r);
  out.statistic = 2.0 * (model.log_likelihood(data, full) - model.log_likelihood(data, res));
  out.closed_form = model.closed_form_statistic(data, r, theta0);
  out.grad_norm[0] = model.total_score(data, full).lpNorm<Eigen::Infinity>();
  out.grad_norm[1] = r < d ? model.total_score(data, res).tail(d - r).lpNorm<Eigen::Infinity>() : 0.0;
  return out;
}

double lrt_statistic(const ParametricModel& model, const Dataset& data, int r, const Vector& theta0) {
  if (auto s = model.closed_form_statistic(data, r, theta0)) return *s;
  const Vector full = model.fit(data, 0, theta0);
  const Vector res = model.fit(data, r, theta0);
  return 2.0 * (model.log_likelihood(data, full) - model.log_likelihood(data, res));
}

}  // namespace stein_wilks
