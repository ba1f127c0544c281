#pragma once

#include <array>
#include <optional>

#include "stein_wilks/model.hpp"

namespace stein_wilks {

struct LRTResult {
  Theta theta_hat;              // unrestricted MLE
  Theta theta_res_hat;          // first r coordinates pinned to theta0
  double statistic = 0.0;       // -2 log Lambda from the two log-likelihoods
  std::optional<double> closed_form;  // model-specific closed form, when available
  std::array<int, 2> iterations{0, 0};
  std::array<double, 2> grad_norm{0.0, 0.0};  // |score|_inf over the free coordinates
};

// -2 log Lambda = 2 [l(theta_hat) - l(theta_res_hat)]. For r == d the
// restricted fit is theta0 itself.
LRTResult neg2_log_lambda(const ParametricModel& model, const Dataset& data, int r,
                          const Vector& theta0);

// Statistic only, preferring the model's closed form. Used by the simulation kernels.
double lrt_statistic(const ParametricModel& model, const Dataset& data, int r, const Vector& theta0);

}  // namespace stein_wilks
