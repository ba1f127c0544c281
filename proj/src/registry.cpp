#include "stein_wilks/models.hpp"

namespace stein_wilks {

std::unique_ptr<ParametricModel> make_model(const std::string& id, const ModelOptions& options) {
  if (id == "exponential") return std::make_unique<ExponentialModel>();
  if (id == "normal") return std::make_unique<NormalModel>();
  if (id == "logistic") return std::make_unique<LogisticModel>(options.logistic_d, options.covariates);
  throw ConfigError("unknown model id '" + id + "' (expected exponential, normal or logistic)");
}

}  // namespace stein_wilks
