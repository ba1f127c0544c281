// stein_wilks: bound / simulate / rate-sweep / dim-sweep / verify.
//
// Exit codes: 0 success, 1 verify found a failing criterion, 2 invalid
// configuration, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stein_wilks/acceptance.hpp"
#include "stein_wilks/bound.hpp"
#include "stein_wilks/kernels.hpp"
#include "stein_wilks/mc.hpp"
#include "stein_wilks/models.hpp"
#include "stein_wilks/report.hpp"

namespace sw = stein_wilks;

namespace {

struct RunConfig {
  std::string command;
  std::string model = "exponential";
  std::vector<double> theta0;
  std::size_t n = 0;
  int r = 0;  // 0: model default
  std::string h = "ht";
  std::optional<double> epsilon;
  std::size_t reps = 0;
  std::uint64_t seed = 42;
  int threads = 0;
  std::string out;
  bool prefactored = true;
  std::string covariates = "rademacher";
  std::vector<double> n_grid;
  std::vector<int> d_grid;
  bool no_bound = false;
  bool bound_only = false;
  std::vector<int> only;
};

sw::TestFunction load_h(const std::string& spec) {
  sw::TestFunction h;
  if (spec == "ht") {
    h = sw::TestFunction::ht();
  } else if (spec == "zero") {
    h = sw::TestFunction::zero();
  } else {
    std::ifstream in(spec);
    if (!in) throw sw::ConfigError("cannot open test-function table '" + spec + "'");
    h = sw::TestFunction::read_table(in);
  }
  sw::validate_test_function(h);
  return h;
}

sw::CovariateLaw parse_law(const std::string& s) {
  if (s == "rademacher") return sw::CovariateLaw::rademacher;
  if (s == "normal") return sw::CovariateLaw::normal;
  throw sw::ConfigError("unknown covariate law '" + s + "'");
}

struct Job {
  std::unique_ptr<sw::ParametricModel> model;
  sw::Vector theta0;
  int r = 0;
};

Job make_job(const RunConfig& c) {
  if (c.theta0.empty()) throw sw::ConfigError("--theta0 is required");
  sw::ModelOptions mo;
  mo.logistic_d = static_cast<int>(c.theta0.size());
  mo.covariates = parse_law(c.covariates);
  Job job;
  job.model = sw::make_model(c.model, mo);
  job.theta0 = Eigen::Map<const sw::Vector>(c.theta0.data(), static_cast<Eigen::Index>(c.theta0.size()));
  if (job.theta0.size() != job.model->dim()) {
    throw sw::ConfigError(c.model + ": --theta0 needs " + std::to_string(job.model->dim()) + " values");
  }
  if (!job.model->in_domain(job.theta0)) throw sw::ConfigError(c.model + ": theta0 outside the parameter space");
  job.r = c.r > 0 ? c.r : (c.model == "logistic" ? job.model->dim() : 1);
  return job;
}

// Writes to --out when given, otherwise to stdout.
void emit(const RunConfig& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw sw::ConfigError("cannot write '" + c.out + "'");
  f << text;
}

sw::BoundOptions bound_options(const RunConfig& c) {
  sw::BoundOptions o;
  o.epsilon = c.epsilon;
  o.oracle.seed = c.seed;
  o.oracle.threads = c.threads;
  return o;
}

int run_bound(const RunConfig& c) {
  if (c.n < 2) throw sw::ConfigError("--n must be >= 2");
  const Job job = make_job(c);
  const sw::TestFunction h = load_h(c.h);
  const sw::BoundBreakdown b = sw::assemble_bound(*job.model, job.theta0, c.n, job.r, h, bound_options(c));
  nlohmann::json j = sw::bound_to_json(b);
  if (c.model == "exponential") {
    j["meta"]["corollary"] = sw::exponential_corollary_bound(job.theta0(0), static_cast<double>(c.n), h,
                                                             c.prefactored);
    j["meta"]["prefactored"] = c.prefactored;
  } else if (c.model == "normal") {
    j["meta"]["corollary"] = sw::normal_corollary_bound(job.theta0(1), static_cast<double>(c.n), h);
  }
  emit(c, j.dump(2) + "\n");
  sw::write_bound_table(c.out.empty() ? std::cerr : std::cout, b);
  return 0;
}

int run_simulate(const RunConfig& c) {
  if (c.n < 1) throw sw::ConfigError("--n must be >= 1");
  if (c.reps < 10000) throw sw::ConfigError("--reps must be >= 10000");
  const Job job = make_job(c);
  const sw::TestFunction h = load_h(c.h);
  const sw::MCEstimate e =
      sw::estimate_distance(*job.model, job.theta0, c.n, job.r, h, c.reps, c.seed, c.threads);
  std::optional<sw::BoundBreakdown> bound;
  if (!c.no_bound && c.n >= 2) bound = sw::assemble_bound(*job.model, job.theta0, c.n, job.r, h, bound_options(c));
  emit(c, sw::simulation_to_json(e, bound).dump(2) + "\n");
  return 0;
}

int run_rate_sweep(const RunConfig& c) {
  const Job job = make_job(c);
  const sw::TestFunction h = load_h(c.h);
  std::vector<std::size_t> grid;
  for (double v : c.n_grid) {
    if (!(v >= 2.0)) throw sw::ConfigError("--n-grid entries must be >= 2");
    grid.push_back(static_cast<std::size_t>(v));
  }
  sw::RateSweep sweep = sw::rate_sweep(*job.model, job.theta0, job.r, h, grid, bound_options(c));
  const double ref = sw::chisq_expectation(h, job.r);
  for (sw::SweepRow& row : sweep.rows) {
    row.chisq_ref = ref;
    if (c.reps > 0) {
      const auto n = static_cast<std::size_t>(row.key);
      const sw::SimulationResult sim =
          sw::simulate_statistics(*job.model, job.theta0, n, job.r, c.reps, c.seed, c.threads);
      row.mc = sw::distance_from_statistics(sim.statistics, h, job.r, c.seed);
      row.ks = sw::ks_distance_chisq(sim.statistics, job.r);
    }
  }
  std::ostringstream os;
  sw::write_sweep_csv(os, sweep.rows);
  emit(c, os.str());
  std::cerr << "log-log slope " << sweep.slope << "\n";
  return 0;
}

int run_dim_sweep(const RunConfig& c) {
  const sw::TestFunction h = load_h(c.h);
  sw::DimensionSweepOptions o;
  o.n = c.n > 0 ? c.n : 2000;
  o.reps = c.reps > 0 ? c.reps : 10000;
  o.simulate = !c.bound_only;
  o.master_seed = c.seed;
  o.threads = c.threads;
  o.caps = parse_law(c.covariates) == sw::CovariateLaw::rademacher ? sw::MomentCaps::rademacher()
                                                                    : sw::MomentCaps::standard_normal();
  const std::vector<int> grid = c.d_grid.empty() ? std::vector<int>{1, 2, 3, 4} : c.d_grid;
  std::ostringstream os;
  sw::write_sweep_csv(os, sw::dimension_sweep(grid, h, o));
  emit(c, os.str());
  return 0;
}

int run_verify(const RunConfig& c) {
  sw::AcceptanceOptions o;
  o.only = c.only;
  o.seed = c.seed;
  o.threads = c.threads;
  const auto results = sw::run_acceptance(o);
  sw::print_results(std::cout, results);
  for (const auto& r : results)
    if (!r.passed) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explicit-constant bounds for the chi-square approximation of -2 log Lambda"};
  app.set_help_flag("--help", "print this help");
  app.set_config("--config", "", "flat key=value configuration file");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig c;
  app.add_option("--model", c.model, "exponential | normal | logistic")->capture_default_str();
  app.add_option("--theta0", c.theta0, "null parameter, comma separated")->delimiter(',');
  app.add_option("--n", c.n, "sample size");
  app.add_option("--r", c.r, "number of tested coordinates (default 1; d for logistic)");
  app.add_option("--h", c.h, "ht | zero | path to a tabulated test function")->capture_default_str();
  app.add_option("--epsilon", c.epsilon, "neighbourhood radius (model default otherwise)");
  app.add_option("--reps", c.reps, "Monte Carlo replicates");
  app.add_option("--seed", c.seed, "master seed")->capture_default_str();
  app.add_option("--threads", c.threads, "worker threads (0: STEIN_WILKS_THREADS or all)");
  app.add_option("--out", c.out, "output file (JSON or CSV)");
  app.add_option("--prefactored", c.prefactored, "exponential corollary reading")->capture_default_str();
  app.add_option("--covariates", c.covariates, "logistic covariates: rademacher | normal")
      ->capture_default_str();
  app.add_option("--n-grid", c.n_grid, "rate-sweep sample sizes")->delimiter(',');
  app.add_option("--d-grid", c.d_grid, "dim-sweep dimensions")->delimiter(',');
  app.add_flag("--no-bound", c.no_bound, "simulate: skip the bound comparison");
  app.add_flag("--bound-only", c.bound_only, "dim-sweep: bound columns only");
  app.add_option("--only", c.only, "verify: criteria to run")->delimiter(',');

  for (const char* name : {"bound", "simulate", "rate-sweep", "dim-sweep", "verify"}) {
    app.add_subcommand(name)->callback([&c, name] { c.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (c.command == "rate-sweep" && c.n_grid.empty()) {
    c.n_grid = {1e4, 1e5, 1e6, 1e7, 1e8, 1e9, 1e10};
  }

  try {
    if (c.command == "bound") return run_bound(c);
    if (c.command == "simulate") return run_simulate(c);
    if (c.command == "rate-sweep") return run_rate_sweep(c);
    if (c.command == "dim-sweep") return run_dim_sweep(c);
    return run_verify(c);
  } catch (const sw::Error& e) {
    std::cerr << "error [" << e.name() << "]: " << e.what() << "\n";
    return e.kind() == sw::ErrorKind::config ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
