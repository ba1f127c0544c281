#include "stein_wilks/acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "stein_wilks/bound.hpp"
#include "stein_wilks/fisher.hpp"
#include "stein_wilks/kernels.hpp"
#include "stein_wilks/lrt.hpp"
#include "stein_wilks/mc.hpp"
#include "stein_wilks/models.hpp"
#include "stein_wilks/moments.hpp"
#include "stein_wilks/parallel.hpp"
#include "stein_wilks/report.hpp"
#include "stein_wilks/stats.hpp"

namespace stein_wilks {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t p = 1;
  while (e--) p *= b;
  return p;
}

using Index4 = std::array<std::size_t, 4>;

// Running means for every index tuple of a (dim, rank) table, flat in
// lexicographic order with the last index fastest.
struct TableAcc {
  std::size_t dim = 0, rank = 0;
  std::vector<RunningStats> s;

  TableAcc() = default;
  TableAcc(std::size_t d, std::size_t k) : dim(d), rank(k), s(ipow(d, k)) {}

  template <class Fn>
  void add(Fn&& fn) {
    Index4 idx{};
    for (std::size_t flat = 0; flat < s.size(); ++flat) {
      std::size_t rem = flat;
      for (std::size_t p = rank; p-- > 0;) {
        idx[p] = rem % dim;
        rem /= dim;
      }
      s[flat].add(fn(idx));
    }
  }

  void merge(const TableAcc& o) {
    for (std::size_t i = 0; i < s.size(); ++i) s[i].merge(o.s[i]);
  }

  const RunningStats& at(std::span<const std::size_t> idx) const {
    std::size_t flat = 0;
    for (std::size_t i : idx) flat = flat * dim + i;
    return s[flat];
  }
};

using AccMap = std::map<std::string, TableAcc>;

AccMap qt_accumulators(std::size_t d) {
  AccMap m;
  for (const auto& [name, rank] : std::vector<std::pair<std::string, std::size_t>>{
           {"q2", 1}, {"eq2", 2}, {"eq6", 1}, {"eq_triple", 3}, {"eq_quad", 4}, {"var_hess", 2},
           {"t6", 2}, {"t4_cond", 2}, {"m2_cond", 3}, {"m4_cond", 3}}) {
    m.emplace(name, TableAcc(d, rank));
  }
  return m;
}

AccMap w_accumulators(std::size_t d) {
  AccMap m;
  for (const auto& [name, rank] : std::vector<std::pair<std::string, std::size_t>>{
           {"abs1", 1}, {"cross2", 2}, {"abs3", 3}, {"abs5", 4}, {"w2", 1}, {"zabs", 1},
           {"zabs_sq", 2}}) {
    m.emplace(name, TableAcc(d, rank));
  }
  return m;
}

void merge_into(AccMap& a, const AccMap& b) {
  for (auto& [name, acc] : a) acc.merge(b.at(name));
}

// Moment draws for one model (full or null): Q, T, M and the acceptance event.
void add_qt(AccMap& acc, const Vector& Q, const Matrix& T, const std::vector<double>& M,
            const Matrix& H, double eps) {
  const std::size_t d = static_cast<std::size_t>(Q.size());
  const auto q = [&](std::size_t i) { return Q(static_cast<Eigen::Index>(i)); };
  const auto t = [&](std::size_t i, std::size_t j) {
    return T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  const bool accepted = Q.lpNorm<Eigen::Infinity>() < eps;
  acc["q2"].add([&](const Index4& i) { return q(i[0]) * q(i[0]); });
  acc["eq2"].add([&](const Index4& i) { return std::pow(q(i[0]) * q(i[1]), 2); });
  acc["eq6"].add([&](const Index4& i) { return std::pow(q(i[0]), 6); });
  acc["eq_triple"].add([&](const Index4& i) { return std::pow(q(i[0]) * q(i[1]) * q(i[2]), 2); });
  acc["eq_quad"].add(
      [&](const Index4& i) { return std::pow(q(i[0]) * q(i[1]) * q(i[2]) * q(i[3]), 2); });
  acc["var_hess"].add([&](const Index4& i) {
    return std::pow(H(static_cast<Eigen::Index>(i[0]), static_cast<Eigen::Index>(i[1])), 2);
  });
  acc["t6"].add([&](const Index4& i) { return std::pow(t(i[0], i[1]), 6); });
  if (accepted) {
    acc["t4_cond"].add([&](const Index4& i) { return std::pow(t(i[0], i[1]), 4); });
    acc["m2_cond"].add([&](const Index4& i) { return std::pow(M[(i[0] * d + i[1]) * d + i[2]], 2); });
    acc["m4_cond"].add([&](const Index4& i) { return std::pow(M[(i[0] * d + i[1]) * d + i[2]], 4); });
  }
}

void compare_table(const MomentTable& table, const TableAcc& acc, bool abs_of_mean,
                   std::vector<MomentCheck>& out) {
  table.for_each([&](std::span<const std::size_t> idx, const MomentValue& v) {
    if (v.source != MomentSource::analytic) return;
    const RunningStats& s = acc.at(idx);
    MomentCheck c;
    c.table = table.name();
    c.index.assign(idx.begin(), idx.end());
    c.analytic = v.value;
    c.upper_bound = v.upper_bound;
    c.mc = abs_of_mean ? std::abs(s.mean()) : s.mean();
    c.stderr_ = s.stderr_of_mean();
    const double slack = 5.0 * c.stderr_ + 1e-12 * std::abs(c.analytic);
    c.passed = c.upper_bound ? c.mc <= c.analytic + slack : std::abs(c.mc - c.analytic) <= slack;
    out.push_back(std::move(c));
  });
}

void compare_qt(const QTMomentSet& q, const AccMap& acc, const std::string& prefix,
                std::vector<MomentCheck>& out) {
  const std::size_t start = out.size();
  for (const MomentTable* t : {&q.q2, &q.eq2, &q.eq6, &q.eq_triple, &q.eq_quad, &q.var_hess, &q.t6,
                               &q.t4_cond, &q.m2_cond, &q.m4_cond}) {
    compare_table(*t, acc.at(t->name()), false, out);
  }
  for (std::size_t i = start; i < out.size(); ++i) out[i].table = prefix + out[i].table;
}

}  // namespace

std::vector<MomentCheck> check_moment_oracle(const ParametricModel& model, const Vector& theta0,
                                             int r, std::size_t n, double eps, std::size_t draws,
                                             std::uint64_t seed, int threads) {
  const OracleMoments oracle = model.moment_oracle(theta0, r, n, eps, OracleOptions{});
  const int d = model.dim();
  const int f = d - r;
  const auto du = static_cast<std::size_t>(d), fu = static_cast<std::size_t>(f);
  const Matrix info = model.fisher_info(theta0);
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(info);
  const Matrix root = eig.operatorSqrt();
  const Matrix inv_root = eig.operatorInverseSqrt();
  const double N = static_cast<double>(n);

  struct Block {
    AccMap full, res, w;
  };
  std::vector<Block> blocks(block_count(draws));
  parallel_replicates(
      blocks.size(), threads, [] { return Dataset(); },
      [&](std::size_t b, Dataset& buf) {
        Block& blk = blocks[b];
        blk.full = qt_accumulators(du);
        blk.res = qt_accumulators(fu);
        blk.w = w_accumulators(du);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> M(ipow(du, 3)), Mr(ipow(fu, 3));
        Vector z(d);
        const std::size_t end = std::min(draws, (b + 1) * kBlockSize);
        for (std::size_t i = b * kBlockSize; i < end; ++i) {
          Rng rng(replicate_seed(seed, i));
          model.sample_into(theta0, n, rng, buf);
          for (int j = 0; j < d; ++j) z(j) = gauss(rng);

          const Matrix T = model.total_hessian(buf, theta0) + N * info;
          // One observation per draw for the per-observation moments.
          const Matrix H = model.hessian(buf.row(0), theta0) + info;
          const Vector Y = model.score(buf.row(0), theta0);
          for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
              for (int l = 0; l < d; ++l)
                M[(j * du + k) * du + l] = model.dominating_function(buf, theta0, eps, j, k, l, 0, false);
          const Vector Q = model.fit(buf, 0, theta0) - theta0;
          add_qt(blk.full, Q, T, M, H, eps);
          if (f > 0) {
            for (int j = 0; j < f; ++j)
              for (int k = 0; k < f; ++k)
                for (int l = 0; l < f; ++l)
                  Mr[(j * fu + k) * fu + l] = model.dominating_function(buf, theta0, eps, j, k, l, r, true);
            const Vector Qr = (model.fit(buf, r, theta0) - theta0).tail(f);
            add_qt(blk.res, Qr, T.bottomRightCorner(f, f), Mr, H.bottomRightCorner(f, f), eps);
          }

          const Vector W = root * z;
          const Vector V = inv_root * z;
          auto y = [&](std::size_t j) { return Y(static_cast<Eigen::Index>(j)); };
          blk.w["abs1"].add([&](const Index4& i) { return std::abs(y(i[0])); });
          blk.w["cross2"].add([&](const Index4& i) { return y(i[0]) * y(i[1]); });
          blk.w["abs3"].add([&](const Index4& i) { return std::abs(y(i[0]) * y(i[1]) * y(i[2])); });
          blk.w["abs5"].add([&](const Index4& i) {
            return std::abs(y(i[0]) * y(i[1]) * y(i[2])) * y(i[3]) * y(i[3]);
          });
          blk.w["w2"].add([&](const Index4& i) { return std::pow(W(static_cast<Eigen::Index>(i[0])), 2); });
          blk.w["zabs"].add([&](const Index4& i) { return std::abs(V(static_cast<Eigen::Index>(i[0]))); });
          blk.w["zabs_sq"].add([&](const Index4& i) {
            return std::abs(V(static_cast<Eigen::Index>(i[0]))) *
                   std::pow(z(static_cast<Eigen::Index>(i[1])), 2);
          });
        }
      });

  AccMap full = qt_accumulators(du), res = qt_accumulators(fu), w = w_accumulators(du);
  for (const Block& blk : blocks) {
    merge_into(full, blk.full);
    if (f > 0) merge_into(res, blk.res);
    merge_into(w, blk.w);
  }

  std::vector<MomentCheck> out;
  compare_qt(oracle.full, full, "", out);
  if (oracle.restricted) compare_qt(*oracle.restricted, res, "restricted.", out);
  const WMomentSet& ws = oracle.w;
  for (const MomentTable* t : {&ws.abs1, &ws.abs3, &ws.abs5, &ws.w2, &ws.zabs, &ws.zabs_sq}) {
    compare_table(*t, w.at(t->name()), false, out);
  }
  compare_table(ws.cross2, w.at("cross2"), true, out);
  return out;
}

namespace {

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

CriterionResult paper_reproduction() {
  CriterionResult res{1, "paper numeric reproduction (exponential, theta0=3, n=1e5)"};
  const auto t0 = Clock::now();
  const ExponentialModel model;
  const BoundBreakdown b = assemble_bound(model, vec({3.0}), 100000, 1, TestFunction::ht());
  res.seconds = seconds_since(t0);
  res.passed = b.total >= 1.206 && b.total <= 1.226 && std::abs(b.k1_term - 0.008) <= 0.001 &&
               b.r_term <= 0.0041 && b.k2_term <= 1.205 && res.seconds < 1.0;
  std::ostringstream os;
  os << "total=" << fmt("%.4f", b.total) << " r=" << fmt("%.5f", b.r_term)
     << " k1=" << fmt("%.5f", b.k1_term) << " k2=" << fmt("%.4f", b.k2_term);
  res.detail = os.str();
  return res;
}

CriterionResult schur_identity(std::uint64_t seed) {
  CriterionResult res{2, "Schur identity on 1000 random SPD matrices"};
  const auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  int tested = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = 1 + static_cast<int>(rng() % 20);
    const int r = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(d));
    Matrix G(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) G(i, j) = gauss(rng);
    const Matrix info = G * G.transpose() / d + 0.5 * Matrix::Identity(d, d);
    Vector xi(r), eta(d - r);
    for (int i = 0; i < r; ++i) xi(i) = gauss(rng);
    for (int i = 0; i < d - r; ++i) eta(i) = gauss(rng);
    const FisherBlocks blocks = partition_fisher(info, r);
    const QuadraticForms g = quadratic_form_g(xi, eta, blocks);
    Vector w(d);
    w << xi, eta;
    const double scale = std::max(std::abs(g.schur), w.dot(blocks.full_inverse * w));
    worst = std::max(worst, std::abs(g.full - g.schur) / scale);
    ++tested;
  }
  res.seconds = seconds_since(t0);
  res.passed = tested == 1000 && worst <= 1e-10 && res.seconds < 5.0;
  res.detail = "max relative gap " + fmt("%.2e", worst);
  return res;
}

struct HelperCheck {
  std::string name;
  double analytic, mc, se;
};

// Analytic moment helpers against 1e6 direct draws.
std::vector<HelperCheck> helper_checks(std::uint64_t seed) {
  constexpr std::size_t draws = 1000000;
  std::vector<HelperCheck> out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0 / 3.0);

  std::array<RunningStats, 4> gam, chi9, chi10;
  std::array<RunningStats, 6> half;
  std::array<RunningStats, 8> nrm;
  for (std::size_t i = 0; i < draws; ++i) {
    double s = 0.0;
    for (int k = 0; k < 10; ++k) s += expo(rng);
    const double q = s / 10.0 - 3.0;
    double g9 = 0.0;
    for (int k = 0; k < 9; ++k) g9 += std::pow(gauss(rng), 2);
    const double g10 = g9 + std::pow(gauss(rng), 2);
    const double z = gauss(rng);
    const double x = std::sqrt(2.0) * gauss(rng);
    for (int a = 0; a < 4; ++a) {
      gam[a].add(std::pow(q, 2 * (a + 1)));
      chi9[a].add(std::pow(g9 - 10.0, 2 * (a + 1)));
      chi10[a].add(std::pow(g10 - 10.0, 2 * (a + 1)));
    }
    for (int k = 0; k < 6; ++k) half[k].add(std::pow(std::abs(z), k + 1));
    for (int k = 0; k < 8; ++k) nrm[k].add(std::pow(x, k + 1));
  }
  for (int a = 0; a < 4; ++a) {
    const int k = 2 * (a + 1);
    out.push_back({"gamma_mean_central_moment(10,3," + std::to_string(k) + ")",
                   gamma_mean_central_moment(10, 3.0, k), gam[a].mean(), gam[a].stderr_of_mean()});
    out.push_back({"chisq_central_moment(9," + std::to_string(k) + ",10)",
                   chisq_central_moment(9, k, 10.0), chi9[a].mean(), chi9[a].stderr_of_mean()});
    out.push_back({"chisq_central_moment(10," + std::to_string(k) + ",10)",
                   chisq_central_moment(10, k, 10.0), chi10[a].mean(), chi10[a].stderr_of_mean()});
  }
  for (int k = 1; k <= 6; ++k) {
    out.push_back({"halfnormal_abs_moment(" + std::to_string(k) + ")", halfnormal_abs_moment(k),
                   half[k - 1].mean(), half[k - 1].stderr_of_mean()});
  }
  for (int k = 1; k <= 8; ++k) {
    out.push_back({"normal_central_moment(2," + std::to_string(k) + ")",
                   normal_central_moment(2.0, k), nrm[k - 1].mean(), nrm[k - 1].stderr_of_mean()});
  }
  return out;
}

CriterionResult moment_oracles(std::uint64_t seed, int threads) {
  CriterionResult res{3, "moment oracles agree with 1e6-draw Monte Carlo"};
  const auto t0 = Clock::now();
  std::size_t total = 0, failed = 0;
  std::string first_failure;

  for (const HelperCheck& h : helper_checks(seed)) {
    ++total;
    if (std::abs(h.mc - h.analytic) > 5.0 * h.se + 1e-12 * std::abs(h.analytic)) {
      ++failed;
      if (first_failure.empty()) first_failure = h.name;
    }
  }
  auto run = [&](const ParametricModel& model, const Vector& theta0, int r, std::size_t n,
                 double eps) {
    for (const MomentCheck& c :
         check_moment_oracle(model, theta0, r, n, eps, 1000000, seed + 1, threads)) {
      ++total;
      if (!c.passed) {
        ++failed;
        if (first_failure.empty()) first_failure = model.id() + "." + c.table;
      }
    }
  };
  run(ExponentialModel(), vec({3.0}), 1, 10, 1.5);
  run(NormalModel(), vec({0.0, 1.0}), 1, 10, 0.5);

  res.seconds = seconds_since(t0);
  res.passed = failed == 0 && res.seconds < 60.0;
  res.detail = std::to_string(total - failed) + "/" + std::to_string(total) + " entries within 5 se";
  if (!first_failure.empty()) res.detail += "; first failure " + first_failure;
  return res;
}

CriterionResult bound_validity(std::uint64_t seed, int threads) {
  CriterionResult res{4, "bound validity and monotone MC distance (exponential)"};
  const auto t0 = Clock::now();
  const ExponentialModel model;
  const Vector theta0 = vec({3.0});
  const TestFunction h = TestFunction::ht();
  bool covered = true;
  std::vector<double> means;
  std::ostringstream os;
  for (std::size_t n : {50, 500, 5000}) {
    const MCEstimate e = estimate_distance(model, theta0, n, 1, h, 200000, seed, threads);
    const double bound = assemble_bound(model, theta0, n, 1, h).total;
    covered = covered && e.mean + 3.0 * e.stderr_ <= bound;
    means.push_back(e.mean);
    os << "n=" << n << ": " << fmt("%.2e", e.mean) << "+-" << fmt("%.1e", e.stderr_)
       << " <= " << fmt("%.3g", bound) << "; ";
  }
  const bool monotone = means[0] > means[1] && means[1] > means[2];
  res.seconds = seconds_since(t0);
  res.passed = covered && monotone && res.seconds < 600.0;
  os << (monotone ? "monotone" : "not monotone");
  res.detail = os.str();
  return res;
}

CriterionResult rate_claim() {
  CriterionResult res{5, "O(n^-1/2) rate of the exponential bound"};
  const auto t0 = Clock::now();
  const ExponentialModel model;
  const Vector theta0 = vec({3.0});
  const TestFunction h = TestFunction::ht();
  const std::vector<std::size_t> grid = {10000ULL,     100000ULL,     1000000ULL,    10000000ULL,
                                         100000000ULL, 1000000000ULL, 10000000000ULL};
  const RateSweep sweep = rate_sweep(model, theta0, 1, h, grid);
  bool ratios_ok = true;
  double worst_ratio = 0.0;
  for (std::size_t i = 2; i + 2 < grid.size(); ++i) {
    const double ratio = sweep.rows[i + 2].bound_total / sweep.rows[i].bound_total;
    ratios_ok = ratios_ok && ratio >= 0.085 && ratio <= 0.115;
    worst_ratio = std::max(worst_ratio, std::abs(ratio - 0.1));
  }
  res.seconds = seconds_since(t0);
  res.passed = sweep.slope >= -0.55 && sweep.slope <= -0.45 && ratios_ok && res.seconds < 1.0;
  res.detail = "slope " + fmt("%.4f", sweep.slope) + ", max |ratio - 0.1| " + fmt("%.4f", worst_ratio);
  return res;
}

CriterionResult normal_corollary() {
  CriterionResult res{6, "normal corollary re-evaluation and constants"};
  const auto t0 = Clock::now();
  const TestFunction h = TestFunction::ht();
  const double s2 = 1.0, n = 1e6;
  const double sigma = std::sqrt(s2);
  const double got = normal_corollary_bound(s2, n, h);
  const double expected =
      47456.0 * s2 * (h.norm_h2 + h.norm_h1) * std::max(1.0, std::pow(sigma, -9.0)) /
          std::sqrt(n * std::numbers::pi) +
      418433114.0 * h.norm_h1 * std::max(1.0, std::pow(sigma, 4.0)) / std::sqrt(n) +
      8.0 * (h.norm_h / n) * (4.0 + 1.0 / s2);
  const double rel = std::abs(got - expected) / std::abs(expected);
  const bool constants = NormalCorollaryConstants::r_coefficient == 47456.0 &&
                         NormalCorollaryConstants::k_coefficient == 418433114.0 &&
                         NormalCorollaryConstants::h_coefficient == 8.0;
  res.seconds = seconds_since(t0);
  res.passed = rel <= 1e-9 && constants;
  res.detail = "bound " + fmt("%.6g", got) + ", relative gap " + fmt("%.1e", rel);
  return res;
}

CriterionResult wilks_sanity(std::uint64_t seed, int threads) {
  CriterionResult res{7, "Wilks sanity: KS distance to chi^2_1 (exponential, n=5000)"};
  const auto t0 = Clock::now();
  const double ks = wilks_ks_check(ExponentialModel(), vec({3.0}), 5000, 1, 100000, seed, threads);
  res.seconds = seconds_since(t0);
  res.passed = ks <= 0.01 && res.seconds < 300.0;
  res.detail = "KS " + fmt("%.5f", ks);
  return res;
}

CriterionResult logistic_checks(std::uint64_t seed, int threads) {
  CriterionResult res{8, "logistic: Newton MLE, separation, d-scaling, third derivatives"};
  const auto t0 = Clock::now();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Newton stationarity.
  double worst_grad = 0.0;
  bool fits_ok = true;
  for (CovariateLaw law : {CovariateLaw::rademacher, CovariateLaw::normal}) {
    for (int d = 1; d <= 8; ++d) {
      const LogisticModel model(d, law);
      Vector theta0(d);
      for (int j = 0; j < d; ++j) theta0(j) = unif(rng);
      const Dataset data = model.sample(theta0, 2000, rng());
      try {
        const Vector fit = model.fit(data, 0, theta0);
        worst_grad = std::max(worst_grad, model.total_score(data, fit).lpNorm<Eigen::Infinity>());
      } catch (const FitFailure&) {
        fits_ok = false;
      }
    }
  }
  const bool newton_ok = fits_ok && worst_grad <= 1e-8;

  // Separable: y = 1 exactly when x_1 = 1.
  bool separation_ok = false;
  {
    const LogisticModel model(2);
    std::vector<double> rows;
    for (int rep = 0; rep < 10; ++rep)
      for (double x1 : {-1.0, 1.0})
        for (double x2 : {-1.0, 1.0}) rows.insert(rows.end(), {x1, x2, x1 > 0 ? 1.0 : 0.0});
    const Dataset data(3, rows);
    try {
      model.fit(data, 0, Vector::Zero(2));
    } catch (const Separation&) {
      separation_ok = true;
    } catch (const Error&) {
    }
  }

  // Doubling d scales the coefficient by at most 2^7 (+10%).
  double worst_scale = 0.0;
  const std::vector<int> d_grid = {1, 2, 4, 8, 16};
  DimensionSweepOptions sweep_options;
  sweep_options.simulate = false;
  const std::vector<SweepRow> rows = dimension_sweep(d_grid, TestFunction::ht(), sweep_options);
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    worst_scale = std::max(worst_scale, rows[i + 1].bound_total / rows[i].bound_total);
  }
  for (int d : {2, 4, 8}) {
    for (int r : {1, d / 2}) {
      const MomentCaps caps = MomentCaps::standard_normal();
      const double a = logistic_bound_scaling(d, r, 2000, caps).coefficient;
      const double b = logistic_bound_scaling(2 * d, 2 * r, 2000, caps).coefficient;
      worst_scale = std::max(worst_scale, b / a);
    }
  }
  const bool scaling_ok = worst_scale <= 128.0 * 1.1;

  // |d^3 l| <= |x_j x_k x_l| and agreement with central differences of the Hessian.
  double worst_excess = 0.0, worst_fd = 0.0;
  for (int point = 0; point < 100; ++point) {
    const int d = 1 + static_cast<int>(rng() % 5);
    const LogisticModel model(d, CovariateLaw::normal);
    Vector theta(d);
    std::vector<double> row(static_cast<std::size_t>(d) + 1);
    for (int j = 0; j < d; ++j) {
      theta(j) = 2.0 * gauss(rng);
      row[static_cast<std::size_t>(j)] = gauss(rng);
    }
    row.back() = rng() & 1U ? 1.0 : 0.0;
    const Dataset one(static_cast<std::size_t>(d) + 1, row);
    const double step = 1e-4;
    for (int l = 0; l < d; ++l) {
      Vector up = theta, down = theta;
      up(l) += step;
      down(l) -= step;
      const Matrix fd = (model.hessian(one.row(0), up) - model.hessian(one.row(0), down)) / (2 * step);
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          const double v = model.third_derivative(one, theta, j, k, l);
          const double cap = std::abs(row[static_cast<std::size_t>(j)] *
                                      row[static_cast<std::size_t>(k)] * row[static_cast<std::size_t>(l)]);
          worst_excess = std::max(worst_excess, std::abs(v) - cap);
          worst_fd = std::max(worst_fd, std::abs(v - fd(j, k)));
        }
    }
  }
  const bool third_ok = worst_excess <= 1e-5 && worst_fd <= 1e-5;
  (void)threads;

  res.seconds = seconds_since(t0);
  res.passed = newton_ok && separation_ok && scaling_ok && third_ok;
  std::ostringstream os;
  os << "max |grad| " << fmt("%.1e", worst_grad) << (separation_ok ? ", separation raised" : ", no separation")
     << ", max ratio " << fmt("%.2f", worst_scale) << ", third-derivative excess "
     << fmt("%.1e", worst_excess) << ", fd gap " << fmt("%.1e", worst_fd);
  res.detail = os.str();
  return res;
}

// Machine-readable outputs of the simulate and sweep paths.
std::string determinism_snapshot(std::uint64_t seed) {
  std::ostringstream os;
  const TestFunction h = TestFunction::ht();
  const ExponentialModel expo;
  const MCEstimate e = estimate_distance(expo, vec({3.0}), 200, 1, h, 20000, seed);
  os << simulation_to_json(e, assemble_bound(expo, vec({3.0}), 200, 1, h)).dump() << '\n';
  const NormalModel normal;
  os << estimate_to_json(estimate_distance(normal, vec({0.0, 1.0}), 100, 1, h, 10000, seed)).dump()
     << '\n';
  DimensionSweepOptions options;
  options.n = 400;
  options.reps = 10000;
  options.master_seed = seed;
  const std::vector<int> d_grid = {1, 2};
  write_sweep_csv(os, dimension_sweep(d_grid, h, options));
  return os.str();
}

CriterionResult determinism(std::uint64_t seed) {
  CriterionResult res{9, "determinism across STEIN_WILKS_THREADS values"};
  const auto t0 = Clock::now();
  const char* previous = std::getenv("STEIN_WILKS_THREADS");
  const std::optional<std::string> saved = previous ? std::optional<std::string>(previous) : std::nullopt;
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "2", "4"}) {
    setenv("STEIN_WILKS_THREADS", threads, 1);
    outputs.push_back(determinism_snapshot(seed));
  }
  if (saved) {
    setenv("STEIN_WILKS_THREADS", saved->c_str(), 1);
  } else {
    unsetenv("STEIN_WILKS_THREADS");
  }
  const bool same = std::all_of(outputs.begin(), outputs.end(),
                                [&](const std::string& s) { return s == outputs.front(); });
  res.seconds = seconds_since(t0);
  res.passed = same;
  res.detail = same ? "byte-identical at 1, 2 and 4 workers" : "outputs differ between worker counts";
  return res;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  const std::vector<std::pair<int, std::function<CriterionResult()>>> all = {
      {1, [&] { return paper_reproduction(); }},
      {2, [&] { return schur_identity(options.seed); }},
      {3, [&] { return moment_oracles(options.seed, options.threads); }},
      {4, [&] { return bound_validity(options.seed, options.threads); }},
      {5, [&] { return rate_claim(); }},
      {6, [&] { return normal_corollary(); }},
      {7, [&] { return wilks_sanity(options.seed, options.threads); }},
      {8, [&] { return logistic_checks(options.seed, options.threads); }},
      {9, [&] { return determinism(options.seed); }},
  };
  std::vector<CriterionResult> out;
  for (const auto& [id, fn] : all) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      CriterionResult r{id, "criterion " + std::to_string(id)};
      r.detail = std::string("error: ") + e.what();
      out.push_back(r);
    }
  }
  return out;
}

void print_results(std::ostream& out, const std::vector<CriterionResult>& results) {
  for (const CriterionResult& r : results) {
    char head[32];
    std::snprintf(head, sizeof head, "%s  %d  ", r.passed ? "PASS" : "FAIL", r.id);
    out << head << r.name << "  (" << r.detail << ")  [" << fmt("%.2f", r.seconds) << " s]\n";
  }
}

}  // namespace stein_wilks
