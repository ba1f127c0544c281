#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "stein_wilks/models.hpp"
#include "stein_wilks/parallel.hpp"
#include "stein_wilks/stats.hpp"

namespace stein_wilks {

double logistic_psi(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double logistic_psi1(double t) {
  const double p = logistic_psi(t);
  return p * (1.0 - p);
}

double logistic_psi2(double t) {
  const double p = logistic_psi(t);
  return p * (1.0 - p) * (1.0 - 2.0 * p);
}

namespace {

constexpr int kMaxEnumerationDim = 16;

// log(1 + e^t) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double linear_predictor(std::span<const double> rec, const Vector& theta) {
  double eta = 0.0;
  for (Eigen::Index j = 0; j < theta.size(); ++j) eta += theta(j) * rec[static_cast<std::size_t>(j)];
  return eta;
}

}  // namespace

LogisticModel::LogisticModel(int d, CovariateLaw law) : d_(d), law_(law) {
  if (d < 1) throw ConfigError("logistic: d must be >= 1");
}

ModelCapabilities LogisticModel::capabilities() const { return {true, false, false}; }

bool LogisticModel::in_domain(const Vector& theta) const {
  return theta.size() == d_ && theta.allFinite();
}

void LogisticModel::validate_data(const Dataset& data) const {
  ParametricModel::validate_data(data);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double y = data.row(i)[static_cast<std::size_t>(d_)];
    if (y != 0.0 && y != 1.0) throw ConfigError("logistic: responses must be 0 or 1");
  }
}

double LogisticModel::log_density(std::span<const double> x, const Vector& theta) const {
  const double eta = linear_predictor(x, theta);
  return x[static_cast<std::size_t>(d_)] * eta - softplus(eta);
}

Vector LogisticModel::score(std::span<const double> x, const Vector& theta) const {
  const double resid = x[static_cast<std::size_t>(d_)] - logistic_psi(linear_predictor(x, theta));
  Vector s(d_);
  for (int j = 0; j < d_; ++j) s(j) = resid * x[static_cast<std::size_t>(j)];
  return s;
}

Matrix LogisticModel::hessian(std::span<const double> x, const Vector& theta) const {
  const double w = logistic_psi1(linear_predictor(x, theta));
  const Eigen::Map<const Vector> xv(x.data(), d_);
  return -w * xv * xv.transpose();
}

Matrix LogisticModel::fisher_info(const Vector& theta) const {
  if (!in_domain(theta)) throw DimensionMismatch("logistic: theta has the wrong length");
  if (theta.isZero(0.0)) return 0.25 * Matrix::Identity(d_, d_);
  if (law_ == CovariateLaw::rademacher) {
    if (d_ > kMaxEnumerationDim) {
      throw ConfigError("logistic: exact Fisher information needs d <= 16 for theta != 0");
    }
    Matrix info = Matrix::Zero(d_, d_);
    Vector x(d_);
    const std::size_t patterns = std::size_t{1} << d_;
    for (std::size_t p = 0; p < patterns; ++p) {
      for (int j = 0; j < d_; ++j) x(j) = (p >> j) & 1U ? 1.0 : -1.0;
      info += logistic_psi1(theta.dot(x)) * x * x.transpose();
    }
    return info / static_cast<double>(patterns);
  }
  // X standard normal: along u = theta/|theta| the weight is psi'(|theta| Z).
  const double s = theta.norm();
  const Vector u = theta / s;
  using boost::math::quadrature::gauss_kronrod;
  const double inf = std::numeric_limits<double>::infinity();
  const double c = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const double alpha = gauss_kronrod<double, 61>::integrate(
      [&](double z) { return logistic_psi1(s * z) * c * std::exp(-0.5 * z * z); }, -inf, inf, 15,
      1e-14);
  const double beta = gauss_kronrod<double, 61>::integrate(
      [&](double z) { return logistic_psi1(s * z) * z * z * c * std::exp(-0.5 * z * z); }, -inf,
      inf, 15, 1e-14);
  return alpha * (Matrix::Identity(d_, d_) - u * u.transpose()) + beta * u * u.transpose();
}

double LogisticModel::third_derivative(const Dataset& data, const Vector& theta, int j, int k,
                                       int l) const {
  double s = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto rec = data.row(i);
    s -= logistic_psi2(linear_predictor(rec, theta)) * rec[j] * rec[k] * rec[l];
  }
  return s;
}

double LogisticModel::dominating_function(const Dataset& data, const Vector&, double, int j,
                                          int k, int l, int r, bool restricted) const {
  const int off = restricted ? r : 0;
  double s = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto rec = data.row(i);
    s += std::abs(rec[j + off] * rec[k + off] * rec[l + off]);
  }
  return s;
}

double LogisticModel::epsilon_default(const Vector&) const { return 1.0; }

void LogisticModel::sample_into(const Vector& theta, std::size_t n, Rng& rng, Dataset& out) const {
  const auto t = static_cast<std::size_t>(d_) + 1;
  out.reshape(n, t);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto rec = out.row(i);
    for (int j = 0; j < d_; ++j) {
      rec[j] = law_ == CovariateLaw::rademacher ? (rng() >> 63 ? 1.0 : -1.0) : gauss(rng);
    }
    rec[d_] = unif(rng) < logistic_psi(linear_predictor(rec, theta)) ? 1.0 : 0.0;
  }
}

namespace {

struct FreeState {
  double loglik = 0.0;
  Vector grad;
  Matrix info;  // negative Hessian over the free block
};

FreeState evaluate(const Dataset& data, const Vector& theta, int d, int r) {
  const int f = d - r;
  FreeState st;
  st.grad = Vector::Zero(f);
  st.info = Matrix::Zero(f, f);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto rec = data.row(i);
    const double eta = linear_predictor(rec, theta);
    const double y = rec[static_cast<std::size_t>(d)];
    st.loglik += y * eta - softplus(eta);
    const double resid = y - logistic_psi(eta);
    const double w = logistic_psi1(eta);
    const Eigen::Map<const Vector> xf(rec.data() + r, f);
    st.grad += resid * xf;
    st.info.selfadjointView<Eigen::Lower>().rankUpdate(xf, w);
  }
  st.info = st.info.selfadjointView<Eigen::Lower>();
  return st;
}

// True when theta's free direction weakly separates the responses, which
// rules out a finite maximiser.
bool separation_certificate(const Dataset& data, const Vector& theta, int d, int r) {
  const int f = d - r;
  const Vector u = theta.tail(f);
  const double norm = u.norm();
  if (!(norm > 0.0)) return false;
  double scale = 0.0;
  for (double v : data.values()) scale = std::max(scale, std::abs(v));
  const double tol = 1e-9 * std::max(1.0, scale);
  bool strict = false;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto rec = data.row(i);
    const Eigen::Map<const Vector> xf(rec.data() + r, f);
    const double s = 2.0 * rec[static_cast<std::size_t>(d)] - 1.0;
    const double margin = s * xf.dot(u) / norm;
    if (margin < -tol) return false;
    if (margin > tol) strict = true;
  }
  return strict;
}

}  // namespace

Vector LogisticModel::fit(const Dataset& data, int r, const Vector& null_values,
                          int* iterations) const {
  if (r < 0 || r > d_) throw DimensionMismatch("logistic: r outside [0, d]");
  if (null_values.size() < r) throw DimensionMismatch("logistic: null values shorter than r");
  if (data.arity() != arity()) throw DimensionMismatch("logistic: record arity mismatch");
  if (iterations) *iterations = 0;
  Vector theta = Vector::Zero(d_);
  theta.head(r) = null_values.head(r);
  if (r == d_) return theta;

  constexpr int kMaxIter = 100;
  constexpr int kMaxHalvings = 30;
  constexpr double kTol = 1e-10;
  FreeState st = evaluate(data, theta, d_, r);
  for (int it = 0; it < kMaxIter; ++it) {
    const double gnorm = st.grad.lpNorm<Eigen::Infinity>();
    if (gnorm <= kTol) {
      if (iterations) *iterations = it;
      if (separation_certificate(data, theta, d_, r)) {
        throw Separation("responses are separated by the fitted direction");
      }
      return theta;
    }
    Eigen::LLT<Matrix> llt(st.info);
    if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) {
      if (separation_certificate(data, theta, d_, r)) {
        throw Separation("responses are separated by the fitted direction");
      }
      throw SingularHessian("observed information is singular at iteration " + std::to_string(it));
    }
    const Vector step = llt.solve(st.grad);
    double t = 1.0;
    Vector cand = theta;
    FreeState next;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      cand = theta;
      cand.tail(d_ - r) += t * step;
      next = evaluate(data, cand, d_, r);
      if (next.loglik >= st.loglik || next.grad.lpNorm<Eigen::Infinity>() < gnorm) break;
      t *= 0.5;
    }
    theta = cand;
    st = std::move(next);
    if (theta.lpNorm<Eigen::Infinity>() > 1e6) {
      throw Separation("iterate norm exceeded 1e6");
    }
  }
  if (iterations) *iterations = kMaxIter;
  if (separation_certificate(data, theta, d_, r)) {
    throw Separation("responses are separated by the fitted direction");
  }
  throw MaxIterations(kMaxIter, st.grad.lpNorm<Eigen::Infinity>());
}

// ---- Monte Carlo moment oracle --------------------------------------------

namespace {

// Accumulates one table entry either exactly (weighted sums) or by sampling.
class EntryAcc {
 public:
  // weight >= 0: exact enumeration weight; weight < 0: one sampled draw.
  void add(double v, double weight) {
    if (weight >= 0.0) {
      exact_ += weight * v;
    } else {
      stats_.add(v);
    }
  }
  void merge(const EntryAcc& o) {
    exact_ += o.exact_;
    stats_.merge(o.stats_);
  }
  double mean() const { return stats_.count() ? stats_.mean() : exact_; }
  double stderr_() const { return stats_.stderr_of_mean(); }
  bool sampled() const { return stats_.count() > 0; }
  MomentValue value(bool absolute = false) const {
    const double v = absolute ? std::abs(mean()) : mean();
    return sampled() ? MomentValue::estimated(v, stderr_()) : MomentValue::exact(v);
  }

 private:
  double exact_ = 0.0;
  RunningStats stats_;
};

std::size_t pow_size(std::size_t d, int k) {
  std::size_t s = 1;
  for (int i = 0; i < k; ++i) s *= d;
  return s;
}

// Per-observation quantities: score moments and Var of Hessian entries.
struct ObservationAcc {
  std::size_t d;
  std::vector<EntryAcc> abs1, cross2, abs3, abs5, w2, h1, h2;

  explicit ObservationAcc(std::size_t dim)
      : d(dim),
        abs1(dim),
        cross2(pow_size(dim, 2)),
        abs3(pow_size(dim, 3)),
        abs5(pow_size(dim, 4)),
        w2(dim),
        h1(pow_size(dim, 2)),
        h2(pow_size(dim, 2)) {}

  void add(const Vector& x, double psi1, double resid, double weight) {
    const Vector Y = resid * x;
    for (std::size_t j = 0; j < d; ++j) {
      abs1[j].add(std::abs(Y(j)), weight);
      w2[j].add(Y(j) * Y(j), weight);
      for (std::size_t k = 0; k < d; ++k) {
        const double yjk = Y(j) * Y(k);
        cross2[j * d + k].add(yjk, weight);
        const double hjk = -psi1 * x(j) * x(k);
        h1[j * d + k].add(hjk, weight);
        h2[j * d + k].add(hjk * hjk, weight);
        for (std::size_t l = 0; l < d; ++l) {
          const double yjkl = yjk * Y(l);
          abs3[(j * d + k) * d + l].add(std::abs(yjkl), weight);
          for (std::size_t t = 0; t < d; ++t) {
            abs5[((j * d + k) * d + l) * d + t].add(std::abs(yjkl) * Y(t) * Y(t), weight);
          }
        }
      }
    }
  }

  void merge(const ObservationAcc& o) {
    auto m = [](std::vector<EntryAcc>& a, const std::vector<EntryAcc>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i].merge(b[i]);
    };
    m(abs1, o.abs1);
    m(cross2, o.cross2);
    m(abs3, o.abs3);
    m(abs5, o.abs5);
    m(w2, o.w2);
    m(h1, o.h1);
    m(h2, o.h2);
  }
};

// Replicate-level moments of Q, T and the dominating functions.
struct QTAcc {
  std::size_t d = 0;
  std::vector<RunningStats> q2, eq2, eq6, eq3, eq4, t6, t4c, m2c, m4c;
  std::size_t failed = 0;

  explicit QTAcc(std::size_t dim = 0)
      : d(dim),
        q2(dim),
        eq2(pow_size(dim, 2)),
        eq6(dim),
        eq3(pow_size(dim, 3)),
        eq4(pow_size(dim, 4)),
        t6(pow_size(dim, 2)),
        t4c(pow_size(dim, 2)),
        m2c(pow_size(dim, 3)),
        m4c(pow_size(dim, 3)) {}

  void add(const Vector& Q, const Matrix& T, const std::vector<double>& M, bool accepted) {
    Vector q2v = Q.cwiseProduct(Q);
    for (std::size_t j = 0; j < d; ++j) {
      q2[j].add(q2v(j));
      eq6[j].add(std::pow(q2v(j), 3));
      for (std::size_t k = 0; k < d; ++k) {
        const double a = q2v(j) * q2v(k);
        eq2[j * d + k].add(a);
        t6[j * d + k].add(std::pow(T(j, k), 6));
        if (accepted) t4c[j * d + k].add(std::pow(T(j, k), 4));
        for (std::size_t l = 0; l < d; ++l) {
          const double b = a * q2v(l);
          const std::size_t jkl = (j * d + k) * d + l;
          eq3[jkl].add(b);
          if (accepted) {
            m2c[jkl].add(M[jkl] * M[jkl]);
            m4c[jkl].add(std::pow(M[jkl], 4));
          }
          for (std::size_t s = 0; s < d; ++s) eq4[jkl * d + s].add(b * q2v(s));
        }
      }
    }
  }

  void merge(const QTAcc& o) {
    auto m = [](std::vector<RunningStats>& a, const std::vector<RunningStats>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i].merge(b[i]);
    };
    m(q2, o.q2);
    m(eq2, o.eq2);
    m(eq6, o.eq6);
    m(eq3, o.eq3);
    m(eq4, o.eq4);
    m(t6, o.t6);
    m(t4c, o.t4c);
    m(m2c, o.m2c);
    m(m4c, o.m4c);
    failed += o.failed;
  }
};

void store(MomentTable& t, const std::vector<RunningStats>& acc) {
  std::size_t flat = 0;
  t.fill([&](auto) {
    const auto& a = acc[flat++];
    return MomentValue::estimated(a.mean(), a.stderr_of_mean());
  });
}

// Constant dominating moments (Rademacher: |x_j x_k x_l| = 1, so M = n).
void store_constant(MomentTable& t, double v) { t.fill([&](auto) { return MomentValue::exact(v); }); }

}  // namespace

OracleMoments LogisticModel::moment_oracle(const Vector& theta0, int r, std::size_t n, double eps,
                                           const OracleOptions& options) const {
  if (!in_domain(theta0)) throw DimensionMismatch("logistic: theta0 has the wrong length");
  if (r < 1 || r > d_) throw ConfigError("logistic: r must lie in [1, d]");
  if (n < 2) throw ConfigError("moment oracle needs n >= 2");
  if (!(eps > 0.0)) throw NonpositiveEpsilon(eps);
  if (options.reps < 10000) throw ConfigError("logistic oracle needs reps >= 1e4");
  const auto d = static_cast<std::size_t>(d_);
  const int f = d_ - r;
  const bool rademacher = law_ == CovariateLaw::rademacher;
  if (rademacher && d_ > kMaxEnumerationDim) throw ConfigError("logistic oracle: d <= 16 required");

  OracleMoments out;
  out.epsilon = eps;

  // Per-observation moments.
  ObservationAcc obs(d);
  if (rademacher) {
    const std::size_t patterns = std::size_t{1} << d_;
    const double w = 1.0 / static_cast<double>(patterns);
    Vector x(d_);
    for (std::size_t p = 0; p < patterns; ++p) {
      for (int j = 0; j < d_; ++j) x(j) = (p >> j) & 1U ? 1.0 : -1.0;
      const double eta = theta0.dot(x);
      const double psi = logistic_psi(eta);
      const double psi1 = logistic_psi1(eta);
      obs.add(x, psi1, 1.0 - psi, w * psi);
      obs.add(x, psi1, -psi, w * (1.0 - psi));
    }
  } else {
    const std::size_t draws = 5 * options.reps;
    std::vector<ObservationAcc> blocks(block_count(draws), ObservationAcc(d));
    parallel_replicates(
        blocks.size(), options.threads, [] { return 0; },
        [&](std::size_t b, int&) {
          const std::size_t end = std::min(draws, (b + 1) * kBlockSize);
          std::normal_distribution<double> gauss(0.0, 1.0);
          std::uniform_real_distribution<double> unif(0.0, 1.0);
          Vector x(d_);
          for (std::size_t i = b * kBlockSize; i < end; ++i) {
            Rng rng(replicate_seed(options.seed ^ 0x0b5e7ULL, i));
            for (int j = 0; j < d_; ++j) x(j) = gauss(rng);
            const double eta = theta0.dot(x);
            const double psi = logistic_psi(eta);
            const double y = unif(rng) < psi ? 1.0 : 0.0;
            blocks[b].add(x, logistic_psi1(eta), y - psi, -1.0);
          }
        });
    for (std::size_t b = 1; b < blocks.size(); ++b) blocks[0].merge(blocks[b]);
    obs = std::move(blocks[0]);
  }

  WMomentSet& W = out.w;
  W = WMomentSet(d);
  {
    std::size_t i = 0;
    W.abs1.fill([&](auto) { return obs.abs1[i++].value(); });
    i = 0;
    W.cross2.fill([&](auto) { return obs.cross2[i++].value(true); });
    i = 0;
    W.abs3.fill([&](auto) { return obs.abs3[i++].value(); });
    i = 0;
    W.abs5.fill([&](auto) { return obs.abs5[i++].value(); });
    i = 0;
    W.w2.fill([&](auto) { return obs.w2[i++].value(); });
  }
  const Matrix info = fisher_info(theta0);
  fill_gaussian_moments(W, info);

  MomentTable var_hess("var_hess", d, 2);
  {
    std::size_t i = 0;
    var_hess.fill([&](auto) {
      const EntryAcc& a = obs.h1[i];
      const EntryAcc& b = obs.h2[i];
      ++i;
      const double v = std::max(0.0, b.mean() - a.mean() * a.mean());
      if (!a.sampled()) return MomentValue::exact(v);
      return MomentValue::estimated(v, b.stderr_() + 2.0 * std::abs(a.mean()) * a.stderr_());
    });
  }

  // Replicate-level moments of the fitted estimators.
  const double N = static_cast<double>(n);
  const Matrix nI = N * info;
  struct Pair {
    QTAcc full, res;
  };
  std::vector<Pair> blocks(block_count(options.reps));
  parallel_replicates(
      blocks.size(), options.threads, [] { return Dataset(); },
      [&](std::size_t b, Dataset& buf) {
        Pair& acc = blocks[b];
        acc.full = QTAcc(d);
        acc.res = QTAcc(static_cast<std::size_t>(f));
        const std::size_t end = std::min(options.reps, (b + 1) * kBlockSize);
        std::vector<double> M(pow_size(d, 3)), Mr(pow_size(static_cast<std::size_t>(f), 3));
        for (std::size_t i = b * kBlockSize; i < end; ++i) {
          Rng rng(replicate_seed(options.seed, i));
          sample_into(theta0, n, rng, buf);
          const Matrix T = total_hessian(buf, theta0) + nI;
          if (!rademacher) {
            for (int j = 0; j < d_; ++j)
              for (int k = 0; k < d_; ++k)
                for (int l = 0; l < d_; ++l)
                  M[(j * d + k) * d + l] = dominating_function(buf, theta0, eps, j, k, l, 0, false);
          }
          try {
            const Vector Q = fit(buf, 0, theta0) - theta0;
            acc.full.add(Q, T, M, Q.lpNorm<Eigen::Infinity>() < eps);
          } catch (const FitFailure&) {
            ++acc.full.failed;
          }
          if (f > 0) {
            const auto fs = static_cast<std::size_t>(f);
            if (!rademacher) {
              for (int j = 0; j < f; ++j)
                for (int k = 0; k < f; ++k)
                  for (int l = 0; l < f; ++l)
                    Mr[(j * fs + k) * fs + l] = dominating_function(buf, theta0, eps, j, k, l, r, true);
            }
            try {
              const Vector Qr = (fit(buf, r, theta0) - theta0).tail(f);
              acc.res.add(Qr, T.bottomRightCorner(f, f), Mr, Qr.lpNorm<Eigen::Infinity>() < eps);
            } catch (const FitFailure&) {
              ++acc.res.failed;
            }
          }
        }
      });
  QTAcc full(d), res(static_cast<std::size_t>(f));
  for (const Pair& p : blocks) {
    full.merge(p.full);
    if (f > 0) res.merge(p.res);
  }

  auto finish = [&](const QTAcc& acc, std::size_t dim, const MomentTable& vh) {
    if (acc.failed * 1000 > options.reps) throw ExcessiveFitFailures(acc.failed, options.reps);
    const std::size_t accepted = dim ? acc.t4c[0].count() : 0;
    if (accepted < 10000) throw InsufficientAcceptance(accepted, 10000);
    QTMomentSet q(dim);
    store(q.q2, acc.q2);
    store(q.eq2, acc.eq2);
    store(q.eq6, acc.eq6);
    store(q.eq_triple, acc.eq3);
    store(q.eq_quad, acc.eq4);
    store(q.t6, acc.t6);
    store(q.t4_cond, acc.t4c);
    if (rademacher) {
      store_constant(q.m2_cond, N * N);
      store_constant(q.m4_cond, N * N * N * N);
    } else {
      store(q.m2_cond, acc.m2c);
      store(q.m4_cond, acc.m4c);
    }
    q.var_hess = vh;
    return q;
  };

  out.full = finish(full, d, var_hess);
  if (f > 0) {
    MomentTable vh("var_hess", static_cast<std::size_t>(f), 2);
    vh.fill([&](std::span<const std::size_t> i) {
      return var_hess(i[0] + static_cast<std::size_t>(r), i[1] + static_cast<std::size_t>(r));
    });
    out.restricted = finish(res, static_cast<std::size_t>(f), vh);
  }
  return out;
}

}  // namespace stein_wilks
