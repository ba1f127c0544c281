#include <cmath>
#include <numbers>

#include "oracle_util.hpp"
#include "stein_wilks/models.hpp"

namespace stein_wilks {

bool NormalModel::in_domain(const Vector& theta) const {
  return theta.size() == 2 && std::isfinite(theta(0)) && theta(1) > 0.0 && std::isfinite(theta(1));
}

double NormalModel::log_density(std::span<const double> x, const Vector& theta) const {
  const double v = theta(1);
  const double z = x[0] - theta(0);
  return -0.5 * std::log(2.0 * std::numbers::pi * v) - z * z / (2.0 * v);
}

Vector NormalModel::score(std::span<const double> x, const Vector& theta) const {
  const double v = theta(1);
  const double z = x[0] - theta(0);
  Vector s(2);
  s << z / v, -0.5 / v + z * z / (2.0 * v * v);
  return s;
}

Matrix NormalModel::hessian(std::span<const double> x, const Vector& theta) const {
  const double v = theta(1);
  const double z = x[0] - theta(0);
  Matrix h(2, 2);
  h << -1.0 / v, -z / (v * v), -z / (v * v), 0.5 / (v * v) - z * z / (v * v * v);
  return h;
}

Matrix NormalModel::fisher_info(const Vector& theta) const {
  if (!in_domain(theta)) throw ConfigError("normal: sigma^2 must be > 0");
  const double v = theta(1);
  Matrix info = Matrix::Zero(2, 2);
  info(0, 0) = 1.0 / v;
  info(1, 1) = 1.0 / (2.0 * v * v);
  return info;
}

namespace {

struct Sums {
  double s1 = 0.0, s2 = 0.0, n = 0.0;  // sum (x - mu), sum (x - mu)^2
};

Sums centred_sums(const Dataset& data, double mu) {
  Sums s;
  for (double x : data.values()) {
    s.s1 += x - mu;
    s.s2 += (x - mu) * (x - mu);
  }
  s.n = static_cast<double>(data.size());
  return s;
}

int variance_count(int j, int k, int l) { return (j == 1) + (k == 1) + (l == 1); }

}  // namespace

double NormalModel::third_derivative(const Dataset& data, const Vector& theta, int j, int k,
                                     int l) const {
  const double v = theta(1);
  const Sums s = centred_sums(data, theta(0));
  switch (variance_count(j, k, l)) {
    case 0: return 0.0;
    case 1: return s.n / (v * v);
    case 2: return 2.0 * s.s1 / (v * v * v);
    default: return -s.n / (v * v * v) + 3.0 * s.s2 / (v * v * v * v);
  }
}

double NormalModel::dominating_function(const Dataset& data, const Vector& theta0, double eps,
                                        int j, int k, int l, int r, bool restricted) const {
  const double lo = theta0(1) - eps;
  if (!(eps > 0.0) || !(lo > 0.0)) throw ConfigError("normal: need 0 < eps < sigma^2");
  const Sums s = centred_sums(data, theta0(0));
  const double lo3 = lo * lo * lo, lo4 = lo3 * lo;
  if (restricted) {
    // Only sigma^2 is free and mu stays at its null value.
    if (r != 1) throw ConfigError("normal: restricted model requires r = 1");
    return s.n / lo3 + 3.0 * s.s2 / lo4;
  }
  switch (variance_count(j, k, l)) {
    case 0: return 0.0;
    case 1: return s.n / (lo * lo);
    case 2: return 2.0 * (std::abs(s.s1) + s.n * eps) / lo3;
    default:
      // sum (x - mu)^2 <= s2 + 2 eps |s1| + n eps^2 on the box.
      return s.n / lo3 + 3.0 * (s.s2 + 2.0 * eps * std::abs(s.s1) + s.n * eps * eps) / lo4;
  }
}

double NormalModel::epsilon_default(const Vector& theta0) const { return 0.5 * theta0(1); }

void NormalModel::sample_into(const Vector& theta, std::size_t n, Rng& rng, Dataset& out) const {
  out.reshape(n, 1);
  std::normal_distribution<double> z(0.0, 1.0);
  const double mu = theta(0), sd = std::sqrt(theta(1));
  for (std::size_t i = 0; i < n; ++i) out.row(i)[0] = mu + sd * z(rng);
}

Vector NormalModel::fit(const Dataset& data, int r, const Vector& null_values,
                        int* iterations) const {
  if (iterations) *iterations = 0;
  if (r >= 2) return null_values.head(2);
  const double n = static_cast<double>(data.size());
  double mu = 0.0;
  if (r == 1) {
    mu = null_values(0);
  } else {
    for (double x : data.values()) mu += x;
    mu /= n;
  }
  double ss = 0.0;
  for (double x : data.values()) ss += (x - mu) * (x - mu);
  Vector theta(2);
  theta << mu, ss / n;
  return theta;
}

std::optional<double> NormalModel::closed_form_statistic(const Dataset& data, int r,
                                                         const Vector& theta0) const {
  if (r != 1) return std::nullopt;
  const double n = static_cast<double>(data.size());
  double mean = 0.0;
  for (double x : data.values()) mean += x;
  mean /= n;
  double ss = 0.0;
  for (double x : data.values()) ss += (x - mean) * (x - mean);
  // n log(sum (x - mu0)^2 / sum (x - xbar)^2)
  const double shift = mean - theta0(0);
  return n * std::log1p(n * shift * shift / ss);
}

OracleMoments NormalModel::moment_oracle(const Vector& theta0, int r, std::size_t n, double eps,
                                         const OracleOptions&) const {
  if (!in_domain(theta0)) throw ConfigError("normal: sigma^2 must be > 0");
  if (r != 1 && r != 2) throw ConfigError("normal: r must be 1 or 2");
  if (n < 2) throw ConfigError("moment oracle needs n >= 2");
  if (!(eps > 0.0)) throw NonpositiveEpsilon(eps);
  const double v = theta0(1);
  if (!(eps < v)) throw ConfigError("normal: eps must be < sigma^2");
  const auto nn = static_cast<long long>(n);
  const double N = static_cast<double>(n);
  const double sigma = std::sqrt(v);

  // Q1 = Xbar - mu ~ N(0, v/n) independent of Q2 = v (G_{n-1} - n)/n.
  double q1[5], q2[5];
  for (int a = 0; a <= 4; ++a) {
    q1[a] = normal_central_moment(v / N, 2 * a);
    q2[a] = a == 0 ? 1.0 : std::pow(v / N, 2 * a) * chisq_central_moment(nn - 1, 2 * a, N);
  }
  auto joint = [&](const std::vector<int>& m) { return MomentValue::exact(q1[m[0]] * q2[m[1]]); };

  OracleMoments out;
  out.epsilon = eps;
  QTMomentSet& Q = out.full;
  Q = QTMomentSet(2);
  detail::fill_by_counts(Q.q2, joint);
  detail::fill_by_counts(Q.eq2, joint);
  Q.eq6.fill([&](auto i) { return MomentValue::exact(i[0] == 0 ? q1[3] : q2[3]); });
  detail::fill_by_counts(Q.eq_triple, joint);
  detail::fill_by_counts(Q.eq_quad, joint);

  const double v2 = v * v, v3 = v2 * v, v4 = v2 * v2;
  detail::fill_by_counts(Q.var_hess, [&](const std::vector<int>& m) {
    // Var of -1/v, -(X-mu)/v^2, 1/(2v^2) - (X-mu)^2/v^3.
    const double var[3] = {0.0, 1.0 / v3, 2.0 / v4};
    return MomentValue::exact(var[m[1]]);
  });
  // T11 = 0, T12 = -sum (X - mu)/v^2, T22 = (n - G_n)/v^2.
  const double g4 = chisq_central_moment(nn, 4, N);
  const double g6 = chisq_central_moment(nn, 6, N);
  detail::fill_by_counts(Q.t6, [&](const std::vector<int>& m) {
    const double val[3] = {0.0, 15.0 * N * N * N / std::pow(v, 9), g6 / std::pow(v, 12)};
    return MomentValue::exact(val[m[1]]);
  });
  detail::fill_by_counts(Q.t4_cond, [&](const std::vector<int>& m) {
    const double val[3] = {0.0, 3.0 * N * N / std::pow(v, 6), g4 / std::pow(v, 8)};
    return m[1] == 0 ? MomentValue::exact(0.0) : MomentValue::bound(val[m[1]]);
  });
  // Suprema of the dominating functions on |Q_(m)| < eps.
  const double lo = v - eps;
  const double lo2 = lo * lo, lo3 = lo2 * lo, lo4 = lo3 * lo;
  const double m_sup[4] = {0.0, N / lo2, 4.0 * N * eps / lo3,
                           N / lo3 + 9.0 * N * (v + eps + 2.0 * eps * eps) / lo4};
  detail::fill_by_counts(Q.m2_cond, [&](const std::vector<int>& m) {
    return m[1] == 0 ? MomentValue::exact(0.0) : MomentValue::bound(std::pow(m_sup[m[1]], 2));
  });
  detail::fill_by_counts(Q.m4_cond, [&](const std::vector<int>& m) {
    return m[1] == 0 ? MomentValue::exact(0.0) : MomentValue::bound(std::pow(m_sup[m[1]], 4));
  });

  if (r == 1) {
    // Null model: sigma^2 free, Q* = v (G_n - n)/n.
    QTMomentSet R(1);
    double qs[5];
    for (int a = 0; a <= 4; ++a) {
      qs[a] = a == 0 ? 1.0 : std::pow(v / N, 2 * a) * chisq_central_moment(nn, 2 * a, N);
    }
    auto order = [&](const std::vector<int>& m) { return MomentValue::exact(qs[m[0]]); };
    detail::fill_by_counts(R.q2, order);
    detail::fill_by_counts(R.eq2, order);
    R.eq6.fill([&](auto) { return MomentValue::exact(qs[3]); });
    detail::fill_by_counts(R.eq_triple, order);
    detail::fill_by_counts(R.eq_quad, order);
    R.var_hess.fill([&](auto) { return MomentValue::exact(2.0 / v4); });
    R.t6.fill([&](auto) { return MomentValue::exact(g6 / std::pow(v, 12)); });
    R.t4_cond.fill([&](auto) { return MomentValue::bound(g4 / std::pow(v, 8)); });
    const double ms = N / lo3 + 3.0 * N * (v + eps) / lo4;
    R.m2_cond.fill([&](auto) { return MomentValue::bound(ms * ms); });
    R.m4_cond.fill([&](auto) { return MomentValue::bound(std::pow(ms, 4)); });
    out.restricted = std::move(R);
  }

  // Score moments: Y1 = Z/sigma, Y2 = (Z^2 - 1)/(2 sigma^2).
  WMomentSet& W = out.w;
  W = WMomentSet(2);
  const double rp = std::sqrt(std::numbers::pi);
  W.abs1.fill([&](auto i) {
    return i[0] == 0 ? MomentValue::exact(std::sqrt(2.0) / (sigma * rp))
                     : MomentValue::bound(1.0 / (std::sqrt(2.0) * v));
  });
  W.cross2.fill([&](auto i) {
    if (i[0] != i[1]) return MomentValue::exact(0.0);
    return MomentValue::exact(i[0] == 0 ? 1.0 / v : 1.0 / (2.0 * v2));
  });
  detail::fill_by_counts(W.abs3, [&](const std::vector<int>& m) {
    switch (m[1]) {
      case 0: return MomentValue::exact(2.0 * std::sqrt(2.0) / (std::pow(sigma, 3) * rp));
      case 1: return MomentValue::bound(std::sqrt(3.0) / (std::sqrt(2.0) * v2));
      case 2: return MomentValue::bound(std::sqrt(15.0) / (2.0 * std::pow(sigma, 5)));
      default: return MomentValue::bound(std::sqrt(1510.0) / (4.0 * v3));
    }
  });
  W.abs5.fill([&](std::span<const std::size_t> i) {
    // E|Y_j Y_k Y_l Y_t^2|: Y_t enters twice.
    int b = 2 * static_cast<int>(i[3] == 1);
    for (int p = 0; p < 3; ++p) b += static_cast<int>(i[p] == 1);
    switch (b) {
      case 0: return MomentValue::exact(8.0 * std::sqrt(2.0) / (std::pow(sigma, 5) * rp));
      case 1: return MomentValue::bound(std::sqrt(105.0) / (std::sqrt(2.0) * v3));
      case 2: return MomentValue::bound(15.0 / (2.0 * std::pow(sigma, 7)));
      case 3: return MomentValue::bound(std::sqrt(4530.0) / (4.0 * v4));
      case 4: return MomentValue::bound(std::sqrt(74417.0) / (4.0 * std::pow(sigma, 9)));
      default: return MomentValue::bound(3.0 * std::sqrt(2688194.0) / (8.0 * v4 * v));
    }
  });
  W.w2.fill([&](auto i) { return MomentValue::exact(i[0] == 0 ? 1.0 / v : 1.0 / (2.0 * v2)); });
  fill_gaussian_moments(W, fisher_info(theta0));
  return out;
}

}  // namespace stein_wilks
