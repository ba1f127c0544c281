#include "stein_wilks/bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace stein_wilks {

Uncertain operator+(Uncertain a, const Uncertain& b) { return a += b; }

Uncertain operator*(const Uncertain& a, const Uncertain& b) {
  return {a.value * b.value,
          std::abs(b.value) * a.uncertainty + std::abs(a.value) * b.uncertainty};
}

Uncertain operator*(double k, const Uncertain& a) {
  return {k * a.value, std::abs(k) * a.uncertainty};
}

Uncertain operator/(const Uncertain& a, const Uncertain& b) {
  const double v = a.value / b.value;
  return {v, (a.uncertainty + std::abs(v) * b.uncertainty) / std::abs(b.value)};
}

Uncertain pow(const Uncertain& a, double p) {
  const double base = std::max(a.value, 0.0);
  if (base == 0.0) return {0.0, a.uncertainty > 0.0 ? std::pow(a.uncertainty, p) : 0.0};
  return {std::pow(base, p), std::abs(p) * std::pow(base, p - 1.0) * a.uncertainty};
}

namespace {

Uncertain U(const MomentTable& t, auto... i) { return Uncertain::from(t(i...)); }

}  // namespace

Uncertain compute_R(const WMomentSet& w, const FisherBlocks& blocks, std::size_t n) {
  return compute_R(w, blocks, n, blocks.c);
}

Uncertain compute_R(const WMomentSet& w, const FisherBlocks& blocks, std::size_t n, double c) {
  const std::size_t d = w.dim;
  if (static_cast<int>(d) != blocks.dim()) {
    throw DimensionMismatch("W moments and Fisher blocks disagree on d");
  }
  const double nn = static_cast<double>(n);
  const double cd = c * static_cast<double>(d);
  // The sum over i = 1..n of identical terms cancels the leading 1/n.
  Uncertain best{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t s = 0; s < d; ++s) {
    const Uncertain zs = U(w.zabs, s);
    Uncertain braces;
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t l = 0; l < d; ++l) {
          const Uncertain a3 = U(w.abs3, j, k, l);
          const Uncertain a1 = U(w.abs1, l);
          Uncertain inner3, inner1;
          for (std::size_t t = 0; t < d; ++t) {
            const Uncertain w2 = U(w.w2, t);
            const Uncertain ratio =
                zs.value > 0.0 ? U(w.zabs_sq, s, t) / zs : Uncertain{0.0};
            inner3 += 4.0 * (a3 * w2) + (4.0 / nn) * U(w.abs5, j, k, l, t) + ratio * a3;
            inner1 += 4.0 * (a1 * w2) + (4.0 / nn) * U(w.abs3, l, t, t) + ratio * a1;
          }
          braces += a3 + (8.0 * cd) * inner3 +
                    2.0 * (U(w.cross2, j, k) * (a1 + (16.0 * cd) * inner1));
        }
      }
    }
    const Uncertain candidate = c * (zs * braces);
    if (candidate.value < best.value) best = candidate;
  }
  return best;
}

namespace {

const Matrix& inverse_for(const QTMomentSet& q, const FisherBlocks& b, bool starred) {
  const Matrix& inv = starred ? b.C_inverse : b.full_inverse;
  if (static_cast<std::size_t>(inv.rows()) != q.dim) {
    throw DimensionMismatch(std::string(starred ? "restricted" : "full") +
                            " moment set does not match the information inverse");
  }
  return inv;
}

}  // namespace

Uncertain compute_K1(const QTMomentSet& q, const FisherBlocks& blocks, std::size_t n,
                     bool starred) {
  const Matrix& inv = inverse_for(q, blocks, starred);
  const std::size_t d = q.dim;
  Uncertain first;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k)
      first += pow(U(q.eq2, j, k), 0.5) * pow(U(q.var_hess, j, k), 0.5);
  Uncertain second;
  for (std::size_t l = 0; l < d; ++l) {
    for (std::size_t m = 0; m < d; ++m) {
      Uncertain inner;
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k)
          inner += pow(U(q.var_hess, l, j), 0.5) *
                   pow(U(q.eq6, j) * U(q.eq6, k) * U(q.t6, m, k), 1.0 / 6.0);
      second += inv(l, m) * inner;
    }
  }
  return (3.0 * static_cast<double>(n)) * first + second;
}

Uncertain compute_K2(const QTMomentSet& q, const FisherBlocks& blocks, std::size_t n,
                     double eps, const TestFunction& h, bool starred) {
  if (!(eps > 0.0)) throw NonpositiveEpsilon(eps);
  const Matrix& inv = inverse_for(q, blocks, starred);
  const std::size_t d = q.dim;
  const double rn = std::sqrt(static_cast<double>(n));

  Uncertain s1;
  for (std::size_t j = 0; j < d; ++j) s1 += U(q.q2, j);

  Uncertain s2;
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t l = 0; l < d; ++l)
        s2 += pow(U(q.eq_triple, j, k, l), 0.5) * pow(U(q.m2_cond, j, k, l), 0.5);

  Uncertain s3;
  for (std::size_t qq = 0; qq < d; ++qq) {
    for (std::size_t k = 0; k < d; ++k) {
      Uncertain inner;
      for (std::size_t j = 0; j < d; ++j)
        for (std::size_t l = 0; l < d; ++l)
          for (std::size_t s = 0; s < d; ++s)
            inner += pow(U(q.eq_triple, j, l, s), 0.5) * pow(U(q.t4_cond, k, j), 0.25) *
                     pow(U(q.m4_cond, qq, s, l), 0.25);
      s3 += std::abs(inv(k, qq)) * inner;
    }
  }

  Uncertain s4;
  for (std::size_t b = 0; b < d; ++b)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t s = 0; s < d; ++s)
        for (std::size_t qq = 0; qq < d; ++qq) {
          const double w = std::abs(inv(qq, b));
          if (w == 0.0) continue;
          const Uncertain mb = pow(U(q.m4_cond, b, s, k), 0.25);
          for (std::size_t l = 0; l < d; ++l)
            for (std::size_t j = 0; j < d; ++j)
              s4 += w * (pow(U(q.eq_quad, k, s, j, l), 0.5) * mb *
                         pow(U(q.m4_cond, qq, j, l), 0.25));
        }

  return (2.0 * rn * h.norm_h / (eps * eps)) * s1 + (rn * h.norm_h1 * 7.0 / 3.0) * s2 +
         (h.norm_h1 / rn) * s3 + (h.norm_h1 / (4.0 * rn)) * s4;
}

BoundBreakdown assemble_bound(const ParametricModel& model, const Vector& theta0, std::size_t n,
                              int r, const TestFunction& h, const BoundOptions& options) {
  const int d = model.dim();
  if (theta0.size() != d) throw DimensionMismatch("theta0 has the wrong length");
  if (!model.in_domain(theta0)) throw ConfigError(model.id() + ": theta0 outside the parameter domain");
  if (n < 2) throw ConfigError("bound needs n >= 2");
  if (r < 1 || r > d) throw ConfigError("r must lie in [1, d]");
  if (h.norm_h < 0 || h.norm_h1 < 0 || h.norm_h2 < 0) throw ConfigError("h norms must be >= 0");

  const FisherBlocks blocks = partition_fisher(model.fisher_info(theta0), r);
  const double eps = options.epsilon ? *options.epsilon : model.epsilon_default(theta0);
  if (!(eps > 0.0)) throw NonpositiveEpsilon(eps);
  const double c = options.c ? *options.c : model.schur_constant(blocks, theta0);

  const OracleMoments oracle = model.moment_oracle(theta0, r, n, eps, options.oracle);
  const double rn = std::sqrt(static_cast<double>(n));

  const Uncertain R = compute_R(oracle.w, blocks, n, c);
  const Uncertain K1 = compute_K1(oracle.full, blocks, n, false);
  const Uncertain K2 = compute_K2(oracle.full, blocks, n, eps, h, false);
  Uncertain K1s, K2s;
  bool mc = oracle.w.any_monte_carlo() || oracle.full.any_monte_carlo();
  if (r < d) {
    if (!oracle.restricted) throw MissingMoment("restricted", {});
    K1s = compute_K1(*oracle.restricted, blocks, n, true);
    K2s = compute_K2(*oracle.restricted, blocks, n, eps, h, true);
    mc = mc || oracle.restricted->any_monte_carlo();
  }

  BoundBreakdown out;
  const Uncertain r_term = (2.0 * (h.norm_h1 + h.norm_h2) / rn) * R;
  const Uncertain k1_term = (h.norm_h1 / rn) * K1;
  const Uncertain k1s_term = (h.norm_h1 / rn) * K1s;
  const Uncertain k2_term = (1.0 / rn) * K2;
  const Uncertain k2s_term = (1.0 / rn) * K2s;
  out.r_term = r_term.value;
  out.k1_term = k1_term.value;
  out.k1_star_term = r < d ? k1s_term.value : 0.0;
  out.k2_term = k2_term.value;
  out.k2_star_term = r < d ? k2s_term.value : 0.0;
  out.total = out.r_term;
  out.total += out.k1_term;
  out.total += out.k1_star_term;
  out.total += out.k2_term;
  out.total += out.k2_star_term;
  out.certified = !mc;
  out.uncertainty = r_term.uncertainty + k1_term.uncertainty + k1s_term.uncertainty +
                    k2_term.uncertainty + k2s_term.uncertainty;

  BoundMeta& m = out.meta;
  m.model_id = model.id();
  m.theta0.assign(theta0.data(), theta0.data() + theta0.size());
  m.n = n;
  m.r = r;
  m.d = d;
  m.epsilon = eps;
  m.norm_h = h.norm_h;
  m.norm_h1 = h.norm_h1;
  m.norm_h2 = h.norm_h2;
  m.c = c;
  m.R = R.value;
  m.K1 = K1.value;
  m.K1_star = r < d ? K1s.value : 0.0;
  m.K2 = K2.value;
  m.K2_star = r < d ? K2s.value : 0.0;
  return out;
}

double exponential_corollary_bound(double theta0, double n, const TestFunction& h,
                                   bool prefactored) {
  if (!(theta0 > 0.0) || !(n >= 1.0)) throw ConfigError("corollary needs theta0 > 0, n >= 1");
  const double rn = std::sqrt(n);
  const double t2 = theta0 * theta0;
  const double t4 = t2 * t2;
  const double t8 = t4 * t4;
  double r_part = std::sqrt(2.0) / (t8 * std::sqrt(std::numbers::pi)) *
                  (19.0 * t4 + 325.0 * t2 + 2733.0 + 36973.0 / n);
  if (prefactored) r_part *= 2.0 * (h.norm_h1 + h.norm_h2) / rn;
  const double p4 = 3.0 + 6.0 / n;
  const double p6 = 15.0 + 130.0 / n + 120.0 / (n * n);
  const double p8 = 105.0 + 2380.0 / n + 7308.0 / (n * n) + 5040.0 / (n * n * n);
  const double braces = 6.0 * std::sqrt(p4) +
                        std::sqrt(p6) * (1120.0 / 3.0 + (320.0 * std::pow(p4, 0.25) + 4.0) / rn) +
                        6400.0 / rn * std::sqrt(p8);
  return 8.0 * h.norm_h / n + r_part + h.norm_h1 / rn * braces;
}

double normal_corollary_bound(double sigma2, double n, const TestFunction& h) {
  if (!(sigma2 > 0.0) || !(n >= 1.0)) throw ConfigError("corollary needs sigma^2 > 0, n >= 1");
  using K = NormalCorollaryConstants;
  const double sigma = std::sqrt(sigma2);
  const double first = K::r_coefficient * sigma2 * (h.norm_h2 + h.norm_h1) *
                       std::max(1.0, std::pow(sigma, -9.0)) / std::sqrt(n * std::numbers::pi);
  const double second = K::k_coefficient * h.norm_h1 / std::sqrt(n) * std::max(1.0, sigma2 * sigma2);
  const double third = K::h_coefficient * (h.norm_h / n) * (4.0 + 1.0 / sigma2);
  return first + second + third;
}

MomentCaps MomentCaps::standard_normal() {
  // max over index tuples of E|prod X_{i_s}| is attained when all indices agree.
  return {halfnormal_abs_moment(3), halfnormal_abs_moment(5)};
}

LogisticScaling logistic_bound_scaling(int d, int r, double n, const MomentCaps& caps) {
  if (d < 1 || r < 1 || r > d) throw ConfigError("scaling needs 1 <= r <= d");
  if (!(n >= 1.0)) throw ConfigError("scaling needs n >= 1");
  if (!std::isfinite(caps.mu3) || !std::isfinite(caps.mu5) || caps.mu3 < 0 || caps.mu5 < 0) {
    throw ConfigError("moment caps must be finite and nonnegative");
  }
  LogisticScaling s;
  s.d = d;
  s.r = r;
  s.n = n;
  const double dd = d, rr = r;
  s.r_order = std::max(caps.mu3, caps.mu5) * rr * rr * (dd - rr) * std::pow(dd, 4);
  s.k1_order = dd * dd;
  s.k2_order = dd * dd * dd;
  s.coefficient = s.r_order + s.k1_order + s.k2_order;
  s.bound_order = s.coefficient / std::sqrt(n);
  s.regime_limit = std::pow(n, 1.0 / 14.0);
  s.in_regime = dd < s.regime_limit;
  return s;
}

}  // namespace stein_wilks
