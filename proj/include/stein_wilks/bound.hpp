#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "stein_wilks/fisher.hpp"
#include "stein_wilks/model.hpp"

namespace stein_wilks {

// First-order propagated value: `uncertainty` is a linear (absolute-sum)
// bound on the error induced by Monte Carlo standard errors of the inputs.
struct Uncertain {
  double value = 0.0;
  double uncertainty = 0.0;

  Uncertain() = default;
  Uncertain(double v, double u = 0.0) : value(v), uncertainty(u) {}
  static Uncertain from(const MomentValue& m) { return {m.value, m.stderr_}; }

  Uncertain& operator+=(const Uncertain& o) {
    value += o.value;
    uncertainty += o.uncertainty;
    return *this;
  }
};

Uncertain operator+(Uncertain a, const Uncertain& b);
Uncertain operator*(const Uncertain& a, const Uncertain& b);
Uncertain operator*(double k, const Uncertain& a);
Uncertain operator/(const Uncertain& a, const Uncertain& b);
// a^p for a >= 0; at a == 0 the derivative is replaced by u^p.
Uncertain pow(const Uncertain& a, double p);

Uncertain compute_R(const WMomentSet& w, const FisherBlocks& blocks, std::size_t n);
// Same, with an explicit constant c in place of blocks.c.
Uncertain compute_R(const WMomentSet& w, const FisherBlocks& blocks, std::size_t n, double c);

// K1 and K2 for the full model (starred = false, uses I^{-1}) or for the null
// model (starred = true, q holds the restricted moments, uses C^{-1}).
Uncertain compute_K1(const QTMomentSet& q, const FisherBlocks& blocks, std::size_t n,
                     bool starred);
Uncertain compute_K2(const QTMomentSet& q, const FisherBlocks& blocks, std::size_t n,
                     double eps, const TestFunction& h, bool starred);

struct BoundMeta {
  std::string model_id;
  std::vector<double> theta0;
  std::size_t n = 0;
  int r = 0;
  int d = 0;
  double epsilon = 0.0;
  double norm_h = 0.0, norm_h1 = 0.0, norm_h2 = 0.0;
  double c = 0.0;
  double R = 0.0, K1 = 0.0, K1_star = 0.0, K2 = 0.0, K2_star = 0.0;
};

struct BoundBreakdown {
  double r_term = 0.0;
  double k1_term = 0.0;
  double k1_star_term = 0.0;
  double k2_term = 0.0;
  double k2_star_term = 0.0;
  double total = 0.0;
  bool certified = true;
  double uncertainty = 0.0;
  BoundMeta meta;
};

struct BoundOptions {
  std::optional<double> epsilon;  // default: model.epsilon_default(theta0)
  std::optional<double> c;        // default: model.schur_constant(blocks, theta0)
  OracleOptions oracle;
};

BoundBreakdown assemble_bound(const ParametricModel& model, const Vector& theta0, std::size_t n,
                              int r, const TestFunction& h, const BoundOptions& options = {});

// Closed-form corollary for the exponential model. With prefactored = true
// the R polynomial is multiplied by 2(||h'|| + ||h''||)/sqrt(n).
double exponential_corollary_bound(double theta0, double n, const TestFunction& h,
                                   bool prefactored);

struct NormalCorollaryConstants {
  static constexpr double r_coefficient = 47456.0;
  static constexpr double k_coefficient = 418433114.0;
  static constexpr double h_coefficient = 8.0;
};

double normal_corollary_bound(double sigma2, double n, const TestFunction& h);

// Caps on third and fifth absolute score moments (mu^(3), mu^(5)).
struct MomentCaps {
  double mu3 = 1.0;
  double mu5 = 1.0;

  static MomentCaps rademacher() { return {1.0, 1.0}; }
  static MomentCaps standard_normal();
};

struct LogisticScaling {
  int d = 0, r = 0;
  double n = 0.0;
  double r_order = 0.0;   // max(mu3, mu5) r^2 (d - r) d^4
  double k1_order = 0.0;  // d^2
  double k2_order = 0.0;  // d^3
  double coefficient = 0.0;
  double bound_order = 0.0;   // coefficient / sqrt(n)
  double regime_limit = 0.0;  // n^(1/14)
  bool in_regime = false;     // d < n^(1/14)
};

LogisticScaling logistic_bound_scaling(int d, int r, double n, const MomentCaps& caps);

}  // namespace stein_wilks
