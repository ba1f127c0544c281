#include "stein_wilks/moments.hpp"

#include <cmath>
#include <numbers>

namespace stein_wilks {

MomentTable::MomentTable(std::string name, std::size_t dim, std::size_t rank)
    : name_(std::move(name)), dim_(dim), rank_(rank) {
  std::size_t size = 1;
  for (std::size_t i = 0; i < rank; ++i) size *= dim;
  entries_.resize(dim == 0 ? 0 : size);
}

std::size_t MomentTable::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != rank_) {
    throw DimensionMismatch(name_ + ": expected " + std::to_string(rank_) + " indices");
  }
  std::size_t flat = 0;
  for (std::size_t i : index) {
    if (i >= dim_) throw MissingMoment(name_, {index.begin(), index.end()});
    flat = flat * dim_ + i;
  }
  return flat;
}

bool MomentTable::has(std::span<const std::size_t> index) const {
  if (index.size() != rank_) return false;
  for (std::size_t i : index)
    if (i >= dim_) return false;
  return entries_[flat_index(index)].has_value();
}

const MomentValue& MomentTable::at(std::span<const std::size_t> index) const {
  const auto& e = entries_[flat_index(index)];
  if (!e) throw MissingMoment(name_, {index.begin(), index.end()});
  return *e;
}

void MomentTable::set(std::span<const std::size_t> index, MomentValue v) {
  entries_[flat_index(index)] = v;
}

bool MomentTable::any_monte_carlo() const {
  for (const auto& e : entries_)
    if (e && e->source == MomentSource::monte_carlo) return true;
  return false;
}

namespace {

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

void require_even_order(int k) {
  if (k < 2 || k > 8 || k % 2 != 0) throw UnsupportedOrder(k);
}

}  // namespace

std::vector<double> central_moments_from_cumulants(std::span<const double> kappa, int k) {
  // mu_m = sum_{j=2}^{m} C(m-1, j-1) kappa_j mu_{m-j}, with mu_0 = 1, mu_1 = 0.
  std::vector<double> mu(static_cast<std::size_t>(k) + 1, 0.0);
  mu[0] = 1.0;
  for (int m = 2; m <= k; ++m) {
    double s = 0.0;
    for (int j = 2; j <= m; ++j) s += binomial(m - 1, j - 1) * kappa[j] * mu[m - j];
    mu[m] = s;
  }
  return mu;
}

double gamma_mean_central_moment(long long n, double theta0, int k) {
  require_even_order(k);
  if (n < 1 || !(theta0 > 0.0)) throw ConfigError("gamma moment needs n >= 1, theta0 > 0");
  // Gamma(shape n, scale theta0/n): kappa_j = n (j-1)! (theta0/n)^j.
  std::vector<double> kappa(static_cast<std::size_t>(k) + 1, 0.0);
  const double scale = theta0 / static_cast<double>(n);
  double fact = 1.0;
  for (int j = 1; j <= k; ++j) {
    if (j > 1) fact *= (j - 1);
    kappa[j] = static_cast<double>(n) * fact * std::pow(scale, j);
  }
  return central_moments_from_cumulants(kappa, k)[k];
}

double chisq_central_moment(long long nu, int k, double shift) {
  require_even_order(k);
  if (nu < 1) throw ConfigError("chi-square moment needs nu >= 1");
  // kappa_j = nu 2^{j-1} (j-1)!
  std::vector<double> kappa(static_cast<std::size_t>(k) + 1, 0.0);
  double fact = 1.0;
  for (int j = 1; j <= k; ++j) {
    if (j > 1) fact *= (j - 1);
    kappa[j] = static_cast<double>(nu) * std::ldexp(1.0, j - 1) * fact;
  }
  const auto mu = central_moments_from_cumulants(kappa, k);
  // E(G - s)^k = sum_j C(k, j) mu_j (nu - s)^{k-j}
  const double offset = static_cast<double>(nu) - shift;
  double total = 0.0;
  for (int j = 0; j <= k; ++j) total += binomial(k, j) * mu[j] * std::pow(offset, k - j);
  return total;
}

double halfnormal_abs_moment(int k) {
  if (k < 1 || k > 6) throw UnsupportedOrder(k);
  // 2^{k/2} Gamma((k+1)/2) / sqrt(pi)
  return std::pow(2.0, 0.5 * k) * std::tgamma(0.5 * (k + 1)) / std::sqrt(std::numbers::pi);
}

double normal_central_moment(double variance, int k) {
  if (k < 0) throw UnsupportedOrder(k);
  if (k % 2 != 0) return 0.0;
  double dfact = 1.0;  // (k-1)!!
  for (int i = k - 1; i > 1; i -= 2) dfact *= i;
  return dfact * std::pow(variance, k / 2);
}

}  // namespace stein_wilks
