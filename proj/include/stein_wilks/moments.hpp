#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stein_wilks/errors.hpp"

namespace stein_wilks {

enum class MomentSource { analytic, monte_carlo };

// A moment value with provenance. Analytic entries may be exact or a proven
// upper bound; Monte Carlo entries carry a standard error.
struct MomentValue {
  double value = 0.0;
  MomentSource source = MomentSource::analytic;
  double stderr_ = 0.0;
  bool upper_bound = false;

  static MomentValue exact(double v) { return {v, MomentSource::analytic, 0.0, false}; }
  static MomentValue bound(double v) { return {v, MomentSource::analytic, 0.0, true}; }
  static MomentValue estimated(double v, double se) {
    return {v, MomentSource::monte_carlo, se, false};
  }
};

// Dense table of moments indexed by `rank` coordinates in [0, dim).
// Entries that were never set raise MissingMoment on access.
class MomentTable {
 public:
  MomentTable() = default;
  MomentTable(std::string name, std::size_t dim, std::size_t rank);

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t rank() const noexcept { return rank_; }

  bool has(std::span<const std::size_t> index) const;
  const MomentValue& at(std::span<const std::size_t> index) const;
  void set(std::span<const std::size_t> index, MomentValue v);

  template <class... I>
  const MomentValue& operator()(I... i) const {
    const std::array<std::size_t, sizeof...(I)> idx{static_cast<std::size_t>(i)...};
    return at(idx);
  }
  template <class... I>
  double value(I... i) const {
    return (*this)(i...).value;
  }

  // Visits every populated entry in lexicographic index order.
  template <class Fn>
  void for_each(Fn&& fn) const {
    std::vector<std::size_t> idx(rank_, 0);
    for (std::size_t flat = 0; flat < entries_.size(); ++flat) {
      std::size_t rem = flat;
      for (std::size_t p = rank_; p-- > 0;) {
        idx[p] = rem % dim_;
        rem /= dim_;
      }
      if (entries_[flat]) fn(std::span<const std::size_t>(idx), *entries_[flat]);
    }
  }

  // Fills every index with fn(index) -> MomentValue.
  template <class Fn>
  void fill(Fn&& fn) {
    std::vector<std::size_t> idx(rank_, 0);
    for (std::size_t flat = 0; flat < entries_.size(); ++flat) {
      std::size_t rem = flat;
      for (std::size_t p = rank_; p-- > 0;) {
        idx[p] = rem % dim_;
        rem /= dim_;
      }
      entries_[flat] = fn(std::span<const std::size_t>(idx));
    }
  }

  bool any_monte_carlo() const;

 private:
  std::size_t flat_index(std::span<const std::size_t> index) const;

  std::string name_;
  std::size_t dim_ = 0;
  std::size_t rank_ = 0;
  std::vector<std::optional<MomentValue>> entries_;
};

// Central moments from cumulants kappa[1..k] (kappa[0] ignored, kappa[1] is
// the mean and is excluded from central moments). Returns mu[0..k].
std::vector<double> central_moments_from_cumulants(std::span<const double> kappa, int k);

// E(Xbar - theta0)^k for Xbar the mean of n i.i.d. exponentials with mean
// theta0, i.e. Xbar ~ Gamma(shape n, rate n/theta0). k in {2,4,6,8}.
double gamma_mean_central_moment(long long n, double theta0, int k);

// E(G - shift)^k for G ~ chi-square with nu degrees of freedom, k in {2,4,6,8}.
double chisq_central_moment(long long nu, int k, double shift);

// E|Z|^k for standard normal Z, 1 <= k <= 6.
double halfnormal_abs_moment(int k);

// E Z^k for Z ~ N(0, variance); zero for odd k.
double normal_central_moment(double variance, int k);

}  // namespace stein_wilks
