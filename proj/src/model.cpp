#include "stein_wilks/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "stein_wilks/fisher.hpp"
#include "stein_wilks/parallel.hpp"
#include "stein_wilks/stats.hpp"

namespace stein_wilks {

Theta::Theta(Vector v, int pinned) : values(std::move(v)), r(pinned) {
  if (values.size() < 1) throw DimensionMismatch("theta needs d >= 1");
  if (r < 0 || r > values.size()) throw DimensionMismatch("theta: r outside [0, d]");
}

Dataset::Dataset(std::size_t n, std::size_t arity) : n_(n), t_(arity), data_(n * arity, 0.0) {}

Dataset::Dataset(std::size_t arity, std::vector<double> values)
    : t_(arity), data_(std::move(values)) {
  if (arity == 0 || data_.size() % arity != 0) {
    throw DimensionMismatch("dataset values are not a whole number of records");
  }
  n_ = data_.size() / arity;
}

void Dataset::reshape(std::size_t n, std::size_t arity) {
  n_ = n;
  t_ = arity;
  data_.resize(n * arity);
}

Dataset read_csv(std::istream& in, std::size_t arity) {
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::stringstream row(line);
    std::string cell;
    std::size_t fields = 0;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError("csv line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      ++fields;
    }
    if (fields != arity) {
      throw ConfigError("csv line " + std::to_string(line_no) + ": expected " +
                        std::to_string(arity) + " fields, got " + std::to_string(fields));
    }
  }
  if (values.empty()) throw ConfigError("csv contains no observations");
  return Dataset(arity, std::move(values));
}

void write_csv(std::ostream& out, const Dataset& data) {
  out << std::setprecision(17);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = data.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
}

// ---- test functions -------------------------------------------------------

TestFunction TestFunction::ht() {
  TestFunction f;
  f.name = "ht";
  f.h = [](double x) { return 1.0 / (x * x + 2.0); };
  f.h1 = [](double x) {
    const double q = x * x + 2.0;
    return -2.0 * x / (q * q);
  };
  f.h2 = [](double x) {
    const double q = x * x + 2.0;
    return (6.0 * x * x - 4.0) / (q * q * q);
  };
  f.norm_h = 0.5;
  f.norm_h1 = 3.0 * std::sqrt(1.5) / 16.0;
  f.norm_h2 = 0.5;
  return f;
}

TestFunction TestFunction::zero() { return constant(0.0); }

TestFunction TestFunction::constant(double value) {
  TestFunction f;
  f.name = value == 0.0 ? "zero" : "constant";
  f.h = [value](double) { return value; };
  f.h1 = [](double) { return 0.0; };
  f.h2 = [](double) { return 0.0; };
  f.norm_h = std::abs(value);
  return f;
}

TestFunction TestFunction::tabulated(std::vector<std::array<double, 4>> rows, double norm_h,
                                     double norm_h1, double norm_h2) {
  if (rows.size() < 2) throw ConfigError("tabulated h needs at least two rows");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i][0] > rows[i - 1][0])) throw ConfigError("tabulated h: x must be increasing");
  }
  if (norm_h < 0 || norm_h1 < 0 || norm_h2 < 0) throw ConfigError("declared norms must be >= 0");
  auto table = std::make_shared<const std::vector<std::array<double, 4>>>(std::move(rows));
  auto column = [table](int c) {
    return [table, c](double x) {
      const auto& t = *table;
      if (x <= t.front()[0]) return t.front()[c];
      if (x >= t.back()[0]) return t.back()[c];
      const auto it = std::upper_bound(t.begin(), t.end(), x,
                                       [](double v, const auto& row) { return v < row[0]; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = (x - lo[0]) / (hi[0] - lo[0]);
      return lo[c] + w * (hi[c] - lo[c]);
    };
  };
  TestFunction f;
  f.name = "table";
  f.h = column(1);
  f.h1 = column(2);
  f.h2 = column(3);
  f.norm_h = norm_h;
  f.norm_h1 = norm_h1;
  f.norm_h2 = norm_h2;
  return f;
}

TestFunction TestFunction::read_table(std::istream& in) {
  std::optional<double> nh, nh1, nh2;
  std::vector<std::array<double, 4>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      std::string key = line.substr(first, eq - first);
      key.erase(key.find_last_not_of(" \t") + 1);
      double v = 0.0;
      try {
        v = std::stod(line.substr(eq + 1));
      } catch (const std::exception&) {
        throw ConfigError("h table: bad value for " + key);
      }
      if (key == "norm_h") nh = v;
      else if (key == "norm_h1") nh1 = v;
      else if (key == "norm_h2") nh2 = v;
      else throw ConfigError("h table: unknown key " + key);
      continue;
    }
    std::stringstream row(line);
    std::array<double, 4> r{};
    std::string cell;
    int k = 0;
    while (std::getline(row, cell, ',')) {
      if (k >= 4) throw ConfigError("h table: rows need exactly x,h,h1,h2");
      try {
        r[k++] = std::stod(cell);
      } catch (const std::exception&) {
        throw ConfigError("h table: bad number '" + cell + "'");
      }
    }
    if (k != 4) throw ConfigError("h table: rows need exactly x,h,h1,h2");
    rows.push_back(r);
  }
  if (!nh || !nh1 || !nh2) throw ConfigError("h table: norm_h, norm_h1 and norm_h2 are required");
  return tabulated(std::move(rows), *nh, *nh1, *nh2);
}

TestFunction TestFunction::scaled(double factor) const {
  TestFunction f;
  f.name = name;
  f.h = [g = h, factor](double x) { return factor * g(x); };
  f.h1 = [g = h1, factor](double x) { return factor * g(x); };
  f.h2 = [g = h2, factor](double x) { return factor * g(x); };
  f.norm_h = std::abs(factor) * norm_h;
  f.norm_h1 = std::abs(factor) * norm_h1;
  f.norm_h2 = std::abs(factor) * norm_h2;
  return f;
}

TestFunctionReport validate_test_function(const TestFunction& h, const GridSpec& grid) {
  if (grid.points < 10000) throw ConfigError("validation grid needs at least 1e4 points");
  if (!(grid.x_max > 0.0) || !std::isfinite(grid.x_max)) throw ConfigError("grid x_max must be > 0");
  if (!h.h || !h.h1 || !h.h2) throw ConfigError("test function has a missing evaluator");

  TestFunctionReport rep;
  rep.points = grid.points;
  const char* names[3] = {"norm_h", "norm_h1", "norm_h2"};
  const double declared[3] = {h.norm_h, h.norm_h1, h.norm_h2};
  double worst_excess = 0.0;
  int worst = -1;
  double worst_x = 0.0, worst_value = 0.0;
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double x = grid.x_max * static_cast<double>(i) / static_cast<double>(grid.points - 1);
    const double v[3] = {std::abs(h.h(x)), std::abs(h.h1(x)), std::abs(h.h2(x))};
    double* sups[3] = {&rep.sup_h, &rep.sup_h1, &rep.sup_h2};
    for (int k = 0; k < 3; ++k) {
      if (!std::isfinite(v[k])) {
        throw NormViolation(names[k], x, v[k], declared[k]);
      }
      *sups[k] = std::max(*sups[k], v[k]);
      const double excess = v[k] - (declared[k] + 1e-9);
      if (excess > worst_excess) {
        worst_excess = excess;
        worst = k;
        worst_x = x;
        worst_value = v[k];
      }
    }
  }
  if (worst >= 0) throw NormViolation(names[worst], worst_x, worst_value, declared[worst]);
  return rep;
}

// ---- moment sets ----------------------------------------------------------

QTMomentSet::QTMomentSet(std::size_t d)
    : dim(d),
      q2("q2", d, 1),
      eq2("eq2", d, 2),
      eq6("eq6", d, 1),
      eq_triple("eq_triple", d, 3),
      eq_quad("eq_quad", d, 4),
      var_hess("var_hess", d, 2),
      t6("t6", d, 2),
      t4_cond("t4_cond", d, 2),
      m2_cond("m2_cond", d, 3),
      m4_cond("m4_cond", d, 3) {}

bool QTMomentSet::any_monte_carlo() const {
  for (const MomentTable* t : {&q2, &eq2, &eq6, &eq_triple, &eq_quad, &var_hess, &t6, &t4_cond,
                               &m2_cond, &m4_cond}) {
    if (t->any_monte_carlo()) return true;
  }
  return false;
}

WMomentSet::WMomentSet(std::size_t d)
    : dim(d),
      abs1("abs1", d, 1),
      cross2("cross2", d, 2),
      abs3("abs3", d, 3),
      abs5("abs5", d, 4),
      w2("w2", d, 1),
      zabs("zabs", d, 1),
      zabs_sq("zabs_sq", d, 2) {}

bool WMomentSet::any_monte_carlo() const {
  for (const MomentTable* t : {&abs1, &cross2, &abs3, &abs5, &w2, &zabs, &zabs_sq}) {
    if (t->any_monte_carlo()) return true;
  }
  return false;
}

void fill_gaussian_moments(WMomentSet& w, const Matrix& info) {
  if (info.rows() != static_cast<Eigen::Index>(w.dim) || info.cols() != info.rows()) {
    throw DimensionMismatch("Gaussian moments: information size does not match moment set");
  }
  // V = I^{-1/2} Z; V_s = a.Z with a = row s. E|V_s| = sqrt(2/pi)|a| and
  // E|V_s Z_t^2| = E|V_s| (1 + a_t^2/|a|^2).
  const Matrix root = spd_inverse_sqrt(info);
  const double c1 = std::sqrt(2.0 / std::numbers::pi);
  for (std::size_t s = 0; s < w.dim; ++s) {
    const Vector a = root.row(static_cast<Eigen::Index>(s)).transpose();
    const double norm2 = a.squaredNorm();
    const double e = c1 * std::sqrt(norm2);
    w.zabs.set(std::array<std::size_t, 1>{s}, MomentValue::exact(e));
    for (std::size_t t = 0; t < w.dim; ++t) {
      const double at = a(static_cast<Eigen::Index>(t));
      w.zabs_sq.set(std::array<std::size_t, 2>{s, t}, MomentValue::exact(e * (1.0 + at * at / norm2)));
    }
  }
}

// ---- model defaults -------------------------------------------------------

void ParametricModel::validate_data(const Dataset& data) const {
  if (data.size() < 1) throw ConfigError(id() + ": dataset is empty");
  if (data.arity() != arity()) {
    throw DimensionMismatch(id() + ": records have arity " + std::to_string(data.arity()) +
                            ", expected " + std::to_string(arity()));
  }
  for (double v : data.values()) {
    if (!std::isfinite(v)) throw ConfigError(id() + ": dataset contains a non-finite value");
  }
}

double ParametricModel::log_likelihood(const Dataset& data, const Vector& theta) const {
  double s = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) s += log_density(data.row(i), theta);
  return s;
}

Vector ParametricModel::total_score(const Dataset& data, const Vector& theta) const {
  Vector s = Vector::Zero(dim());
  for (std::size_t i = 0; i < data.size(); ++i) s += score(data.row(i), theta);
  return s;
}

Matrix ParametricModel::total_hessian(const Dataset& data, const Vector& theta) const {
  Matrix h = Matrix::Zero(dim(), dim());
  for (std::size_t i = 0; i < data.size(); ++i) h += hessian(data.row(i), theta);
  return h;
}

double ParametricModel::epsilon_default(const Vector&) const {
  throw ConfigError(id() + ": no default epsilon; supply one explicitly");
}

Dataset ParametricModel::sample(const Vector& theta, std::size_t n, std::uint64_t seed) const {
  Rng rng(seed);
  Dataset out;
  sample_into(theta, n, rng, out);
  return out;
}

std::optional<double> ParametricModel::closed_form_statistic(const Dataset&, int,
                                                             const Vector&) const {
  return std::nullopt;
}

OracleMoments ParametricModel::moment_oracle(const Vector&, int, std::size_t, double,
                                             const OracleOptions&) const {
  throw OracleUnavailable(id());
}

double ParametricModel::schur_constant(const FisherBlocks& blocks, const Vector&) const {
  return blocks.c;
}

// ---- contract spot checks -------------------------------------------------

ModelValidationReport validate_model(const ParametricModel& model, const Vector& theta0,
                                     std::size_t n, std::size_t reps, std::uint64_t seed,
                                     int threads) {
  if (reps < 10000) throw ConfigError("validate_model needs reps >= 1e4");
  if (n < 1) throw ConfigError("validate_model needs n >= 1");
  const int d = model.dim();
  const auto dd = static_cast<std::size_t>(d);
  const Matrix expected = static_cast<double>(n) * model.fisher_info(theta0);

  struct Block {
    std::vector<RunningStats> score, outer;
  };
  std::vector<Block> blocks(block_count(reps));
  parallel_replicates(
      blocks.size(), threads, [] { return Dataset(); },
      [&](std::size_t b, Dataset& buf) {
        Block& blk = blocks[b];
        blk.score.assign(dd, {});
        blk.outer.assign(dd * dd, {});
        const std::size_t end = std::min(reps, (b + 1) * kBlockSize);
        for (std::size_t i = b * kBlockSize; i < end; ++i) {
          Rng rng(replicate_seed(seed, i));
          model.sample_into(theta0, n, rng, buf);
          const Vector s = model.total_score(buf, theta0);
          for (int j = 0; j < d; ++j) {
            blk.score[j].add(s(j));
            for (int k = 0; k < d; ++k) blk.outer[j * dd + k].add(s(j) * s(k));
          }
        }
      });

  std::vector<RunningStats> score(dd), outer(dd * dd);
  for (const Block& blk : blocks) {
    for (std::size_t j = 0; j < dd; ++j) score[j].merge(blk.score[j]);
    for (std::size_t j = 0; j < dd * dd; ++j) outer[j].merge(blk.outer[j]);
  }

  auto zscore = [](double diff, double se) {
    if (se > 0.0) return diff / se;
    return std::abs(diff) <= 1e-12 * std::max(1.0, std::abs(diff))
               ? 0.0
               : std::copysign(std::numeric_limits<double>::infinity(), diff);
  };

  ModelValidationReport rep;
  rep.reps = reps;
  rep.score_z.resize(dd);
  rep.fisher_z = Matrix::Zero(d, d);
  std::string worst_condition;
  int worst_coord = 0;
  double worst_z = 0.0;
  auto record = [&](double z, const std::string& condition, int coord) {
    if (std::abs(z) > rep.max_abs_z) {
      rep.max_abs_z = std::abs(z);
      worst_condition = condition;
      worst_coord = coord;
      worst_z = z;
    }
  };
  for (int j = 0; j < d; ++j) {
    rep.score_z[j] = zscore(score[j].mean(), score[j].stderr_of_mean());
    record(rep.score_z[j], "E[score] = 0", j + 1);
  }
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      const auto& acc = outer[j * dd + k];
      rep.fisher_z(j, k) = zscore(acc.mean() - expected(j, k), acc.stderr_of_mean());
      record(rep.fisher_z(j, k), "E[S S^T] = n I(theta0), column " + std::to_string(k + 1), j + 1);
    }
  }
  if (rep.max_abs_z > 5.0) throw ContractViolation(worst_condition, worst_coord, worst_z);
  return rep;
}

}  // namespace stein_wilks
