#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "farkas_balance/errors.hpp"
#include "farkas_balance/simplex.hpp"

namespace farkas_balance {

struct GeometryConfig {
  double tol_hull = 1e-9;
  double tol_sep = 1e-9;
};

/** Columns of an m x n_r real matrix, each tagged with the original index in
 *  {0,...,p-1} it descends from. Stored column-major. */
class PointMatrix {
 public:
  PointMatrix(std::size_t rows, std::vector<double> entries, std::vector<std::size_t> col_labels)
      : rows_(rows), cols_(col_labels.size()), entries_(std::move(entries)), labels_(std::move(col_labels)) {
    if (rows_ == 0 || cols_ == 0) throw InvalidArgument("PointMatrix requires at least one row and one column");
    if (entries_.size() != rows_ * cols_) throw LengthMismatch("PointMatrix entry count does not match shape");
    for (double v : entries_)
      if (!std::isfinite(v)) throw InvalidArgument("PointMatrix entries must be finite");
    std::vector<std::size_t> sorted = labels_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidArgument("PointMatrix column labels must be distinct");
  }

  static PointMatrix from_columns(const std::vector<std::vector<double>>& columns,
                                  std::vector<std::size_t> labels) {
    if (columns.empty()) throw InvalidArgument("PointMatrix requires at least one column");
    const std::size_t rows = columns.front().size();
    std::vector<double> entries;
    entries.reserve(rows * columns.size());
    for (const auto& col : columns) {
      if (col.size() != rows) throw LengthMismatch("ragged column list");
      entries.insert(entries.end(), col.begin(), col.end());
    }
    if (labels.empty()) {
      labels.resize(columns.size());
      for (std::size_t j = 0; j < labels.size(); ++j) labels[j] = j;
    }
    return PointMatrix(rows, std::move(entries), std::move(labels));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double entry(std::size_t i, std::size_t j) const { return entries_[j * rows_ + i]; }
  std::size_t col_label(std::size_t j) const { return labels_[j]; }
  const std::vector<std::size_t>& labels() const { return labels_; }
  const std::vector<double>& entries() const { return entries_; }

  /** True when n_r > m; narrower matrices remain decidable but the
   *  at-most-m+1 sparsity bound on hull witnesses is then vacuous. */
  bool has_more_columns_than_rows() const { return cols_ > rows_; }

  double max_abs() const {
    double m = 0.0;
    for (double v : entries_) m = std::max(m, std::abs(v));
    return m;
  }

  /** max-norm of M v for a dense coefficient vector over the columns. */
  double residual_inf(const std::vector<double>& v) const {
    std::vector<double> acc(rows_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i) acc[i] += entries_[j * rows_ + i] * v[j];
    double r = 0.0;
    for (double a : acc) r = std::max(r, std::abs(a));
    return r;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> entries_;
  std::vector<std::size_t> labels_;
};

/** Convex coefficients hitting the origin, keyed by original column labels.
 *  Weights are strictly positive and sum to one. */
class SparseCoefficients {
 public:
  explicit SparseCoefficients(std::vector<std::pair<std::size_t, double>> entries)
      : entries_(std::move(entries)) {
    if (entries_.empty()) throw InvalidArgument("SparseCoefficients needs at least one entry");
    double total = 0.0;
    std::size_t prev = 0;
    bool first = true;
    for (const auto& [label, weight] : entries_) {
      if (!(weight > 0.0) || !std::isfinite(weight))
        throw InvalidArgument("SparseCoefficients weights must be positive and finite");
      if (!first && label <= prev) throw InvalidArgument("SparseCoefficients labels must be strictly increasing");
      prev = label;
      first = false;
      total += weight;
    }
    if (std::abs(total - 1.0) > 1e-10) throw InvalidArgument("SparseCoefficients weights must sum to 1");
  }

  const std::vector<std::pair<std::size_t, double>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<std::pair<std::size_t, double>> entries_;
};

/** Unit normal strictly separating the origin from the column hull. */
class SeparatingNormal {
 public:
  SeparatingNormal(std::vector<double> w, double margin) : w_(std::move(w)), margin_(margin) {
    double norm_sq = 0.0;
    for (double v : w_) {
      if (!std::isfinite(v)) throw InvalidArgument("SeparatingNormal entries must be finite");
      norm_sq += v * v;
    }
    if (std::abs(std::sqrt(norm_sq) - 1.0) > 1e-9)
      throw InvalidArgument("SeparatingNormal must have unit Euclidean norm");
    if (!(margin_ > 0.0)) throw InvalidArgument("SeparatingNormal margin must be strictly positive");
  }

  const std::vector<double>& w() const { return w_; }
  double margin() const { return margin_; }

 private:
  std::vector<double> w_;
  double margin_;
};

struct GeometryDiagnostics {
  std::size_t pivots = 0;
  double residual = 0.0;  // hull branch: achieved ||Mv||_inf
  double margin = 0.0;    // separation branch
  bool more_columns_than_rows = true;  // had n_r > m at entry
};

/** Exactly one of the two dichotomy witnesses. */
class HullOutcome {
 public:
  HullOutcome(SparseCoefficients coefficients, GeometryDiagnostics diag)
      : value_(std::move(coefficients)), diagnostics_(diag) {}
  HullOutcome(SeparatingNormal normal, GeometryDiagnostics diag)
      : value_(std::move(normal)), diagnostics_(diag) {}

  bool origin_inside() const { return std::holds_alternative<SparseCoefficients>(value_); }
  const SparseCoefficients& coefficients() const {
    if (!origin_inside()) throw Error("HullOutcome holds a separating normal");
    return std::get<SparseCoefficients>(value_);
  }
  const SeparatingNormal& normal() const {
    if (origin_inside()) throw Error("HullOutcome holds hull coefficients");
    return std::get<SeparatingNormal>(value_);
  }
  const GeometryDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  std::variant<SparseCoefficients, SeparatingNormal> value_;
  GeometryDiagnostics diagnostics_;
};

namespace detail {

/** Null vector of a dense rows x cols matrix (row-major) via Gauss-Jordan,
 *  or empty if the matrix has full column rank. Free column choice and row
 *  pivoting are deterministic. */
inline std::vector<double> null_vector(std::size_t rows, std::size_t cols, std::vector<double> a) {
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  const double eps = 1e-11 * std::max(1.0, scale);

  std::vector<std::size_t> pivot_col;
  pivot_col.reserve(rows);
  std::vector<char> is_pivot(cols, 0);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t best = r;
    for (std::size_t i = r + 1; i < rows; ++i)
      if (std::abs(a[i * cols + c]) > std::abs(a[best * cols + c])) best = i;
    if (std::abs(a[best * cols + c]) <= eps) continue;
    if (best != r)
      for (std::size_t j = 0; j < cols; ++j) std::swap(a[r * cols + j], a[best * cols + j]);
    const double piv = a[r * cols + c];
    for (std::size_t j = 0; j < cols; ++j) a[r * cols + j] /= piv;
    a[r * cols + c] = 1.0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      const double f = a[i * cols + c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) a[i * cols + j] -= f * a[r * cols + j];
      a[i * cols + c] = 0.0;
    }
    pivot_col.push_back(c);
    is_pivot[c] = 1;
    ++r;
  }

  std::size_t free_col = cols;
  for (std::size_t c = 0; c < cols; ++c) {
    if (!is_pivot[c]) {
      free_col = c;
      break;
    }
  }
  if (free_col == cols) return {};

  std::vector<double> d(cols, 0.0);
  d[free_col] = 1.0;
  for (std::size_t i = 0; i < pivot_col.size(); ++i) d[pivot_col[i]] = -a[i * cols + free_col];
  return d;
}

inline PointMatrix scaled_copy(const PointMatrix& M, double factor) {
  std::vector<double> entries = M.entries();
  for (double& v : entries) v *= factor;
  return PointMatrix(M.rows(), std::move(entries), M.labels());
}

}  // namespace detail

struct CaratheodoryResult {
  SparseCoefficients coefficients;
  std::size_t pivots = 0;
  double residual = 0.0;
};

/**
 * Thins a dense convex combination hitting the origin down to at most m+1
 * points: while the active columns (augmented with the all-ones row) admit a
 * null direction, walk along it until a coefficient hits zero. The walk
 * preserves Mv and the coefficient sum, so the residual can only pick up
 * roundoff, which is checked against tol_hull * (1 + pivot count).
 */
inline CaratheodoryResult caratheodory_reduce(const PointMatrix& M, std::vector<double> v,
                                              double tol_hull = 1e-9) {
  const std::size_t m = M.rows();
  const std::size_t n = M.cols();
  if (v.size() != n) throw LengthMismatch("caratheodory_reduce: coefficient length mismatch");
  double total = 0.0;
  for (double& x : v) {
    if (!std::isfinite(x) || x < -1e-12) throw InvalidArgument("caratheodory_reduce: coefficients must be nonnegative");
    if (x < 0.0) x = 0.0;
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-6) throw InvalidArgument("caratheodory_reduce: coefficients must sum to 1");
  for (double& x : v) x /= total;
  if (M.residual_inf(v) > tol_hull)
    throw InvalidArgument("caratheodory_reduce: input residual exceeds tol_hull");

  std::vector<std::size_t> active;
  for (std::size_t j = 0; j < n; ++j)
    if (v[j] > 0.0) active.push_back(j);

  std::size_t pivots = 0;
  while (active.size() > 1) {
    const std::size_t s = active.size();
    std::vector<double> aug((m + 1) * s);
    for (std::size_t jj = 0; jj < s; ++jj) {
      for (std::size_t i = 0; i < m; ++i) aug[i * s + jj] = M.entry(i, active[jj]);
      aug[m * s + jj] = 1.0;
    }
    std::vector<double> d = detail::null_vector(m + 1, s, std::move(aug));
    if (d.empty()) break;

    bool has_positive = false;
    for (double x : d)
      if (x > 0.0) has_positive = true;
    if (!has_positive)
      for (double& x : d) x = -x;

    std::size_t arg = s;
    double step = 0.0;
    for (std::size_t jj = 0; jj < s; ++jj) {
      if (d[jj] > 0.0) {
        const double ratio = v[active[jj]] / d[jj];
        if (arg == s || ratio < step) {
          arg = jj;
          step = ratio;
        }
      }
    }
    if (arg == s) throw Error("caratheodory_reduce: no descent coordinate");

    for (std::size_t jj = 0; jj < s; ++jj) {
      v[active[jj]] -= step * d[jj];
      if (v[active[jj]] < 0.0) v[active[jj]] = 0.0;
    }
    v[active[arg]] = 0.0;

    std::vector<std::size_t> next;
    next.reserve(s - 1);
    for (std::size_t j : active)
      if (v[j] > 0.0) next.push_back(j);
    active = std::move(next);
    ++pivots;
    if (pivots > n) throw Error("caratheodory_reduce: failed to terminate");
  }

  if (active.empty()) throw Error("caratheodory_reduce: all coefficients vanished");

  double sum = 0.0;
  for (std::size_t j : active) sum += v[j];
  for (std::size_t j : active) v[j] /= sum;

  const double residual = M.residual_inf(v);
  if (residual > tol_hull * (1.0 + static_cast<double>(pivots)))
    throw ResidualBlowup("caratheodory_reduce: residual " + std::to_string(residual) + " beyond bound");

  std::vector<std::pair<std::size_t, double>> entries;
  entries.reserve(active.size());
  for (std::size_t j : active) entries.emplace_back(M.col_label(j), v[j]);
  std::sort(entries.begin(), entries.end());
  return CaratheodoryResult{SparseCoefficients(std::move(entries)), pivots, residual};
}

/**
 * Strictly separating normal via the linear program
 *   max delta  s.t.  w . x_j >= delta for every column,  |w_i| <= 1,
 * solved on the matrix rescaled to unit max entry; the reported normal is
 * renormalized to unit Euclidean length and the margin is recomputed against
 * the original columns. Throws NoStrictSeparation when the optimum does not
 * clear tol_sep.
 */
inline SeparatingNormal separating_normal(const PointMatrix& M, const GeometryConfig& cfg = {}) {
  const std::size_t m = M.rows();
  const std::size_t n = M.cols();
  const double scale = M.max_abs();
  if (scale == 0.0) throw NoStrictSeparation("separating_normal: all columns are the origin");

  // Layout: u+ (m) | u- (m) | box slacks (m) | delta+ | delta- | surpluses (n).
  const std::size_t up = 0, un = m, sl = 2 * m, dp = 3 * m, dm = 3 * m + 1, rs = 3 * m + 2;
  LinearProgram<double> lp;
  lp.rows = n + m;
  lp.cols = 3 * m + 2 + n;
  lp.constraints.assign(lp.rows * lp.cols, 0.0);
  lp.rhs.assign(lp.rows, 0.0);
  lp.objective.assign(lp.cols, 0.0);
  auto A = [&](std::size_t i, std::size_t j) -> double& { return lp.constraints[i * lp.cols + j]; };

  for (std::size_t j = 0; j < n; ++j) {
    // -w . x_j + delta + r_j = 0, i.e. w . x_j - delta = r_j >= 0.
    for (std::size_t i = 0; i < m; ++i) {
      const double x = M.entry(i, j) / scale;
      A(j, up + i) = -x;
      A(j, un + i) = x;
    }
    A(j, dp) = 1.0;
    A(j, dm) = -1.0;
    A(j, rs + j) = 1.0;
  }
  for (std::size_t i = 0; i < m; ++i) {
    A(n + i, up + i) = 1.0;
    A(n + i, un + i) = 1.0;
    A(n + i, sl + i) = 1.0;
    lp.rhs[n + i] = 1.0;
  }
  lp.objective[dp] = -1.0;  // maximize delta
  lp.objective[dm] = 1.0;
  lp.initial_basis_candidates.assign(lp.cols, 0);
  for (std::size_t i = 0; i < m; ++i) lp.initial_basis_candidates[sl + i] = 1;
  for (std::size_t j = 0; j < n; ++j) lp.initial_basis_candidates[rs + j] = 1;

  const auto res = solve_linear_program<double>(lp, 1e-9);
  if (res.status != SimplexStatus::optimal)
    throw Error("separating_normal: separation program did not reach an optimum");

  const double delta = -res.objective;
  if (delta <= cfg.tol_sep)
    throw NoStrictSeparation("separating_normal: best margin " + std::to_string(delta * scale) +
                             " is not strictly positive at tol_sep");

  std::vector<double> w(m);
  double norm_sq = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    w[i] = res.x[up + i] - res.x[un + i];
    norm_sq += w[i] * w[i];
  }
  const double norm = std::sqrt(norm_sq);
  if (!(norm > 0.0)) throw Error("separating_normal: degenerate zero normal");
  for (double& x : w) x /= norm;

  double margin = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double dot = 0.0;
    for (std::size_t i = 0; i < m; ++i) dot += w[i] * M.entry(i, j);
    margin = (j == 0) ? dot : std::min(margin, dot);
  }
  if (!(margin > 0.0))
    throw NoStrictSeparation("separating_normal: recomputed margin is not strictly positive");
  return SeparatingNormal(std::move(w), margin);
}

/**
 * Decides the dichotomy for the columns of M: either the origin is a convex
 * combination of at most m+1 columns (phase-one feasibility of
 * {Mv = 0, sum v = 1, v >= 0} followed by Caratheodory thinning), or a unit
 * normal strictly separates the origin from every column. Tolerances act on
 * the matrix rescaled to unit max entry, so the decision is invariant under
 * positive rescaling of the columns.
 */
inline HullOutcome origin_in_hull(const PointMatrix& M, const GeometryConfig& cfg = {}) {
  if (!(cfg.tol_hull > 0.0) || !(cfg.tol_sep > 0.0))
    throw InvalidArgument("origin_in_hull: tolerances must be positive");
  const std::size_t m = M.rows();
  const std::size_t n = M.cols();

  GeometryDiagnostics diag;
  diag.more_columns_than_rows = M.has_more_columns_than_rows();

  const double scale = M.max_abs();
  if (scale == 0.0) {
    // Every column is the origin itself.
    SparseCoefficients coeffs({{M.col_label(0), 1.0}});
    diag.residual = 0.0;
    return HullOutcome(std::move(coeffs), diag);
  }
  const PointMatrix scaled = detail::scaled_copy(M, 1.0 / scale);

  LinearProgram<double> lp;
  lp.rows = m + 1;
  lp.cols = n;
  lp.constraints.assign(lp.rows * lp.cols, 0.0);
  lp.rhs.assign(lp.rows, 0.0);
  lp.objective.assign(lp.cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) lp.constraints[i * n + j] = scaled.entry(i, j);
    lp.constraints[m * n + j] = 1.0;
  }
  lp.rhs[m] = 1.0;

  const auto res = solve_linear_program<double>(lp, cfg.tol_hull);
  diag.pivots = res.pivots;
  if (res.status == SimplexStatus::optimal) {
    std::vector<double> v = res.x;
    double total = 0.0;
    for (double& x : v) {
      if (x < 0.0) x = 0.0;
      total += x;
    }
    // A loose tol_hull can accept a phase-one optimum whose mass sits on the
    // artificials; only a solution carrying real column weight is a hull
    // witness, anything else falls through to the separation program.
    if (total > 0.5) {
      for (double& x : v) x /= total;
      // Renormalizing by total >= 0.5 can scale the residual by up to 2.
      auto car = caratheodory_reduce(scaled, std::move(v), 2.0 * cfg.tol_hull);
      diag.pivots += car.pivots;
      diag.residual = car.residual * scale;
      return HullOutcome(std::move(car.coefficients), diag);
    }
  }

  try {
    SeparatingNormal normal = separating_normal(M, cfg);
    diag.margin = normal.margin();
    return HullOutcome(std::move(normal), diag);
  } catch (const NoStrictSeparation&) {
    throw NumericalAmbiguity(
        "origin_in_hull: neither hull membership (residual <= tol_hull) nor strict separation "
        "(margin > tol_sep) is certifiable; the tolerance band is too tight for this instance");
  }
}

}  // namespace farkas_balance
