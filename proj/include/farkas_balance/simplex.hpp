#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "farkas_balance/errors.hpp"

namespace farkas_balance {

template <typename Scalar>
struct SimplexTraits {
  // Exact arithmetic by default (rationals): no tolerance slack anywhere.
  static Scalar entering_eps() { return Scalar(0); }
  static Scalar pivot_eps() { return Scalar(0); }
};

template <>
struct SimplexTraits<double> {
  static double entering_eps() { return 1e-12; }
  static double pivot_eps() { return 1e-11; }
};

enum class SimplexStatus { optimal, infeasible, unbounded };

/** min objective . x  subject to  constraints x = rhs, x >= 0 (dense, row-major). */
template <typename Scalar>
struct LinearProgram {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Scalar> constraints;  // rows * cols
  std::vector<Scalar> rhs;          // rows
  std::vector<Scalar> objective;    // cols
  // Columns allowed to seed the initial basis when they are unit vectors
  // (typically slacks/surpluses); empty means every column may.
  std::vector<char> initial_basis_candidates;
};

template <typename Scalar>
struct SimplexResult {
  SimplexStatus status = SimplexStatus::optimal;
  std::vector<Scalar> x;
  Scalar objective = Scalar(0);
  Scalar infeasibility = Scalar(0);  // phase-one optimum (sum of artificials)
  std::size_t pivots = 0;
};

/**
 * Two-phase primal simplex over a dense tableau with Bland's smallest-index
 * rule for both the entering column and ratio-test ties, so it cannot cycle
 * and identical inputs walk identical pivot sequences. Columns that are
 * already unit vectors are used as the initial basis; remaining rows get
 * artificial variables, which may leave the basis but never re-enter.
 *
 * Instantiable with exact scalar types (all tolerances collapse to zero).
 */
template <typename Scalar>
class DenseSimplex {
 public:
  explicit DenseSimplex(const LinearProgram<Scalar>& lp, Scalar feasibility_tol = Scalar(0),
                        std::size_t max_pivots = 0)
      : rows_(lp.rows), cols_(lp.cols), feas_tol_(feasibility_tol) {
    if (lp.constraints.size() != rows_ * cols_ || lp.rhs.size() != rows_ || lp.objective.size() != cols_)
      throw InvalidArgument("simplex: inconsistent program dimensions");
    if (!lp.initial_basis_candidates.empty() && lp.initial_basis_candidates.size() != cols_)
      throw InvalidArgument("simplex: initial basis candidate mask has wrong length");
    max_pivots_ = max_pivots ? max_pivots : 2000 + 200 * (rows_ + cols_);

    tableau_.assign(lp.constraints.begin(), lp.constraints.end());
    rhs_ = lp.rhs;
    cost_ = lp.objective;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (rhs_[i] < Scalar(0)) {
        rhs_[i] = -rhs_[i];
        for (std::size_t j = 0; j < cols_; ++j) at(i, j) = -at(i, j);
      }
    }

    basis_.assign(rows_, kUnassigned);
    in_basis_.assign(cols_, 0);
    assign_unit_column_basis(lp.initial_basis_candidates);

    std::size_t artificials = 0;
    for (std::size_t i = 0; i < rows_; ++i)
      if (basis_[i] == kUnassigned) ++artificials;
    width_ = cols_ + artificials;
    if (artificials > 0) {
      std::vector<Scalar> wide(rows_ * width_, Scalar(0));
      for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) wide[i * width_ + j] = tableau_[i * cols_ + j];
      tableau_ = std::move(wide);
      std::size_t next = cols_;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (basis_[i] == kUnassigned) {
          at(i, next) = Scalar(1);
          basis_[i] = next;
          ++next;
        }
      }
    }
  }

  SimplexResult<Scalar> solve() {
    SimplexResult<Scalar> result;

    std::vector<Scalar> phase1_cost(width_, Scalar(0));
    for (std::size_t j = cols_; j < width_; ++j) phase1_cost[j] = Scalar(1);
    run_phase(phase1_cost);
    result.infeasibility = objective_value_;
    result.pivots = pivots_;
    if (objective_value_ > feas_tol_) {
      result.status = SimplexStatus::infeasible;
      result.x = extract();
      return result;
    }

    drive_out_artificials();

    std::vector<Scalar> phase2_cost(width_, Scalar(0));
    for (std::size_t j = 0; j < cols_; ++j) phase2_cost[j] = cost_[j];
    const bool bounded = run_phase(phase2_cost);
    result.pivots = pivots_;
    result.x = extract();
    result.objective = objective_value_;
    result.status = bounded ? SimplexStatus::optimal : SimplexStatus::unbounded;
    return result;
  }

 private:
  static constexpr std::size_t kUnassigned = static_cast<std::size_t>(-1);

  Scalar& at(std::size_t i, std::size_t j) { return tableau_[i * width_ + j]; }
  const Scalar& at(std::size_t i, std::size_t j) const { return tableau_[i * width_ + j]; }

  static Scalar sabs(const Scalar& v) { return v < Scalar(0) ? Scalar(-v) : v; }

  void assign_unit_column_basis(const std::vector<char>& candidates) {
    // A column exactly equal to a unit vector e_i serves as the starting
    // basic variable of row i; constructed programs place slack columns here.
    for (std::size_t j = 0; j < cols_; ++j) {
      if (!candidates.empty() && !candidates[j]) continue;
      std::size_t one_row = kUnassigned;
      bool unit = true;
      for (std::size_t i = 0; i < rows_ && unit; ++i) {
        const Scalar& v = tableau_[i * cols_ + j];
        if (v == Scalar(1)) {
          if (one_row != kUnassigned)
            unit = false;
          else
            one_row = i;
        } else if (!(v == Scalar(0))) {
          unit = false;
        }
      }
      if (unit && one_row != kUnassigned && basis_[one_row] == kUnassigned) {
        basis_[one_row] = j;
        in_basis_[j] = 1;
      }
    }
  }

  /** Prices the given cost vector over the current basis and pivots to
   *  optimality; returns false on unboundedness. */
  bool run_phase(const std::vector<Scalar>& cost) {
    reduced_.assign(width_, Scalar(0));
    objective_value_ = Scalar(0);
    std::vector<Scalar> basic_cost(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      basic_cost[i] = cost[basis_[i]];
      objective_value_ += basic_cost[i] * rhs_[i];
    }
    for (std::size_t j = 0; j < width_; ++j) {
      Scalar z = cost[j];
      for (std::size_t i = 0; i < rows_; ++i)
        if (!(at(i, j) == Scalar(0))) z -= basic_cost[i] * at(i, j);
      reduced_[j] = z;
    }

    const Scalar enter_eps = SimplexTraits<Scalar>::entering_eps();
    const Scalar pivot_eps = SimplexTraits<Scalar>::pivot_eps();
    while (true) {
      std::size_t entering = kUnassigned;
      for (std::size_t j = 0; j < cols_; ++j) {  // artificials never re-enter
        if (in_basis_[j]) continue;
        if (reduced_[j] < -enter_eps) {
          entering = j;
          break;
        }
      }
      if (entering == kUnassigned) return true;

      std::size_t leaving = kUnassigned;
      Scalar best_ratio = Scalar(0);
      for (std::size_t i = 0; i < rows_; ++i) {
        if (at(i, entering) > pivot_eps) {
          const Scalar ratio = rhs_[i] / at(i, entering);
          if (leaving == kUnassigned || ratio < best_ratio ||
              (ratio == best_ratio && basis_[i] < basis_[leaving])) {
            leaving = i;
            best_ratio = ratio;
          }
        }
      }
      if (leaving == kUnassigned) return false;
      pivot(leaving, entering);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    if (++pivots_ > max_pivots_) throw Error("simplex: pivot limit exceeded");

    const Scalar piv = at(row, col);
    for (std::size_t j = 0; j < width_; ++j) at(row, j) = at(row, j) / piv;
    rhs_[row] = rhs_[row] / piv;
    at(row, col) = Scalar(1);

    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == row) continue;
      const Scalar factor = at(i, col);
      if (factor == Scalar(0)) continue;
      for (std::size_t j = 0; j < width_; ++j) at(i, j) -= factor * at(row, j);
      at(i, col) = Scalar(0);
      rhs_[i] -= factor * rhs_[row];
      clamp_rhs(i);
    }

    const Scalar zfac = reduced_[col];
    if (!(zfac == Scalar(0))) {
      objective_value_ += zfac * rhs_[row];
      for (std::size_t j = 0; j < width_; ++j) reduced_[j] -= zfac * at(row, j);
      reduced_[col] = Scalar(0);
    }

    if (basis_[row] < cols_) in_basis_[basis_[row]] = 0;
    basis_[row] = col;
    if (col < cols_) in_basis_[col] = 1;
  }

  void clamp_rhs(std::size_t i) {
    if (SimplexTraits<Scalar>::pivot_eps() == Scalar(0)) return;  // exact arithmetic
    if (rhs_[i] < Scalar(0) && -rhs_[i] < Scalar(SimplexTraits<Scalar>::pivot_eps()))
      rhs_[i] = Scalar(0);
  }

  void drive_out_artificials() {
    const Scalar pivot_eps = SimplexTraits<Scalar>::pivot_eps();
    for (std::size_t i = 0; i < rows_; ++i) {
      if (basis_[i] < cols_) continue;
      // Largest-magnitude eligible entry; a near-zero pivot here would blow
      // the row up.
      std::size_t col = kUnassigned;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (in_basis_[j]) continue;
        if (sabs(at(i, j)) > pivot_eps && (col == kUnassigned || sabs(at(i, j)) > sabs(at(i, col))))
          col = j;
      }
      // No eligible column means the row is redundant; the artificial stays
      // basic at value ~0 and its row can never win a ratio test.
      if (col != kUnassigned) pivot(i, col);
    }
  }

  std::vector<Scalar> extract() const {
    std::vector<Scalar> x(cols_, Scalar(0));
    for (std::size_t i = 0; i < rows_; ++i)
      if (basis_[i] < cols_) x[basis_[i]] = rhs_[i] < Scalar(0) ? Scalar(0) : rhs_[i];
    return x;
  }

  std::size_t rows_;
  std::size_t cols_;
  std::size_t width_ = 0;
  Scalar feas_tol_;
  std::size_t max_pivots_;
  std::vector<Scalar> tableau_;
  std::vector<Scalar> rhs_;
  std::vector<Scalar> cost_;
  std::vector<Scalar> reduced_;
  Scalar objective_value_ = Scalar(0);
  std::vector<std::size_t> basis_;
  std::vector<char> in_basis_;
  std::size_t pivots_ = 0;
};

template <typename Scalar>
SimplexResult<Scalar> solve_linear_program(const LinearProgram<Scalar>& lp,
                                           Scalar feasibility_tol = Scalar(0),
                                           std::size_t max_pivots = 0) {
  return DenseSimplex<Scalar>(lp, feasibility_tol, max_pivots).solve();
}

}  // namespace farkas_balance
