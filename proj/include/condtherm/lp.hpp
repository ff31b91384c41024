#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "condtherm/error.hpp"
#include "condtherm/numeric.hpp"

namespace condtherm {

/// Feasibility problem over x >= 0 with equality rows (row . x = rhs) and
/// inequality rows (row . x >= rhs).
template <class T>
struct LinearSystem {
  std::size_t n_vars = 0;
  std::vector<std::vector<T>> eq_rows;
  std::vector<T> eq_rhs;
  std::vector<std::vector<T>> ineq_rows;
  std::vector<T> ineq_rhs;

  explicit LinearSystem(std::size_t n = 0) : n_vars(n) {}

  void add_eq(std::vector<T> row, T rhs) {
    check(row);
    eq_rows.push_back(std::move(row));
    eq_rhs.push_back(std::move(rhs));
  }
  void add_ineq(std::vector<T> row, T rhs) {
    check(row);
    ineq_rows.push_back(std::move(row));
    ineq_rhs.push_back(std::move(rhs));
  }

 private:
  void check(const std::vector<T>& row) const {
    if (row.size() != n_vars) fail(ErrorCode::DimensionMismatch, "constraint row has wrong length");
  }
};

/// Multipliers y_eq (free sign) and y_in (>= 0) with
/// A_eq^T y_eq + A_in^T y_in <= 0 and b_eq . y_eq + b_in . y_in > 0.
template <class T>
struct FarkasCertificate {
  std::vector<T> eq;
  std::vector<T> ineq;
};

enum class Feasibility { Feasible, Infeasible };

template <class T>
struct FeasibilityResult {
  Feasibility status = Feasibility::Infeasible;
  std::vector<T> point;
  FarkasCertificate<T> certificate;

  bool feasible() const noexcept { return status == Feasibility::Feasible; }
};

/// Checks a candidate point against every constraint, independently of the solver.
template <class T>
bool verify_point(const LinearSystem<T>& sys, const std::vector<T>& x, double eps) {
  if (x.size() != sys.n_vars) return false;
  for (const auto& v : x)
    if (!geq(v, T(0), eps)) return false;
  auto dot = [&](const std::vector<T>& row) {
    T acc(0);
    for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * x[j];
    return acc;
  };
  for (std::size_t k = 0; k < sys.eq_rows.size(); ++k)
    if (!near(dot(sys.eq_rows[k]), sys.eq_rhs[k], eps)) return false;
  for (std::size_t k = 0; k < sys.ineq_rows.size(); ++k)
    if (!geq(dot(sys.ineq_rows[k]), sys.ineq_rhs[k], eps)) return false;
  return true;
}

/// Checks the Farkas alternative, independently of the solver.
template <class T>
bool verify_certificate(const LinearSystem<T>& sys, const FarkasCertificate<T>& cert, double eps) {
  if (cert.eq.size() != sys.eq_rows.size() || cert.ineq.size() != sys.ineq_rows.size()) return false;
  for (const auto& y : cert.ineq)
    if (!geq(y, T(0), eps)) return false;
  for (std::size_t j = 0; j < sys.n_vars; ++j) {
    T col(0);
    for (std::size_t k = 0; k < sys.eq_rows.size(); ++k) col += sys.eq_rows[k][j] * cert.eq[k];
    for (std::size_t k = 0; k < sys.ineq_rows.size(); ++k) col += sys.ineq_rows[k][j] * cert.ineq[k];
    if (!leq(col, T(0), eps)) return false;
  }
  T value(0);
  for (std::size_t k = 0; k < sys.eq_rows.size(); ++k) value += sys.eq_rhs[k] * cert.eq[k];
  for (std::size_t k = 0; k < sys.ineq_rows.size(); ++k) value += sys.ineq_rhs[k] * cert.ineq[k];
  if constexpr (is_exact_v<T>) {
    return value > T(0);
  } else {
    return value > eps;
  }
}

namespace detail {

/// Phase-one primal simplex on a dense tableau with Bland's rule.
///
/// Columns: structural variables, one surplus per inequality, one artificial
/// per row. Rows are sign-flipped so every right-hand side starts nonnegative.
/// The artificial columns of the final tableau hold B^{-1}, which yields the
/// phase-one duals and hence the Farkas multipliers.
template <class T>
class PhaseOneSimplex {
 public:
  PhaseOneSimplex(const LinearSystem<T>& sys, const NumericPolicy& policy) : sys_(sys), policy_(policy) {
    n_ = sys.n_vars;
    n_eq_ = sys.eq_rows.size();
    n_in_ = sys.ineq_rows.size();
    rows_ = n_eq_ + n_in_;
    art0_ = n_ + n_in_;
    cols_ = art0_ + rows_;
    tab_.assign(rows_, std::vector<T>(cols_ + 1, T(0)));
    sign_.assign(rows_, 1);
    basis_.resize(rows_);

    for (std::size_t r = 0; r < rows_; ++r) {
      const bool is_eq = r < n_eq_;
      const auto& row = is_eq ? sys.eq_rows[r] : sys.ineq_rows[r - n_eq_];
      const T& rhs = is_eq ? sys.eq_rhs[r] : sys.ineq_rhs[r - n_eq_];
      sign_[r] = rhs < T(0) ? -1 : 1;
      const T s(sign_[r]);
      for (std::size_t j = 0; j < n_; ++j) tab_[r][j] = s * row[j];
      if (!is_eq) tab_[r][n_ + (r - n_eq_)] = -s;
      tab_[r][art0_ + r] = T(1);
      tab_[r][cols_] = s * rhs;
      basis_[r] = art0_ + r;
    }

    // Reduced costs of the phase-one objective (sum of artificials).
    cost_.assign(cols_ + 1, T(0));
    for (std::size_t j = art0_; j < cols_; ++j) cost_[j] = T(1);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t j = 0; j <= cols_; ++j) cost_[j] -= tab_[r][j];
    // cost_[cols_] now holds -objective.
  }

  FeasibilityResult<T> run() {
    const std::size_t max_iter = 1000 + 50 * (rows_ + cols_);
    std::size_t iter = 0;
    while (true) {
      if (++iter > max_iter) fail(ErrorCode::NumericBreakdown, "simplex iteration limit reached");
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (is_negative(cost_[j])) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) break;

      std::size_t leave = rows_;
      T best_ratio(0);
      for (std::size_t r = 0; r < rows_; ++r) {
        if (!is_positive_pivot(tab_[r][enter])) continue;
        T ratio = tab_[r][cols_] / tab_[r][enter];
        if (leave == rows_ || ratio_less(ratio, best_ratio)) {
          leave = r;
          best_ratio = ratio;
        } else if (!ratio_less(best_ratio, ratio) && basis_[r] < basis_[leave]) {
          leave = r;  // tie: Bland picks the smallest basic index
        }
      }
      if (leave == rows_) fail(ErrorCode::NumericBreakdown, "phase-one objective appears unbounded");
      pivot(leave, enter);
    }
    return extract();
  }

 private:
  static constexpr double kCostTol = 1e-11;
  static constexpr double kPivotTol = 1e-11;
  static constexpr double kRatioTol = 1e-13;

  bool is_negative(const T& v) const {
    if constexpr (is_exact_v<T>) {
      return v < T(0);
    } else {
      return v < -kCostTol;
    }
  }
  bool is_positive_pivot(const T& v) const {
    if constexpr (is_exact_v<T>) {
      return v > T(0);
    } else {
      return v > kPivotTol;
    }
  }
  bool ratio_less(const T& a, const T& b) const {
    if constexpr (is_exact_v<T>) {
      return a < b;
    } else {
      return a < b - kRatioTol;
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const T inv = T(1) / tab_[r][c];
    for (auto& v : tab_[r]) v *= inv;
    tab_[r][c] = T(1);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r || tab_[i][c] == T(0)) continue;
      const T f = tab_[i][c];
      for (std::size_t j = 0; j <= cols_; ++j) tab_[i][j] -= f * tab_[r][j];
      tab_[i][c] = T(0);
    }
    if (cost_[c] != T(0)) {
      const T f = cost_[c];
      for (std::size_t j = 0; j <= cols_; ++j) cost_[j] -= f * tab_[r][j];
      cost_[c] = T(0);
    }
    if constexpr (!is_exact_v<T>) {
      for (std::size_t i = 0; i < rows_; ++i)
        if (tab_[i][cols_] < 0) tab_[i][cols_] = 0;
    }
    basis_[r] = c;
  }

  FeasibilityResult<T> extract() const {
    FeasibilityResult<T> result;
    const T objective = -cost_[cols_];
    bool feasible;
    if constexpr (is_exact_v<T>) {
      feasible = objective == T(0);
    } else {
      feasible = objective <= policy_.eps_lp;
    }

    if (feasible) {
      result.status = Feasibility::Feasible;
      result.point.assign(n_, T(0));
      for (std::size_t r = 0; r < rows_; ++r) {
        if (basis_[r] < n_) result.point[basis_[r]] = tab_[r][cols_];
      }
      return result;
    }

    result.status = Feasibility::Infeasible;
    result.certificate.eq.assign(n_eq_, T(0));
    result.certificate.ineq.assign(n_in_, T(0));
    for (std::size_t r = 0; r < rows_; ++r) {
      // Reduced cost of artificial r is 1 - y_r.
      T y = T(1) - cost_[art0_ + r];
      y *= T(sign_[r]);
      if (r < n_eq_) {
        result.certificate.eq[r] = y;
      } else {
        if constexpr (!is_exact_v<T>) {
          if (y < 0) y = 0;
        }
        result.certificate.ineq[r - n_eq_] = y;
      }
    }
    return result;
  }

  const LinearSystem<T>& sys_;
  NumericPolicy policy_;
  std::size_t n_ = 0, n_eq_ = 0, n_in_ = 0, rows_ = 0, cols_ = 0, art0_ = 0;
  std::vector<std::vector<T>> tab_;
  std::vector<T> cost_;
  std::vector<int> sign_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

/// Decides feasibility of `sys`. A feasible answer carries a point, an
/// infeasible one a Farkas certificate; both are re-verified before return.
/// Exact scalars give exact answers; floats use policy.eps_lp.
template <class T>
FeasibilityResult<T> solve_feasibility(const LinearSystem<T>& sys, const NumericPolicy& policy = {}) {
  for (const auto& row : sys.eq_rows)
    if (row.size() != sys.n_vars) fail(ErrorCode::DimensionMismatch, "constraint row has wrong length");
  for (const auto& row : sys.ineq_rows)
    if (row.size() != sys.n_vars) fail(ErrorCode::DimensionMismatch, "constraint row has wrong length");

  auto result = detail::PhaseOneSimplex<T>(sys, policy).run();
  if (result.feasible()) {
    if (!verify_point(sys, result.point, policy.eps_lp))
      fail(ErrorCode::NumericBreakdown, "feasible point failed re-verification");
  } else if (!verify_certificate(sys, result.certificate, policy.eps_lp)) {
    fail(ErrorCode::NumericBreakdown, "infeasibility certificate failed re-verification");
  }
  return result;
}

}  // namespace condtherm
