#pragma once

#include <cstddef>
#include <vector>

#include "condtherm/convert.hpp"
#include "condtherm/core.hpp"
#include "condtherm/lorenz.hpp"
#include "condtherm/lp.hpp"

namespace condtherm {

/// Output columns v^y = sum_x R_xy T^{(x,y)} u^x, canonicalized.
template <class T>
CQState<T> apply_cto(const CTOPlan<T>& plan, const CQState<T>& u, const GibbsContext<T>& ctx) {
  if (plan.sources() != u.branches())
    fail(ErrorCode::DimensionMismatch, "plan expects " + std::to_string(plan.sources()) + " source branches, state has " +
                                           std::to_string(u.branches()));
  if (plan.maps.size() != plan.sources() * plan.targets())
    fail(ErrorCode::DimensionMismatch, "plan needs one thermal operation per control entry");
  const std::size_t d = ctx.dim();
  if (u.dim() != d) fail(ErrorCode::DimensionMismatch, "state and Gibbs context differ in dimension");
  for (const auto& t : plan.maps)
    if (t.m.rows() != d || t.m.cols() != d) fail(ErrorCode::DimensionMismatch, "thermal operation has wrong shape");

  std::vector<StateVector<T>> out;
  for (std::size_t y = 0; y < plan.targets(); ++y) {
    std::vector<T> col(d, T(0));
    for (std::size_t x = 0; x < plan.sources(); ++x) {
      const T& r = plan.control(x, y);
      if (r == T(0)) continue;
      const auto image = plan.map(x, y).m.apply(u.column(x).values());
      for (std::size_t i = 0; i < d; ++i) col[i] += r * image[i];
    }
    out.emplace_back(std::move(col));
  }
  return canonicalize_cq(CQState<T>(std::move(out)), ctx.policy);
}

namespace detail {

// Adds the Gibbs-stochastic constraints for a d x d block of variables
// starting at `offset` (entry (i, j) at offset + i * d + j).
template <class T>
void add_gibbs_stochastic_block(LinearSystem<T>& sys, std::size_t offset, const GibbsContext<T>& ctx) {
  const std::size_t d = ctx.dim();
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<T> row(sys.n_vars, T(0));
    for (std::size_t i = 0; i < d; ++i) row[offset + i * d + j] = T(1);
    sys.add_eq(std::move(row), T(1));
  }
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<T> row(sys.n_vars, T(0));
    for (std::size_t j = 0; j < d; ++j) row[offset + i * d + j] = ctx.gibbs[j];
    sys.add_eq(std::move(row), ctx.gibbs[i]);
  }
}

template <class T>
TOMatrix<T> read_block(const std::vector<T>& point, std::size_t offset, std::size_t d) {
  TOMatrix<T> t{Matrix<T>(d, d)};
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) t.m(i, j) = point[offset + i * d + j];
  return t;
}

}  // namespace detail

/// A Gibbs-stochastic T with T u = v, found by linear feasibility over the d^2
/// entries. u and v may be equal-mass branches.
template <class T>
TOMatrix<T> synthesize_to(const StateVector<T>& u, const StateVector<T>& v, const GibbsContext<T>& ctx) {
  if (!thermo_majorizes(u, v, ctx)) fail(ErrorCode::NotThermoMajorizing, "u does not thermo-majorize v");
  const std::size_t d = ctx.dim();
  LinearSystem<T> sys(d * d);
  detail::add_gibbs_stochastic_block(sys, 0, ctx);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<T> row(d * d, T(0));
    for (std::size_t j = 0; j < d; ++j) row[i * d + j] = u[j];
    sys.add_eq(std::move(row), v[i]);
  }
  const auto res = solve_feasibility(sys, ctx.policy);
  if (!res.feasible()) fail(ErrorCode::NotThermoMajorizing, "no Gibbs-stochastic map takes u to v");
  return detail::read_block(res.point, 0, d);
}

/// Realizes a convertible pair: R comes from the convertibility program, then
/// for each target branch one linear program finds Gibbs-stochastic maps
/// M^{(x,y)} with sum_x R_xy M^{(x,y)} u^x = v^y. Unused entries get the identity.
template <class T>
CTOPlan<T> synthesize_cto(const CQState<T>& u, const CQState<T>& v, const GibbsContext<T>& ctx) {
  auto decision = check_cto(u, v, ctx);
  if (!decision.convertible) fail(ErrorCode::NotConvertible, "source cannot be converted to target");
  Matrix<T> r = std::move(*decision.plan_seed);
  const std::size_t l = r.rows(), m = r.cols(), d = ctx.dim();

  if constexpr (!is_exact_v<T>) {
    for (std::size_t x = 0; x < l; ++x) {
      double row = 0;
      for (std::size_t y = 0; y < m; ++y) {
        if (r(x, y) <= ctx.policy.eps_merge) r(x, y) = 0;
        row += r(x, y);
      }
      for (std::size_t y = 0; y < m; ++y) r(x, y) /= row;
    }
  }

  CTOPlan<T> plan;
  plan.control = r;
  plan.maps.assign(l * m, TOMatrix<T>::identity(d));
  for (std::size_t y = 0; y < m; ++y) {
    std::vector<std::size_t> active;
    for (std::size_t x = 0; x < l; ++x)
      if (r(x, y) != T(0)) active.push_back(x);
    if (active.empty()) continue;

    LinearSystem<T> sys(active.size() * d * d);
    for (std::size_t k = 0; k < active.size(); ++k) detail::add_gibbs_stochastic_block(sys, k * d * d, ctx);
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<T> row(sys.n_vars, T(0));
      for (std::size_t k = 0; k < active.size(); ++k) {
        const auto& col = u.column(active[k]);
        const T& weight = r(active[k], y);
        for (std::size_t j = 0; j < d; ++j) row[k * d * d + i * d + j] = weight * col[j];
      }
      sys.add_eq(std::move(row), v.column(y)[i]);
    }
    const auto res = solve_feasibility(sys, ctx.policy);
    if (!res.feasible()) fail(ErrorCode::NumericBreakdown, "branch synthesis failed for a convertible pair");
    for (std::size_t k = 0; k < active.size(); ++k) plan.map(active[k], y) = detail::read_block(res.point, k * d * d, d);
  }
  return plan;
}

/// A CTO with an arbitrary index j: sub-stochastic control parts R^j summing to
/// a row-stochastic matrix, and one thermal operation per part.
template <class T>
struct GeneralCTO {
  std::vector<Matrix<T>> parts;
  std::vector<TOMatrix<T>> maps;
};

template <class T>
CQState<T> apply_general_cto(const GeneralCTO<T>& op, const CQState<T>& u, const GibbsContext<T>& ctx) {
  if (op.parts.empty() || op.parts.size() != op.maps.size())
    fail(ErrorCode::DimensionMismatch, "need one thermal operation per control part");
  const std::size_t l = op.parts[0].rows(), m = op.parts[0].cols(), d = ctx.dim();
  if (u.branches() != l) fail(ErrorCode::DimensionMismatch, "control parts do not match source branches");
  std::vector<std::vector<T>> cols(m, std::vector<T>(d, T(0)));
  for (std::size_t j = 0; j < op.parts.size(); ++j) {
    for (std::size_t x = 0; x < l; ++x) {
      const auto image = op.maps[j].m.apply(u.column(x).values());
      for (std::size_t y = 0; y < m; ++y) {
        const T& r = op.parts[j](x, y);
        if (r == T(0)) continue;
        for (std::size_t i = 0; i < d; ++i) cols[y][i] += r * image[i];
      }
    }
  }
  std::vector<StateVector<T>> out;
  for (auto& c : cols) out.emplace_back(std::move(c));
  return canonicalize_cq(CQState<T>(std::move(out)), ctx.policy);
}

/// Re-indexes a CTO by (x, y): T~^{(x,y)} = sum_j R^j_xy T^{(j)} / R_xy.
template <class T>
CTOPlan<T> canonicalize_cto(const GeneralCTO<T>& op, const GibbsContext<T>& ctx) {
  if (op.parts.empty() || op.parts.size() != op.maps.size())
    fail(ErrorCode::DimensionMismatch, "need one thermal operation per control part");
  const std::size_t l = op.parts[0].rows(), m = op.parts[0].cols(), d = ctx.dim();
  const double eps = ctx.policy.eps_cmp;

  Matrix<T> r(l, m);
  for (const auto& part : op.parts) {
    if (part.rows() != l || part.cols() != m) fail(ErrorCode::DimensionMismatch, "control parts differ in shape");
    for (std::size_t x = 0; x < l; ++x)
      for (std::size_t y = 0; y < m; ++y) {
        if (!geq(part(x, y), T(0), eps)) fail(ErrorCode::NotStochasticSum, "control part has a negative entry");
        r(x, y) += part(x, y);
      }
  }
  for (std::size_t x = 0; x < l; ++x) {
    T row(0);
    for (std::size_t y = 0; y < m; ++y) row += r(x, y);
    if (!near(row, T(1), eps)) fail(ErrorCode::NotStochasticSum, "control parts do not sum to a row-stochastic matrix");
  }
  for (const auto& t : op.maps) validate_to(t, ctx);

  CTOPlan<T> plan;
  plan.control = r;
  plan.maps.assign(l * m, TOMatrix<T>::identity(d));
  for (std::size_t x = 0; x < l; ++x) {
    for (std::size_t y = 0; y < m; ++y) {
      if (r(x, y) == T(0)) continue;
      Matrix<T> avg(d, d);
      for (std::size_t j = 0; j < op.parts.size(); ++j) {
        const T& w = op.parts[j](x, y);
        if (w == T(0)) continue;
        for (std::size_t a = 0; a < d; ++a)
          for (std::size_t b = 0; b < d; ++b) avg(a, b) += w * op.maps[j].m(a, b);
      }
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) avg(a, b) /= r(x, y);
      plan.map(x, y) = TOMatrix<T>{std::move(avg)};
    }
  }
  return plan;
}

}  // namespace condtherm
