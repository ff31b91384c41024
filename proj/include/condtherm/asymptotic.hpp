#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

#include "condtherm/core.hpp"

namespace condtherm {

/// F_beta(u) = sum_i u_i (E_i + ln(u_i) / beta), with 0 ln 0 = 0.
template <class T>
double free_energy(const StateVector<T>& u, const GibbsContext<T>& ctx) {
  validate_state(u, ctx, true);
  double f = 0;
  for (std::size_t i = 0; i < u.dim(); ++i) {
    const double p = to_double(u[i]);
    if (p <= 0) continue;
    f += p * (ctx.energies[i] + std::log(p) / ctx.beta);
  }
  return f;
}

/// F_beta(u) - F_beta(g), evaluated as the relative entropy D(u || g) / beta.
template <class T>
double relative_free_energy(const StateVector<T>& u, const GibbsContext<T>& ctx) {
  validate_state(u, ctx, true);
  double f = 0;
  for (std::size_t i = 0; i < u.dim(); ++i) {
    const double p = to_double(u[i]);
    if (p <= 0) continue;
    f += p * std::log(p / to_double(ctx.gibbs[i]));
  }
  return f / ctx.beta;
}

/// Averaged free energy sum_x p_x F(u^{|x}); `relative` subtracts F(g) so free
/// states score exactly zero.
template <class T>
double resource_value(const CQState<T>& u, const GibbsContext<T>& ctx, bool relative = true) {
  double total = 0;
  for (std::size_t x = 0; x < u.branches(); ++x) {
    const T p = u.column(x).mass();
    if (p == T(0)) continue;
    const auto cond = u.conditional(x);
    total += to_double(p) * (relative ? relative_free_energy(cond, ctx) : free_energy(cond, ctx));
  }
  return total;
}

/// True when every branch with positive weight is proportional to g.
template <class T>
bool is_free(const CQState<T>& u, const GibbsContext<T>& ctx) {
  for (const auto& c : u.columns()) {
    const T p = c.mass();
    for (std::size_t i = 0; i < c.dim(); ++i)
      if (!near(c[i], T(p * ctx.gibbs[i]), ctx.policy.eps_cmp)) return false;
  }
  return true;
}

enum class RateStatus { Finite, FreeSource, FreeTarget };

struct RateResult {
  double f_source = 0;
  double f_target = 0;
  double rate = 0;
  RateStatus status = RateStatus::Finite;
};

/// Optimal asymptotic rate f(U) / f(V). A free target gives an unbounded rate
/// (reported as infinity), a free source a zero rate.
template <class T>
RateResult asymptotic_rate(const CQState<T>& u, const CQState<T>& v, const GibbsContext<T>& ctx,
                           bool relative = true) {
  RateResult out;
  out.f_source = resource_value(u, ctx, relative);
  out.f_target = resource_value(v, ctx, relative);
  if (is_free(v, ctx)) {
    out.status = RateStatus::FreeTarget;
    out.rate = std::numeric_limits<double>::infinity();
  } else if (is_free(u, ctx)) {
    out.status = RateStatus::FreeSource;
    out.rate = 0;
  } else {
    out.rate = out.f_source / out.f_target;
  }
  return out;
}

}  // namespace condtherm
