#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "condtherm/convert.hpp"
#include "condtherm/core.hpp"
#include "condtherm/synth.hpp"

namespace condtherm {

/// Seeded generator with platform-independent value mapping (the standard
/// distributions are implementation-defined, the engine is not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  std::size_t index(std::size_t n) { return static_cast<std::size_t>(integer(0, static_cast<std::int64_t>(n) - 1)); }

  bool chance(double p) { return uniform() < p; }

  std::uint64_t next_seed() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Random scalar in [0, 1]; rationals use denominator `den`.
template <class T>
T random_fraction(Rng& rng, std::int64_t den = 8) {
  if constexpr (is_exact_v<T>) {
    return T(rng.integer(0, den), den);
  } else {
    return rng.uniform();
  }
}

/// Strictly positive weights summing to one.
template <class T>
std::vector<T> random_weights(std::size_t n, Rng& rng) {
  std::vector<T> w(n);
  for (auto& x : w) {
    if constexpr (is_exact_v<T>) {
      x = T(rng.integer(1, 9));
    } else {
      x = 0.05 + rng.uniform();
    }
  }
  const T total = sum(w);
  for (auto& x : w) x /= total;
  return w;
}

/// Random context: rational Gibbs weights in exact mode, a random spectrum in
/// [0, 2) at beta = 1 otherwise.
template <class T>
GibbsContext<T> random_context(std::size_t d, Rng& rng, NumericPolicy policy = {}) {
  if constexpr (is_exact_v<T>) {
    return context_from_weights<T>(random_weights<T>(d, rng), policy);
  } else {
    std::vector<double> energies(d);
    for (auto& e : energies) e = 2.0 * rng.uniform();
    return context_from_energies(std::move(energies), 1.0, policy);
  }
}

/// Random normalized state; about a quarter of the levels are empty.
template <class T>
StateVector<T> random_state(const GibbsContext<T>& ctx, Rng& rng) {
  const std::size_t d = ctx.dim();
  std::vector<T> w(d, T(0));
  bool any = false;
  for (auto& x : w) {
    if (rng.chance(0.25)) continue;
    if constexpr (is_exact_v<T>) {
      x = T(rng.integer(1, 9));
    } else {
      x = 0.01 + rng.uniform();
    }
    any = true;
  }
  if (!any) w[rng.index(d)] = T(1);
  const T total = sum(w);
  for (auto& x : w) x /= total;
  return StateVector<T>(std::move(w));
}

template <class T>
CQState<T> random_cq(const GibbsContext<T>& ctx, std::size_t branches, Rng& rng) {
  const auto p = random_weights<T>(branches, rng);
  std::vector<StateVector<T>> cols;
  for (std::size_t x = 0; x < branches; ++x) cols.push_back(random_state(ctx, rng).scaled(p[x]));
  return CQState<T>(std::move(cols));
}

/// Partial level thermalization: on levels (i, j) mixes the identity with the
/// map sending both columns to (g_i, g_j) / (g_i + g_j).
template <class T>
TOMatrix<T> partial_level_thermalization(const GibbsContext<T>& ctx, std::size_t i, std::size_t j, const T& lambda) {
  auto t = TOMatrix<T>::identity(ctx.dim());
  const T pair = ctx.gibbs[i] + ctx.gibbs[j];
  const T gi = ctx.gibbs[i] / pair, gj = ctx.gibbs[j] / pair;
  const T keep = T(1) - lambda;
  t.m(i, i) = keep + lambda * gi;
  t.m(j, i) = lambda * gj;
  t.m(i, j) = lambda * gi;
  t.m(j, j) = keep + lambda * gj;
  return t;
}

template <class T>
Matrix<T> multiply(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) fail(ErrorCode::DimensionMismatch, "matrix product");
  Matrix<T> out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == T(0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += a(i, k) * b(k, j);
    }
  return out;
}

/// Product of `steps` random partial level thermalizations, sometimes mixed
/// with full thermalization. Exactly Gibbs-stochastic by construction.
template <class T>
TOMatrix<T> random_gibbs_stochastic(const GibbsContext<T>& ctx, std::size_t steps, Rng& rng) {
  const std::size_t d = ctx.dim();
  auto t = TOMatrix<T>::identity(d);
  if (d < 2) return t;
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t i = rng.index(d);
    std::size_t j = rng.index(d - 1);
    if (j >= i) ++j;
    t.m = multiply(partial_level_thermalization(ctx, i, j, random_fraction<T>(rng)).m, t.m);
  }
  if (steps > 0 && rng.chance(0.2)) {
    const T mu = random_fraction<T>(rng) / T(2);
    const auto full = TOMatrix<T>::thermalize(ctx);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) t.m(a, b) = (T(1) - mu) * t.m(a, b) + mu * full.m(a, b);
  }
  return t;
}

template <class T>
TOMatrix<T> random_gibbs_stochastic(const GibbsContext<T>& ctx, std::size_t steps, std::uint64_t seed) {
  Rng rng(seed);
  return random_gibbs_stochastic(ctx, steps, rng);
}

template <class T>
CTOPlan<T> random_cto(const GibbsContext<T>& ctx, std::size_t sources, std::size_t targets, Rng& rng) {
  CTOPlan<T> plan;
  plan.control = Matrix<T>(sources, targets);
  for (std::size_t x = 0; x < sources; ++x) {
    const auto row = random_weights<T>(targets, rng);
    for (std::size_t y = 0; y < targets; ++y) plan.control(x, y) = row[y];
  }
  for (std::size_t k = 0; k < sources * targets; ++k)
    plan.maps.push_back(random_gibbs_stochastic(ctx, static_cast<std::size_t>(rng.integer(0, 2 * ctx.dim())), rng));
  return plan;
}

template <class T>
CTOPlan<T> random_cto(const GibbsContext<T>& ctx, std::size_t sources, std::size_t targets, std::uint64_t seed) {
  Rng rng(seed);
  return random_cto(ctx, sources, targets, rng);
}

template <class T>
CTOPlan<T> identity_plan(std::size_t branches, std::size_t d) {
  CTOPlan<T> plan;
  plan.control = Matrix<T>::identity(branches);
  for (std::size_t x = 0; x < branches; ++x)
    for (std::size_t y = 0; y < branches; ++y) plan.maps.push_back(TOMatrix<T>::identity(d));
  return plan;
}

/// The binary mixture (p u, (1 - p) g), with empty branches removed.
template <class T>
CQState<T> gibbs_mixture(const StateVector<T>& u, const T& p, const GibbsContext<T>& ctx) {
  return canonicalize_cq(CQState<T>{u.scaled(p), StateVector<T>(ctx.gibbs).scaled(T(1) - p)}, ctx.policy);
}

/// Brute-force threshold: the first p on the grid 0, step, 2 step, ... , 1 at
/// which (p u, (1 - p) g) converts to v.
template <class T>
T pmin_grid_oracle(const StateVector<T>& u, const StateVector<T>& v, const GibbsContext<T>& ctx, double step) {
  if (!(step > 0)) fail(ErrorCode::ValidationError, "grid step must be positive");
  if (!thermo_majorizes(u, v, ctx)) fail(ErrorCode::NotThermoMajorizing, "u does not thermo-majorize v");
  const auto n = static_cast<std::int64_t>(std::llround(1.0 / step));
  const auto target = CQState<T>::single(v);
  for (std::int64_t k = 0; k <= n; ++k) {
    T p;
    if constexpr (is_exact_v<T>) {
      p = T(k, n);
    } else {
      p = static_cast<double>(k) / static_cast<double>(n);
    }
    if (check_cto(gibbs_mixture(u, p, ctx), target, ctx).convertible) return p;
  }
  return T(1);
}

/// States reachable from U: the first is U itself (identity plan), the rest
/// are images under random CTOs with 1 to 3 target branches.
template <class T>
std::vector<CQState<T>> reachable_sample(const CQState<T>& u, const GibbsContext<T>& ctx, std::size_t count,
                                         std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CQState<T>> out;
  if (count == 0) return out;
  out.push_back(apply_cto(identity_plan<T>(u.branches(), ctx.dim()), u, ctx));
  while (out.size() < count) {
    const auto m = static_cast<std::size_t>(rng.integer(1, 3));
    out.push_back(apply_cto(random_cto(ctx, u.branches(), m, rng), u, ctx));
  }
  return out;
}

/// Moves up to `delta` mass from the lowest-ratio occupied levels to the
/// highest-ratio level. Every interior Lorenz vertex rises, so the curve moves
/// up pointwise.
template <class T>
StateVector<T> raise_lorenz(const StateVector<T>& w, T delta, const GibbsContext<T>& ctx) {
  const std::size_t d = ctx.dim();
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& g = ctx.gibbs;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return w[a] * g[b] > w[b] * g[a]; });
  std::vector<T> out = w.values();
  const std::size_t top = order.front();
  for (std::size_t k = d; k-- > 1 && delta > T(0);) {
    const std::size_t lvl = order[k];
    const T moved = std::min(out[lvl], delta);
    out[lvl] -= moved;
    out[top] += moved;
    delta -= moved;
  }
  return StateVector<T>(std::move(out));
}

/// Random member of the witness set: i.i.d. uniform increments, reverse
/// cumulative sums per column, normalized to total mass one.
template <class T>
WitnessMatrix<T> random_witness(std::size_t segments, std::size_t targets, Rng& rng) {
  FarkasCertificate<T> cert;
  for (std::size_t k = 0; k < segments * targets; ++k) {
    if constexpr (is_exact_v<T>) {
      cert.ineq.push_back(T(rng.integer(1, 16)));
    } else {
      cert.ineq.push_back(1e-3 + rng.uniform());
    }
  }
  return extract_witness(cert, segments, targets);
}

template <class T>
struct Instance {
  GibbsContext<T> context;
  CQState<T> source;
  CQState<T> target;
};

/// Random source with `sources` branches. With `reachable` the target is its
/// image under a random CTO (hence convertible), otherwise an independent draw.
template <class T>
Instance<T> random_instance(std::size_t d, std::size_t sources, std::size_t targets, std::uint64_t seed,
                            bool reachable = true, NumericPolicy policy = {}) {
  Rng rng(seed);
  if constexpr (is_exact_v<T>) policy.mode = Mode::Rational;
  auto ctx = random_context<T>(d, rng, policy);
  auto source = canonicalize_cq(random_cq(ctx, sources, rng), ctx.policy);
  CQState<T> target = reachable ? apply_cto(random_cto(ctx, source.branches(), targets, rng), source, ctx)
                                : canonicalize_cq(random_cq(ctx, targets, rng), ctx.policy);
  return {std::move(ctx), std::move(source), std::move(target)};
}

}  // namespace condtherm
