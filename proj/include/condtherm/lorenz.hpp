#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "condtherm/core.hpp"

namespace condtherm {

/// Piecewise-linear concave curve through cumulative (Gibbs weight, mass)
/// pairs. Vertices run from (0, 0) to (1, mass); collinear vertices are merged,
/// so every interior vertex is a genuine bend.
template <class T>
class LorenzCurve {
 public:
  using Point = std::pair<T, T>;

  LorenzCurve() = default;
  explicit LorenzCurve(std::vector<Point> points) : points_(std::move(points)) {}

  const std::vector<Point>& points() const noexcept { return points_; }
  const T& mass() const { return points_.back().second; }

  std::vector<T> bend_abscissae() const {
    std::vector<T> out;
    for (std::size_t k = 1; k + 1 < points_.size(); ++k) out.push_back(points_[k].first);
    return out;
  }

  /// Linear interpolation between the bracketing vertices.
  T operator()(const T& s) const {
    if (s <= points_.front().first) return points_.front().second;
    if (s >= points_.back().first) return points_.back().second;
    auto hi = std::upper_bound(points_.begin(), points_.end(), s,
                               [](const T& value, const Point& p) { return value < p.first; });
    auto lo = hi - 1;
    if (lo->first == s) return lo->second;
    return lo->second + (hi->second - lo->second) * (s - lo->first) / (hi->first - lo->first);
  }

 private:
  std::vector<Point> points_;
};

namespace detail {

// True when `mid` lies on the chord from `a` to `b` (within eps for floats).
template <class T>
bool collinear(const std::pair<T, T>& a, const std::pair<T, T>& mid, const std::pair<T, T>& b, double eps) {
  if constexpr (is_exact_v<T>) {
    return (mid.second - a.second) * (b.first - a.first) == (b.second - a.second) * (mid.first - a.first);
  } else {
    const double chord = a.second + (b.second - a.second) * (mid.first - a.first) / (b.first - a.first);
    return std::abs(mid.second - chord) <= eps;
  }
}

}  // namespace detail

/// Sorts levels by w_i / g_i (non-increasing, ties by index) and connects the
/// cumulative (sum g, sum w) points.
template <class T>
LorenzCurve<T> build_lorenz(const StateVector<T>& w, const GibbsContext<T>& ctx) {
  const std::size_t d = ctx.dim();
  if (w.dim() != d) fail(ErrorCode::DimensionMismatch, "state and Gibbs context differ in dimension");
  const auto& g = ctx.gibbs;

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return w[a] * g[b] > w[b] * g[a]; });

  std::vector<typename LorenzCurve<T>::Point> pts;
  pts.reserve(d + 1);
  pts.emplace_back(T(0), T(0));
  T s(0), t(0);
  for (std::size_t k = 0; k < d; ++k) {
    s += g[order[k]];
    t += w[order[k]];
    typename LorenzCurve<T>::Point next{k + 1 == d ? T(1) : s, t};
    while (pts.size() >= 2 && detail::collinear(pts[pts.size() - 2], pts.back(), next, ctx.policy.eps_merge))
      pts.pop_back();
    pts.push_back(std::move(next));
  }
  return LorenzCurve<T>(std::move(pts));
}

template <class T>
T eval_lorenz(const LorenzCurve<T>& curve, const T& s, const NumericPolicy& policy = {}) {
  if (!geq(s, T(0), policy.eps_merge) || !leq(s, T(1), policy.eps_merge))
    fail(ErrorCode::OutOfRange, "abscissa " + format_scalar(s) + " outside [0, 1]");
  return curve(s);
}

/// u thermo-majorizes v iff L[u] >= L[v] everywhere; by concavity of L[u] it
/// suffices to compare at the bends of L[v].
template <class T>
bool thermo_majorizes(const StateVector<T>& u, const StateVector<T>& v, const GibbsContext<T>& ctx) {
  if (u.dim() != ctx.dim() || v.dim() != ctx.dim())
    fail(ErrorCode::DimensionMismatch, "state and Gibbs context differ in dimension");
  if (!near(u.mass(), v.mass(), ctx.policy.eps_cmp))
    fail(ErrorCode::MassMismatch, "thermo-majorization needs equal masses");
  const auto lu = build_lorenz(u, ctx);
  const auto lv = build_lorenz(v, ctx);
  for (const auto& [s, t] : lv.points()) {
    if (!geq(lu(s), t, ctx.policy.eps_cmp)) return false;
  }
  return true;
}

/// Union of interior bend abscissae of several curves, plus 0 and 1.
template <class T>
std::vector<T> union_grid(const std::vector<LorenzCurve<T>>& curves, const NumericPolicy& policy) {
  std::vector<T> all{T(0), T(1)};
  for (const auto& c : curves) {
    auto b = c.bend_abscissae();
    all.insert(all.end(), b.begin(), b.end());
  }
  auto grid = sorted_unique(std::move(all), policy.eps_merge);
  // Keep the endpoints exact after float deduplication.
  grid.front() = T(0);
  grid.back() = T(1);
  return grid;
}

template <class T>
struct Embedding {
  GibbsContext<T> context;
  std::vector<StateVector<T>> states;
};

/// Re-expresses a family of states on the grid of all their bend abscissae:
/// g~_i = s_i - s_{i-1} and w~_i = L[w](s_i) - L[w](s_{i-1}). Every output
/// state lists its levels in non-increasing w~/g~ order, so Lorenz curves of
/// mixtures of outputs are mixtures of Lorenz curves.
template <class T>
Embedding<T> embed_states(const std::vector<StateVector<T>>& states, const GibbsContext<T>& ctx) {
  if (states.empty()) fail(ErrorCode::EmptyInput, "nothing to embed");
  std::vector<LorenzCurve<T>> curves;
  for (const auto& w : states) {
    validate_state(w, ctx, true);
    curves.push_back(build_lorenz(w, ctx));
  }
  const auto grid = union_grid(curves, ctx.policy);

  std::vector<T> weights;
  for (std::size_t i = 1; i < grid.size(); ++i) weights.push_back(grid[i] - grid[i - 1]);

  Embedding<T> out;
  out.context.gibbs = weights;
  out.context.beta = ctx.beta;
  out.context.policy = ctx.policy;
  for (const auto& g : weights) out.context.energies.push_back(-std::log(to_double(g)) / ctx.beta);
  out.context = validate_context(std::move(out.context));

  for (const auto& curve : curves) {
    std::vector<T> w;
    T prev = curve(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      T cur = curve(grid[i]);
      w.push_back(cur - prev);
      prev = cur;
    }
    out.states.emplace_back(std::move(w));
  }
  return out;
}

}  // namespace condtherm
