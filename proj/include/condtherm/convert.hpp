#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "condtherm/asymptotic.hpp"
#include "condtherm/core.hpp"
#include "condtherm/lorenz.hpp"
#include "condtherm/lp.hpp"

namespace condtherm {

/// 0 = s_0 < s_1 < ... < s_D = 1.
template <class T>
struct BendGrid {
  std::vector<T> s;

  std::size_t segments() const noexcept { return s.empty() ? 0 : s.size() - 1; }
  std::vector<T> interior() const { return s.size() < 2 ? std::vector<T>{} : std::vector<T>(s.begin() + 1, s.end() - 1); }
};

/// Lorenz increments of the source (P, D x l) and target (Q, D x m) branches
/// between consecutive grid abscissae.
template <class T>
struct PQPair {
  Matrix<T> p;
  Matrix<T> q;
};

/// Nonnegative D x m matrix of total mass one whose columns are non-increasing.
template <class T>
struct WitnessMatrix {
  Matrix<T> a;
};

template <class T>
struct Decision {
  bool convertible = false;
  std::optional<Matrix<T>> plan_seed;         // row-stochastic R when convertible
  std::optional<WitnessMatrix<T>> witness;    // when not convertible
  FarkasCertificate<T> certificate;
  BendGrid<T> grid;
  PQPair<T> pq;
};

template <class T>
std::vector<LorenzCurve<T>> branch_curves(const CQState<T>& u, const GibbsContext<T>& ctx) {
  std::vector<LorenzCurve<T>> out;
  for (const auto& c : u.columns()) out.push_back(build_lorenz(c, ctx));
  return out;
}

/// Distinct bend abscissae of the target's branch curves, with 0 and 1 added.
template <class T>
BendGrid<T> bend_grid(const CQState<T>& v, const GibbsContext<T>& ctx) {
  validate_cq(v, ctx);
  return {union_grid(branch_curves(v, ctx), ctx.policy)};
}

template <class T>
PQPair<T> build_pq(const CQState<T>& u, const CQState<T>& v, const GibbsContext<T>& ctx, const BendGrid<T>& grid) {
  if (u.dim() != ctx.dim() || v.dim() != ctx.dim())
    fail(ErrorCode::DimensionMismatch, "state and Gibbs context differ in dimension");
  if (grid.s.size() < 2) fail(ErrorCode::ValidationError, "grid needs at least the endpoints 0 and 1");
  auto increments = [&](const CQState<T>& w) {
    const std::size_t D = grid.segments();
    Matrix<T> out(D, w.branches());
    for (std::size_t x = 0; x < w.branches(); ++x) {
      const auto curve = build_lorenz(w.column(x), ctx);
      T prev = curve(grid.s[0]);
      for (std::size_t i = 1; i <= D; ++i) {
        T cur = curve(grid.s[i]);
        out(i - 1, x) = cur - prev;
        prev = cur;
      }
    }
    return out;
  };
  return {increments(u), increments(v)};
}

/// Column-wise running sums, i.e. the product L M with L all-ones lower triangular.
template <class T>
Matrix<T> cumulative_rows(const Matrix<T>& m) {
  Matrix<T> out(m.rows(), m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    T acc(0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
      acc += m(r, c);
      out(r, c) = acc;
    }
  }
  return out;
}

/// Builds the certificate-derived witness: a^y_k = sum_{i >= k} lambda_{i,y},
/// scaled to total mass one. Inequality multipliers are ordered (i, y) row-major.
template <class T>
WitnessMatrix<T> extract_witness(const FarkasCertificate<T>& cert, std::size_t segments, std::size_t targets) {
  if (cert.ineq.size() != segments * targets)
    fail(ErrorCode::DimensionMismatch, "certificate does not match grid and target sizes");
  Matrix<T> a(segments, targets);
  T total(0);
  for (std::size_t y = 0; y < targets; ++y) {
    T acc(0);
    for (std::size_t i = segments; i-- > 0;) {
      T lambda = cert.ineq[i * targets + y];
      if (lambda < T(0)) lambda = T(0);
      acc += lambda;
      a(i, y) = acc;
      total += acc;
    }
  }
  if (!(total > T(0))) fail(ErrorCode::DegenerateCertificate, "all inequality multipliers vanish");
  for (std::size_t i = 0; i < segments; ++i)
    for (std::size_t y = 0; y < targets; ++y) a(i, y) /= total;
  return {std::move(a)};
}

template <class T>
void validate_witness(const WitnessMatrix<T>& w, double eps) {
  T total(0);
  for (std::size_t y = 0; y < w.a.cols(); ++y) {
    for (std::size_t i = 0; i < w.a.rows(); ++i) {
      if (!geq(w.a(i, y), T(0), eps)) fail(ErrorCode::ValidationError, "witness has a negative entry");
      if (i > 0 && !leq(w.a(i, y), w.a(i - 1, y), eps))
        fail(ErrorCode::ValidationError, "witness column is not non-increasing");
      total += w.a(i, y);
    }
  }
  if (!near(total, T(1), eps)) fail(ErrorCode::ValidationError, "witness does not have total mass one");
}

/// Feasibility of: exists row-stochastic R with L P R >= L Q.
template <class T>
Decision<T> conditional_lt_majorize(const Matrix<T>& p, const Matrix<T>& q, const NumericPolicy& policy = {}) {
  if (p.rows() != q.rows()) fail(ErrorCode::DimensionMismatch, "P and Q need the same number of rows");
  const std::size_t D = p.rows(), l = p.cols(), m = q.cols();
  const auto lp_ = cumulative_rows(p);
  const auto lq_ = cumulative_rows(q);

  LinearSystem<T> sys(l * m);
  for (std::size_t x = 0; x < l; ++x) {
    std::vector<T> row(l * m, T(0));
    for (std::size_t y = 0; y < m; ++y) row[x * m + y] = T(1);
    sys.add_eq(std::move(row), T(1));
  }
  for (std::size_t i = 0; i < D; ++i) {
    for (std::size_t y = 0; y < m; ++y) {
      std::vector<T> row(l * m, T(0));
      for (std::size_t x = 0; x < l; ++x) row[x * m + y] = lp_(i, x);
      sys.add_ineq(std::move(row), lq_(i, y));
    }
  }

  auto result = solve_feasibility(sys, policy);
  Decision<T> out;
  out.pq = {p, q};
  if (result.feasible()) {
    out.convertible = true;
    Matrix<T> r(l, m);
    for (std::size_t x = 0; x < l; ++x)
      for (std::size_t y = 0; y < m; ++y) r(x, y) = result.point[x * m + y];
    out.plan_seed = std::move(r);
  } else {
    out.witness = extract_witness(result.certificate, D, m);
    out.certificate = std::move(result.certificate);
  }
  return out;
}

/// CTO convertibility of U into V via the Lorenz-increment linear program on
/// the target's bend grid.
template <class T>
Decision<T> check_cto(const CQState<T>& u, const CQState<T>& v, const GibbsContext<T>& ctx) {
  validate_cq(u, ctx);
  validate_cq(v, ctx);
  auto grid = bend_grid(v, ctx);
  auto pq = build_pq(u, v, ctx, grid);
  auto decision = conditional_lt_majorize(pq.p, pq.q, ctx.policy);
  decision.grid = std::move(grid);
  return decision;
}

/// Trivial source register: u must thermo-majorize every target conditional.
template <class T>
bool check_state_to_ensemble(const StateVector<T>& u, const CQState<T>& v, const GibbsContext<T>& ctx) {
  validate_state(u, ctx, true);
  const auto grid = bend_grid(v, ctx);
  const auto lu = build_lorenz(u, ctx);
  for (const auto& col : v.columns()) {
    const auto lv = build_lorenz(col, ctx);
    const T q = col.mass();
    for (const auto& s : grid.s) {
      if (!geq(T(q * lu(s)), lv(s), ctx.policy.eps_cmp)) return false;
    }
  }
  return true;
}

/// Trivial target register: the averaged source curve must dominate L[v].
template <class T>
bool check_ensemble_to_state(const CQState<T>& u, const StateVector<T>& v, const GibbsContext<T>& ctx) {
  validate_cq(u, ctx);
  validate_state(v, ctx, true);
  const auto lv = build_lorenz(v, ctx);
  const auto curves = branch_curves(u, ctx);
  for (const auto& [s, t] : lv.points()) {
    T avg(0);
    for (const auto& c : curves) avg += c(s);
    if (!geq(avg, t, ctx.policy.eps_cmp)) return false;
  }
  return true;
}

/// Smallest p for which (p u, (1 - p) g) converts to v:
/// max over the bends of L[v] of (L[v](s) - s) / (L[u](s) - s).
template <class T>
T p_min(const StateVector<T>& u, const StateVector<T>& v, const GibbsContext<T>& ctx) {
  validate_state(u, ctx, true);
  validate_state(v, ctx, true);
  if (!thermo_majorizes(u, v, ctx)) fail(ErrorCode::NotThermoMajorizing, "u does not thermo-majorize v");
  const StateVector<T> g(ctx.gibbs);
  auto equals_gibbs = [&](const StateVector<T>& w) {
    for (std::size_t i = 0; i < w.dim(); ++i)
      if (!near(w[i], ctx.gibbs[i], ctx.policy.eps_cmp)) return false;
    return true;
  };
  if (equals_gibbs(v)) return T(0);
  if (equals_gibbs(u)) fail(ErrorCode::DegenerateSource, "source is the Gibbs state but the target is not");

  const auto lu = build_lorenz(u, ctx);
  const auto lv = build_lorenz(v, ctx);
  T best(0);
  for (const auto& s : lv.bend_abscissae()) {
    const T num = lv(s) - s;
    const T den = lu(s) - s;
    // den == 0 forces num <= 0 by thermo-majorization; such a bend imposes nothing.
    if (!(den > T(0)) || is_zero(den, ctx.policy.eps_cmp)) continue;
    const T ratio = num / den;
    if (ratio > best) best = ratio;
  }
  return best > T(1) ? T(1) : best;
}

/// omega_A(w) = max over columns a^z of a^z . w.
template <class T>
T omega(const WitnessMatrix<T>& w, const std::vector<T>& v) {
  if (v.size() != w.a.rows()) fail(ErrorCode::DimensionMismatch, "witness rows and vector length differ");
  std::optional<T> best;
  for (std::size_t z = 0; z < w.a.cols(); ++z) {
    T dot(0);
    for (std::size_t i = 0; i < v.size(); ++i) dot += w.a(i, z) * v[i];
    if (!best || dot > *best) best = dot;
  }
  return best.value_or(T(0));
}

/// Omega_A on weighted columns: sum_x omega(p^x) - sum_y omega(q^y).
template <class T>
T omega_functional(const WitnessMatrix<T>& w, const PQPair<T>& pq) {
  T total(0);
  for (std::size_t x = 0; x < pq.p.cols(); ++x) total += omega(w, pq.p.column(x));
  for (std::size_t y = 0; y < pq.q.cols(); ++y) total -= omega(w, pq.q.column(y));
  return total;
}

template <class T>
T verify_witness(const WitnessMatrix<T>& w, const CQState<T>& u, const CQState<T>& v, const GibbsContext<T>& ctx) {
  const auto grid = bend_grid(v, ctx);
  if (w.a.rows() != grid.segments())
    fail(ErrorCode::DimensionMismatch, "witness has " + std::to_string(w.a.rows()) + " rows, grid has " +
                                           std::to_string(grid.segments()) + " segments");
  return omega_functional(w, build_pq(u, v, ctx, grid));
}

template <class T>
struct LtResult {
  bool majorizes = false;
  std::optional<Matrix<T>> theta;  // lower-triangular column-stochastic, q = theta p
};

/// Cumulative-sum dominance L p >= L q, optionally with a realizing matrix.
template <class T>
LtResult<T> lt_majorize(const std::vector<T>& p, const std::vector<T>& q, const NumericPolicy& policy = {},
                        bool want_theta = false) {
  if (p.size() != q.size()) fail(ErrorCode::DimensionMismatch, "vectors differ in length");
  if (!near(sum(p), sum(q), policy.eps_cmp)) fail(ErrorCode::MassMismatch, "LT majorization needs equal masses");
  LtResult<T> out;
  T cp(0), cq(0);
  out.majorizes = true;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cp += p[i];
    cq += q[i];
    if (!geq(cp, cq, policy.eps_cmp)) out.majorizes = false;
  }
  if (!out.majorizes || !want_theta) return out;

  // Variables theta_{ij} for i >= j, packed row by row.
  const std::size_t n = p.size();
  auto index = [](std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; };
  const std::size_t nv = n * (n + 1) / 2;
  LinearSystem<T> sys(nv);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<T> row(nv, T(0));
    for (std::size_t i = j; i < n; ++i) row[index(i, j)] = T(1);
    sys.add_eq(std::move(row), T(1));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<T> row(nv, T(0));
    for (std::size_t j = 0; j <= i; ++j) row[index(i, j)] = p[j];
    sys.add_eq(std::move(row), q[i]);
  }
  auto res = solve_feasibility(sys, policy);
  if (!res.feasible()) fail(ErrorCode::NumericBreakdown, "cumulative dominance holds but no LT matrix was found");
  Matrix<T> theta(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) theta(i, j) = res.point[index(i, j)];
  out.theta = std::move(theta);
  return out;
}

/// All partial sums of g over permutations (equivalently over nonempty proper
/// subsets), deduplicated and sorted.
template <class T>
std::vector<T> sigma_grid(const GibbsContext<T>& ctx, std::size_t d_max = 6) {
  const std::size_t d = ctx.dim();
  if (d > d_max)
    fail(ErrorCode::DimensionTooLarge, "dimension " + std::to_string(d) + " exceeds limit " + std::to_string(d_max));
  std::vector<T> sums;
  const std::size_t full = (std::size_t{1} << d) - 1;
  for (std::size_t mask = 1; mask < full; ++mask) {
    T acc(0);
    for (std::size_t i = 0; i < d; ++i)
      if (mask & (std::size_t{1} << i)) acc += ctx.gibbs[i];
    sums.push_back(acc);
  }
  return sorted_unique(std::move(sums), ctx.policy.eps_merge);
}

/// N evenly spaced interior abscissae k / (N + 1).
template <class T>
std::vector<T> uniform_grid(std::size_t n) {
  std::vector<T> out;
  for (std::size_t k = 1; k <= n; ++k) out.push_back(T(k) / T(n + 1));
  return out;
}

template <class T>
std::vector<T> default_monotone_grid(const GibbsContext<T>& ctx) {
  return ctx.dim() <= 6 ? sigma_grid(ctx) : uniform_grid<T>(64);
}

template <class T>
struct MonotoneValues {
  std::vector<T> abscissae;
  std::vector<T> phi;       // Phi_s[U] = sum_x L[u^x](s)
  double free_energy = 0;   // averaged relative free energy
};

template <class T>
MonotoneValues<T> phi_monotones(const CQState<T>& u, const GibbsContext<T>& ctx, std::vector<T> abscissae) {
  validate_cq(u, ctx);
  const auto curves = branch_curves(u, ctx);
  MonotoneValues<T> out;
  for (const auto& s : abscissae) {
    T total(0);
    for (const auto& c : curves) total += eval_lorenz(c, s, ctx.policy);
    out.phi.push_back(total);
  }
  out.abscissae = std::move(abscissae);
  out.free_energy = resource_value(u, ctx, true);
  return out;
}

template <class T>
MonotoneValues<T> phi_monotones(const CQState<T>& u, const GibbsContext<T>& ctx) {
  return phi_monotones(u, ctx, default_monotone_grid(ctx));
}

}  // namespace condtherm
