#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "condtherm/error.hpp"
#include "condtherm/numeric.hpp"

namespace condtherm {

/// Energy spectrum, inverse temperature and the derived Gibbs weights.
///
/// The Gibbs weights are the authoritative data; energies and the partition
/// function are kept as doubles since they are only needed by the free-energy
/// functionals. When weights are supplied directly, beta defaults to 1 and
/// E_i = -ln g_i (so Z = 1).
template <class T>
struct GibbsContext {
  std::vector<double> energies;
  double beta = 1.0;
  std::vector<T> gibbs;
  double partition = 1.0;
  NumericPolicy policy;

  std::size_t dim() const noexcept { return gibbs.size(); }
};

template <class T>
GibbsContext<T> validate_context(GibbsContext<T> ctx) {
  ctx.policy.validate();
  if (ctx.gibbs.empty()) fail(ErrorCode::ValidationError, "Gibbs context needs at least one level");
  for (std::size_t i = 0; i < ctx.gibbs.size(); ++i) {
    if (!(ctx.gibbs[i] > T(0)))
      fail(ErrorCode::NonPositiveGibbsWeight, "g_" + std::to_string(i) + " = " + format_scalar(ctx.gibbs[i]));
  }
  if (!near(sum(ctx.gibbs), T(1), ctx.policy.eps_cmp))
    fail(ErrorCode::NotNormalized, "Gibbs weights sum to " + format_scalar(sum(ctx.gibbs)));

  if (ctx.energies.empty()) {
    ctx.beta = 1.0;
    ctx.partition = 1.0;
    ctx.energies.reserve(ctx.gibbs.size());
    for (const auto& g : ctx.gibbs) ctx.energies.push_back(-std::log(to_double(g)));
  } else if (ctx.energies.size() != ctx.gibbs.size()) {
    fail(ErrorCode::DimensionMismatch, "energies and Gibbs weights differ in length");
  }
  return ctx;
}

template <class T>
GibbsContext<T> context_from_weights(std::vector<T> weights, NumericPolicy policy = {}) {
  GibbsContext<T> ctx;
  ctx.gibbs = std::move(weights);
  ctx.policy = policy;
  if constexpr (is_exact_v<T>) ctx.policy.mode = Mode::Rational;
  return validate_context(std::move(ctx));
}

/// Builds g_i = exp(-beta E_i) / Z. Only meaningful in floating point: the
/// weights are irrational in general.
inline GibbsContext<double> context_from_energies(std::vector<double> energies, double beta,
                                                  NumericPolicy policy = {}) {
  if (energies.empty()) fail(ErrorCode::ValidationError, "Gibbs context needs at least one level");
  if (!(beta > 0)) fail(ErrorCode::ValidationError, "beta must be positive");
  double e_min = energies[0];
  for (double e : energies) e_min = std::min(e_min, e);
  std::vector<double> boltzmann;
  double shifted_z = 0;
  for (double e : energies) {
    boltzmann.push_back(std::exp(-beta * (e - e_min)));
    shifted_z += boltzmann.back();
  }
  GibbsContext<double> ctx;
  for (double b : boltzmann) ctx.gibbs.push_back(b / shifted_z);
  ctx.energies = std::move(energies);
  ctx.beta = beta;
  ctx.partition = shifted_z * std::exp(-beta * e_min);
  ctx.policy = policy;
  return validate_context(std::move(ctx));
}

/// Probability mass per energy level. May be sub-normalized when it stands for
/// a weighted branch p_x u^{|x}.
template <class T>
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::vector<T> values) : w_(std::move(values)) {}
  StateVector(std::initializer_list<T> values) : w_(values) {}

  std::size_t dim() const noexcept { return w_.size(); }
  const std::vector<T>& values() const noexcept { return w_; }
  const T& operator[](std::size_t i) const { return w_[i]; }
  T mass() const { return sum(w_); }

  StateVector scaled(const T& c) const {
    std::vector<T> out(w_);
    for (auto& x : out) x *= c;
    return StateVector(std::move(out));
  }

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  std::vector<T> w_;
};

template <class T>
void validate_state(const StateVector<T>& w, const GibbsContext<T>& ctx, bool normalized) {
  if (w.dim() != ctx.dim())
    fail(ErrorCode::DimensionMismatch,
         "state has " + std::to_string(w.dim()) + " levels, context has " + std::to_string(ctx.dim()));
  for (std::size_t i = 0; i < w.dim(); ++i) {
    if (!geq(w[i], T(0), ctx.policy.eps_cmp))
      fail(ErrorCode::ValidationError, "negative mass " + format_scalar(w[i]) + " at level " + std::to_string(i));
  }
  const T m = w.mass();
  if (normalized ? !near(m, T(1), ctx.policy.eps_cmp) : !leq(m, T(1), ctx.policy.eps_cmp))
    fail(ErrorCode::NotNormalized, "state mass " + format_scalar(m));
}

/// Joint classical-quantum state as weighted branch columns u^x = p_x u^{|x}.
template <class T>
class CQState {
 public:
  CQState() = default;
  explicit CQState(std::vector<StateVector<T>> columns) : columns_(std::move(columns)) {}
  CQState(std::initializer_list<StateVector<T>> columns) : columns_(columns) {}

  std::size_t branches() const noexcept { return columns_.size(); }
  std::size_t dim() const noexcept { return columns_.empty() ? 0 : columns_.front().dim(); }
  const std::vector<StateVector<T>>& columns() const noexcept { return columns_; }
  const StateVector<T>& column(std::size_t x) const { return columns_.at(x); }

  std::vector<T> weights() const {
    std::vector<T> p;
    p.reserve(columns_.size());
    for (const auto& c : columns_) p.push_back(c.mass());
    return p;
  }

  /// u^{|x}; undefined for zero-weight branches, which canonical states do not have.
  StateVector<T> conditional(std::size_t x) const {
    const T p = columns_.at(x).mass();
    if (p == T(0)) fail(ErrorCode::ZeroTotalMass, "conditional of an empty branch");
    return columns_[x].scaled(T(1) / p);
  }

  /// The trivial-register state with a single branch.
  static CQState single(StateVector<T> w) { return CQState(std::vector<StateVector<T>>{std::move(w)}); }

  friend bool operator==(const CQState&, const CQState&) = default;

 private:
  std::vector<StateVector<T>> columns_;
};

template <class T>
void validate_cq(const CQState<T>& u, const GibbsContext<T>& ctx) {
  if (u.branches() == 0) fail(ErrorCode::EmptyInput, "classical-quantum state has no columns");
  T total(0);
  for (const auto& c : u.columns()) {
    validate_state(c, ctx, false);
    total += c.mass();
  }
  if (!near(total, T(1), ctx.policy.eps_cmp))
    fail(ErrorCode::NotNormalized, "classical-quantum state has total mass " + format_scalar(total));
}

/// Drops zero-mass columns and rescales the total mass to one. Column order is kept.
template <class T>
CQState<T> canonicalize_cq(const CQState<T>& u, const NumericPolicy& policy = {}) {
  std::vector<StateVector<T>> kept;
  T total(0);
  for (const auto& c : u.columns()) {
    const T m = c.mass();
    bool empty;
    if constexpr (is_exact_v<T>) {
      empty = m == T(0);
    } else {
      empty = m <= policy.eps_merge;
    }
    if (empty) continue;
    total += m;
    kept.push_back(c);
  }
  if (kept.empty() || !(total > T(0))) fail(ErrorCode::ZeroTotalMass, "state has no mass");

  bool rescale;
  if constexpr (is_exact_v<T>) {
    rescale = total != T(1);
  } else {
    // A few ulps of drift is left alone so that canonicalization is idempotent.
    rescale = std::abs(total - 1.0) > 8 * std::numeric_limits<double>::epsilon() * double(kept.size() * kept[0].dim());
  }
  if (rescale) {
    const T factor = T(1) / total;
    for (auto& c : kept) c = c.scaled(factor);
  }
  return CQState<T>(std::move(kept));
}

/// Column-stochastic, Gibbs-preserving d x d matrix (states are column vectors).
template <class T>
struct TOMatrix {
  Matrix<T> m;

  static TOMatrix identity(std::size_t d) { return {Matrix<T>::identity(d)}; }

  /// The full thermalization map: every column equals g.
  static TOMatrix thermalize(const GibbsContext<T>& ctx) {
    TOMatrix t{Matrix<T>(ctx.dim(), ctx.dim())};
    for (std::size_t i = 0; i < ctx.dim(); ++i)
      for (std::size_t j = 0; j < ctx.dim(); ++j) t.m(i, j) = ctx.gibbs[i];
    return t;
  }

  StateVector<T> operator()(const StateVector<T>& w) const { return StateVector<T>(m.apply(w.values())); }

  friend bool operator==(const TOMatrix&, const TOMatrix&) = default;
};

template <class T>
void validate_to(const TOMatrix<T>& t, const GibbsContext<T>& ctx) {
  const std::size_t d = ctx.dim();
  if (t.m.rows() != d || t.m.cols() != d) fail(ErrorCode::DimensionMismatch, "thermal operation has wrong shape");
  const double eps = ctx.policy.eps_cmp;
  for (std::size_t j = 0; j < d; ++j) {
    T col(0);
    for (std::size_t i = 0; i < d; ++i) {
      if (!geq(t.m(i, j), T(0), eps)) fail(ErrorCode::ValidationError, "thermal operation has a negative entry");
      col += t.m(i, j);
    }
    if (!near(col, T(1), eps)) fail(ErrorCode::ValidationError, "thermal operation column does not sum to one");
  }
  const auto image = t.m.apply(ctx.gibbs);
  for (std::size_t i = 0; i < d; ++i) {
    if (!near(image[i], ctx.gibbs[i], eps)) fail(ErrorCode::ValidationError, "thermal operation does not fix g");
  }
}

/// A conditioned thermal operation in (x, y)-indexed form: control map R
/// (row-stochastic, l x m) and one thermal operation per entry of R.
template <class T>
struct CTOPlan {
  Matrix<T> control;
  std::vector<TOMatrix<T>> maps;  // index x * m + y

  std::size_t sources() const noexcept { return control.rows(); }
  std::size_t targets() const noexcept { return control.cols(); }

  const TOMatrix<T>& map(std::size_t x, std::size_t y) const { return maps.at(x * targets() + y); }
  TOMatrix<T>& map(std::size_t x, std::size_t y) { return maps.at(x * targets() + y); }

  friend bool operator==(const CTOPlan&, const CTOPlan&) = default;
};

template <class T>
void validate_plan(const CTOPlan<T>& plan, const GibbsContext<T>& ctx) {
  const double eps = ctx.policy.eps_cmp;
  if (plan.maps.size() != plan.sources() * plan.targets())
    fail(ErrorCode::DimensionMismatch, "plan needs one thermal operation per control entry");
  for (std::size_t x = 0; x < plan.sources(); ++x) {
    T row(0);
    for (std::size_t y = 0; y < plan.targets(); ++y) {
      if (!geq(plan.control(x, y), T(0), eps)) fail(ErrorCode::ValidationError, "control map has a negative entry");
      row += plan.control(x, y);
    }
    if (!near(row, T(1), eps)) fail(ErrorCode::ValidationError, "control map row does not sum to one");
  }
  for (const auto& t : plan.maps) validate_to(t, ctx);
}

}  // namespace condtherm
