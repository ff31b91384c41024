#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "condtherm/condtherm.hpp"
#include "oracles.hpp"

using namespace condtherm;

namespace {

Rational q(long a, long b = 1) { return Rational(a, b); }
using RS = StateVector<Rational>;
using RCQ = CQState<Rational>;

GibbsContext<Rational> uniform(std::size_t d) { return context_from_weights<Rational>(std::vector<Rational>(d, q(1, d))); }
GibbsContext<Rational> two_thirds() { return context_from_weights<Rational>({q(2, 3), q(1, 3)}); }

Matrix<Rational> mat(std::size_t r, std::size_t c, std::vector<Rational> v) {
  Matrix<Rational> m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = v[i * c + j];
  return m;
}

template <class F>
ErrorCode error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::ValidationError;
}

RCQ worked_source(const GibbsContext<Rational>& ctx) {
  std::vector<RS> cols;
  for (std::size_t x = 0; x < ctx.dim(); ++x) {
    std::vector<Rational> c(ctx.dim(), q(0));
    c[x] = ctx.gibbs[x];
    cols.emplace_back(c);
  }
  return RCQ(cols);
}

}  // namespace

TEST(BendGrid, Examples) {
  auto u2 = uniform(2);
  auto g = bend_grid(RCQ::single(RS(u2.gibbs)), u2);
  EXPECT_EQ(g.s, (std::vector<Rational>{q(0), q(1)}));
  EXPECT_EQ(g.segments(), 1u);
  EXPECT_TRUE(g.interior().empty());

  g = bend_grid(RCQ::single(RS{q(3, 4), q(1, 4)}), u2);
  EXPECT_EQ(g.s, (std::vector<Rational>{q(0), q(1, 2), q(1)}));

  auto ctx = two_thirds();
  g = bend_grid(RCQ{{q(1, 2), q(0)}, {q(1, 10), q(2, 5)}}, ctx);
  EXPECT_EQ(g.s, (std::vector<Rational>{q(0), q(1, 3), q(2, 3), q(1)}));
  EXPECT_EQ(g.segments(), 3u);
}

TEST(BuildPQ, Examples) {
  auto u2 = uniform(2);
  auto gibbs = RCQ::single(RS(u2.gibbs));
  auto pq = build_pq(gibbs, gibbs, u2, BendGrid<Rational>{{q(0), q(1)}});
  EXPECT_EQ(pq.p, mat(1, 1, {q(1)}));
  EXPECT_EQ(pq.q, mat(1, 1, {q(1)}));

  const BendGrid<Rational> half{{q(0), q(1, 2), q(1)}};
  auto v = RCQ::single(RS{q(3, 4), q(1, 4)});
  pq = build_pq(RCQ::single(RS{q(1), q(0)}), v, u2, half);
  EXPECT_EQ(pq.p, mat(2, 1, {q(1), q(0)}));
  EXPECT_EQ(pq.q, mat(2, 1, {q(3, 4), q(1, 4)}));

  pq = build_pq(RCQ{{q(1, 2), q(0)}, {q(1, 4), q(1, 4)}}, v, u2, half);
  EXPECT_EQ(pq.p, mat(2, 2, {q(1, 2), q(1, 4), q(0), q(1, 4)}));
  EXPECT_EQ(pq.q, mat(2, 1, {q(3, 4), q(1, 4)}));
}

TEST(CheckCto, WorkedExampleConverts) {
  for (const auto& ctx : {uniform(2), context_from_weights<Rational>({q(1, 2), q(1, 3), q(1, 6)})}) {
    std::vector<Rational> e0(ctx.dim(), q(0));
    e0[0] = q(1);
    auto d = check_cto(worked_source(ctx), RCQ::single(RS(e0)), ctx);
    EXPECT_TRUE(d.convertible);
    EXPECT_TRUE(d.plan_seed.has_value());
    EXPECT_FALSE(d.witness.has_value());
  }
}

TEST(CheckCto, FreeStatesReachOnlyFreeStates) {
  auto ctx = context_from_weights<Rational>({q(1, 2), q(1, 3), q(1, 6)});
  RS g(ctx.gibbs);
  RCQ u{g.scaled(q(1, 4)), g.scaled(q(3, 4))};
  EXPECT_TRUE(check_cto(u, RCQ{g.scaled(q(1, 3)), g.scaled(q(1, 3)), g.scaled(q(1, 3))}, ctx).convertible);
  auto d = check_cto(u, RCQ{g.scaled(q(1, 2)), RS{q(1, 2), q(0), q(0)}}, ctx);
  EXPECT_FALSE(d.convertible);
  EXPECT_TRUE(d.witness.has_value());
  EXPECT_FALSE(d.plan_seed.has_value());
}

TEST(CheckCto, ThresholdMixtureConverts) {
  auto ctx = uniform(2);
  auto v = RCQ::single(RS{q(3, 4), q(1, 4)});
  EXPECT_TRUE(check_cto(RCQ{{q(1, 2), q(0)}, {q(1, 4), q(1, 4)}}, v, ctx).convertible);
  EXPECT_FALSE(check_cto(RCQ{{q(2, 5), q(0)}, {q(3, 10), q(3, 10)}}, v, ctx).convertible);
}

TEST(CheckCto, RejectsInvalidInput) {
  auto ctx = uniform(2);
  EXPECT_EQ(error_of([&] { check_cto(RCQ{{q(1, 2), q(0)}}, RCQ{{q(1), q(0)}}, ctx); }), ErrorCode::NotNormalized);
  EXPECT_EQ(error_of([&] { check_cto(RCQ{{q(1), q(0), q(0)}}, RCQ{{q(1), q(0)}}, ctx); }),
            ErrorCode::DimensionMismatch);
}

TEST(Corollaries, StateToEnsemble) {
  auto ctx = uniform(2);
  EXPECT_TRUE(check_state_to_ensemble(RS{q(1), q(0)}, RCQ{{q(1, 2), q(0)}, {q(1, 4), q(1, 4)}}, ctx));
  EXPECT_FALSE(check_state_to_ensemble(RS{q(3, 4), q(1, 4)}, RCQ{{q(1, 3), q(0)}, {q(1, 3), q(1, 3)}}, ctx));
  EXPECT_TRUE(check_state_to_ensemble(RS(ctx.gibbs), RCQ::single(RS(ctx.gibbs)), ctx));
}

TEST(Corollaries, EnsembleToState) {
  auto ctx = uniform(2);
  RCQ u{{q(1, 2), q(0)}, {q(1, 4), q(1, 4)}};
  EXPECT_TRUE(check_ensemble_to_state(u, RS{q(3, 4), q(1, 4)}, ctx));
  EXPECT_FALSE(check_ensemble_to_state(u, RS{q(4, 5), q(1, 5)}, ctx));
  Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    auto c = random_context<Rational>(2 + rng.index(3), rng);
    EXPECT_TRUE(check_ensemble_to_state(random_cq(c, 1 + rng.index(3), rng), RS(c.gibbs), c));
  }
}

TEST(PMin, Examples) {
  auto ctx = uniform(2);
  EXPECT_EQ(p_min(RS{q(1), q(0)}, RS{q(3, 4), q(1, 4)}, ctx), q(1, 2));
  EXPECT_EQ(p_min(RS{q(1), q(0)}, RS(ctx.gibbs), ctx), q(0));
  EXPECT_EQ(p_min(RS{q(3, 4), q(1, 4)}, RS{q(3, 4), q(1, 4)}, ctx), q(1));
  auto c3 = context_from_weights<Rational>({q(1, 2), q(1, 3), q(1, 6)});
  RS u{q(1, 6), q(1, 3), q(1, 2)};
  EXPECT_EQ(p_min(u, u, c3), q(1));

  auto fctx = context_from_weights<double>({0.5, 0.5});
  EXPECT_NEAR(p_min(StateVector<double>{1.0, 0.0}, StateVector<double>{0.75, 0.25}, fctx), 0.5, 1e-12);
}

TEST(PMin, Errors) {
  auto ctx = uniform(2);
  EXPECT_EQ(error_of([&] { p_min(RS{q(3, 4), q(1, 4)}, RS{q(1), q(0)}, ctx); }), ErrorCode::NotThermoMajorizing);
  EXPECT_EQ(error_of([&] { p_min(RS(ctx.gibbs), RS{q(3, 4), q(1, 4)}, ctx); }), ErrorCode::NotThermoMajorizing);
  // A Gibbs source thermo-majorizes only the Gibbs target, for which p_min is 0.
  EXPECT_EQ(p_min(RS(ctx.gibbs), RS(ctx.gibbs), ctx), q(0));
}

TEST(Omega, Examples) {
  WitnessMatrix<double> a{Matrix<double>(2, 2)};
  a.a(0, 0) = 0.5;
  a.a(1, 0) = 0.0;
  a.a(0, 1) = 0.25;
  a.a(1, 1) = 0.25;
  EXPECT_NEAR(omega(a, {0.6, 0.4}), 0.30, 1e-15);
  EXPECT_NEAR(omega(a, {0.0, 1.0}), 0.25, 1e-15);
  EXPECT_THROW(omega(a, {1.0}), Error);
}

TEST(ExtractWitness, UnitMultiplier) {
  FarkasCertificate<Rational> cert;
  cert.ineq.assign(3 * 2, q(0));
  cert.ineq[2 * 2 + 1] = q(1);  // last segment, second target
  auto w = extract_witness(cert, 3, 2);
  EXPECT_EQ(w.a, mat(3, 2, {q(0), q(1, 3), q(0), q(1, 3), q(0), q(1, 3)}));
  EXPECT_NO_THROW(validate_witness(w, 0));
}

TEST(ExtractWitness, ZeroCertificate) {
  FarkasCertificate<Rational> cert;
  cert.ineq.assign(4, q(0));
  EXPECT_EQ(error_of([&] { extract_witness(cert, 2, 2); }), ErrorCode::DegenerateCertificate);
  EXPECT_EQ(error_of([&] { extract_witness(cert, 3, 2); }), ErrorCode::DimensionMismatch);
}

TEST(ExtractWitness, SubThresholdInstance) {
  auto fctx = context_from_weights<double>({0.5, 0.5});
  CQState<double> u{{0.4, 0.0}, {0.3, 0.3}};
  CQState<double> v{{0.75, 0.25}};
  auto d = check_cto(u, v, fctx);
  ASSERT_FALSE(d.convertible);
  ASSERT_TRUE(d.witness.has_value());
  EXPECT_NO_THROW(validate_witness(*d.witness, 1e-9));
  EXPECT_LT(verify_witness(*d.witness, u, v, fctx), -1e-7);
  EXPECT_LT(omega_functional(*d.witness, d.pq), -1e-7);
}

TEST(VerifyWitness, IdenticalStatesGiveZero) {
  Rng rng(42);
  for (int t = 0; t < 30; ++t) {
    auto ctx = random_context<Rational>(2 + rng.index(3), rng);
    auto u = canonicalize_cq(random_cq(ctx, 1 + rng.index(3), rng), ctx.policy);
    auto grid = bend_grid(u, ctx);
    auto w = random_witness<Rational>(grid.segments(), u.branches(), rng);
    EXPECT_EQ(verify_witness(w, u, u, ctx), q(0));
  }
}

TEST(VerifyWitness, WorkedExampleHasNoNegativeWitness) {
  auto ctx = context_from_weights<Rational>({q(1, 2), q(1, 3), q(1, 6)});
  auto u = worked_source(ctx);
  auto v = RCQ::single(RS{q(1), q(0), q(0)});
  const auto segments = bend_grid(v, ctx).segments();
  Rng rng(43);
  for (int t = 0; t < 1000; ++t) ASSERT_GE(verify_witness(random_witness<Rational>(segments, 1, rng), u, v, ctx), q(0));
}

TEST(VerifyWitness, RowCountChecked) {
  auto ctx = uniform(2);
  WitnessMatrix<Rational> w{mat(1, 1, {q(1)})};
  EXPECT_EQ(error_of([&] { verify_witness(w, RCQ{{q(1), q(0)}}, RCQ{{q(3, 4), q(1, 4)}}, ctx); }),
            ErrorCode::DimensionMismatch);
}

TEST(LtMajorize, Examples) {
  std::vector<Rational> p{q(1, 2), q(1, 3), q(1, 6)};
  auto r = lt_majorize(p, p, {}, true);
  EXPECT_TRUE(r.majorizes);
  ASSERT_TRUE(r.theta.has_value());
  EXPECT_EQ(r.theta->apply(p), p);

  EXPECT_TRUE(lt_majorize<Rational>({q(1), q(0)}, {q(1, 3), q(2, 3)}).majorizes);
  EXPECT_FALSE(lt_majorize<Rational>({q(0), q(1)}, {q(1), q(0)}).majorizes);
  EXPECT_EQ(error_of([] { lt_majorize<Rational>({q(1), q(0)}, {q(1, 2), q(0)}); }), ErrorCode::MassMismatch);
}

TEST(LtMajorize, ThetaIsLowerTriangularStochastic) {
  Rng rng(44);
  int found = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.index(5);
    auto p = random_weights<Rational>(n, rng), qv = random_weights<Rational>(n, rng);
    Rational cp(0), cq(0);
    bool dominates = true;
    for (std::size_t i = 0; i < n; ++i) {
      cp += p[i];
      cq += qv[i];
      dominates = dominates && cp >= cq;
    }
    auto r = lt_majorize(p, qv, {}, true);
    ASSERT_EQ(r.majorizes, dominates);
    if (!dominates) continue;
    ++found;
    const auto& th = *r.theta;
    EXPECT_EQ(th.apply(p), qv);
    for (std::size_t j = 0; j < n; ++j) {
      Rational col(0);
      for (std::size_t i = 0; i < n; ++i) {
        if (i < j) {
          EXPECT_EQ(th(i, j), q(0));
        }
        EXPECT_GE(th(i, j), q(0));
        col += th(i, j);
      }
      EXPECT_EQ(col, q(1));
    }
  }
  EXPECT_GT(found, 20);
}

TEST(ConditionalLtMajorize, Examples) {
  auto p = mat(3, 2, {q(1, 4), q(1, 8), q(1, 4), q(1, 8), q(0), q(1, 4)});
  auto d = conditional_lt_majorize(p, p);
  ASSERT_TRUE(d.convertible);
  EXPECT_TRUE(d.plan_seed.has_value());

  auto marginal = mat(3, 1, {q(3, 8), q(3, 8), q(1, 4)});
  d = conditional_lt_majorize(p, marginal);
  ASSERT_TRUE(d.convertible);
  EXPECT_EQ(*d.plan_seed, mat(2, 1, {q(1), q(1)}));

  auto u2 = uniform(2);
  RCQ u{{q(2, 5), q(0)}, {q(3, 10), q(3, 10)}};
  RCQ v{{q(3, 4), q(1, 4)}};
  auto pq = build_pq(u, v, u2, bend_grid(v, u2));
  EXPECT_FALSE(conditional_lt_majorize(pq.p, pq.q).convertible);
}

TEST(SigmaGrid, Examples) {
  EXPECT_EQ(sigma_grid(uniform(2)), (std::vector<Rational>{q(1, 2)}));
  EXPECT_EQ(sigma_grid(two_thirds()), (std::vector<Rational>{q(1, 3), q(2, 3)}));
  EXPECT_EQ(sigma_grid(uniform(3)), (std::vector<Rational>{q(1, 3), q(2, 3)}));
  EXPECT_EQ(error_of([] { sigma_grid(uniform(7)); }), ErrorCode::DimensionTooLarge);
  EXPECT_EQ(uniform_grid<Rational>(3), (std::vector<Rational>{q(1, 4), q(1, 2), q(3, 4)}));
}

TEST(SigmaGrid, MatchesPermutationPrefixSums) {
  Rng rng(45);
  for (int t = 0; t < 40; ++t) {
    auto ctx = random_context<Rational>(1 + rng.index(5), rng);
    auto brute = oracle::prefix_sums_over_permutations(ctx.gibbs);
    brute.erase(std::unique(brute.begin(), brute.end()), brute.end());
    EXPECT_EQ(sigma_grid(ctx), brute);
  }
}

TEST(PhiMonotones, Examples) {
  auto ctx = context_from_weights<Rational>({q(1, 2), q(1, 3), q(1, 6)});
  RS g(ctx.gibbs);
  auto free = phi_monotones(RCQ{g.scaled(q(1, 3)), g.scaled(q(2, 3))}, ctx);
  EXPECT_EQ(free.phi, free.abscissae);
  EXPECT_EQ(free.free_energy, 0.0);

  // Sum_x g_x min(s / g_x, 1) = sum_x min(s, g_x).
  auto worked = phi_monotones(worked_source(ctx), ctx);
  for (std::size_t k = 0; k < worked.abscissae.size(); ++k) {
    const auto& s = worked.abscissae[k];
    Rational expected(0);
    for (const auto& gx : ctx.gibbs) expected += s < gx ? s : gx;
    EXPECT_EQ(worked.phi[k], expected);
  }

  auto u2 = uniform(2);
  EXPECT_EQ(phi_monotones(worked_source(u2), u2).phi, (std::vector<Rational>{q(1)}));
  EXPECT_EQ(phi_monotones(RCQ{{q(1), q(0)}}, u2).phi, (std::vector<Rational>{q(1)}));
}

// Property checks.

TEST(ConvertProperties, PQInvariants) {
  Rng rng(46);
  for (int t = 0; t < 60; ++t) {
    auto inst = random_instance<Rational>(2 + rng.index(3), 1 + rng.index(3), 1 + rng.index(3), rng.next_seed(),
                                          rng.chance(0.5));
    const auto& ctx = inst.context;
    auto grid = bend_grid(inst.target, ctx);
    EXPECT_LE(grid.segments(), inst.target.branches() * (ctx.dim() - 1) + 1);
    auto pq = build_pq(inst.source, inst.target, ctx, grid);
    Rational mp(0), mq(0);
    for (std::size_t i = 0; i < pq.p.rows(); ++i) {
      for (std::size_t x = 0; x < pq.p.cols(); ++x) {
        EXPECT_GE(pq.p(i, x), q(0));
        mp += pq.p(i, x);
      }
      for (std::size_t y = 0; y < pq.q.cols(); ++y) {
        EXPECT_GE(pq.q(i, y), q(0));
        mq += pq.q(i, y);
      }
    }
    EXPECT_EQ(mp, q(1));
    EXPECT_EQ(mq, q(1));
    auto lp_ = cumulative_rows(pq.p);
    for (std::size_t x = 0; x < pq.p.cols(); ++x) {
      auto c = build_lorenz(inst.source.column(x), ctx);
      for (std::size_t i = 0; i < grid.segments(); ++i) EXPECT_EQ(lp_(i, x), c(grid.s[i + 1]));
    }
  }
}

TEST(ConvertProperties, ReachableTargetsConvert) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto inst = random_instance<double>(2 + seed % 3, 1 + seed % 3, 1 + (seed / 3) % 3, 1000 + seed);
    auto d = check_cto(inst.source, inst.target, inst.context);
    ASSERT_TRUE(d.convertible) << "seed " << seed;
    auto ph_u = phi_monotones(inst.source, inst.context, uniform_grid<double>(20));
    auto ph_v = phi_monotones(inst.target, inst.context, uniform_grid<double>(20));
    for (std::size_t k = 0; k < 20; ++k) EXPECT_LE(ph_v.phi[k], ph_u.phi[k] + 1e-9);
  }
}

TEST(ConvertProperties, WitnessDualityExact) {
  // Independent draws hit both outcomes; the two sides of the alternative are
  // checked exactly.
  int infeasible = 0, feasible = 0;
  Rng rng(47);
  for (int t = 0; t < 80; ++t) {
    auto inst = random_instance<Rational>(2 + rng.index(3), 1 + rng.index(3), 1 + rng.index(3), rng.next_seed(), false);
    const auto& ctx = inst.context;
    auto d = check_cto(inst.source, inst.target, ctx);
    ASSERT_NE(d.plan_seed.has_value(), d.witness.has_value());
    if (d.convertible) {
      ++feasible;
      const auto segs = d.grid.segments();
      for (int k = 0; k < 50; ++k)
        ASSERT_GE(verify_witness(random_witness<Rational>(segs, inst.target.branches(), rng), inst.source, inst.target, ctx),
                  q(0));
    } else {
      ++infeasible;
      EXPECT_NO_THROW(validate_witness(*d.witness, 0));
      EXPECT_LT(verify_witness(*d.witness, inst.source, inst.target, ctx), q(0));
    }
  }
  EXPECT_GT(infeasible, 5);
  EXPECT_GT(feasible, 5);
}

TEST(ConvertProperties, OmegaIsHomogeneous) {
  Rng rng(48);
  for (int t = 0; t < 100; ++t) {
    const std::size_t D = 1 + rng.index(5), m = 1 + rng.index(3);
    auto w = random_witness<Rational>(D, m, rng);
    std::vector<Rational> v(D);
    for (auto& x : v) x = random_fraction<Rational>(rng);
    const Rational c = random_fraction<Rational>(rng, 5) * 3;
    std::vector<Rational> cv(v);
    for (auto& x : cv) x *= c;
    EXPECT_EQ(omega(w, cv), c * omega(w, v));
  }
}

TEST(ConvertProperties, CorollariesAgreeWithLinearProgram) {
  Rng rng(49);
  for (int t = 0; t < 80; ++t) {
    const bool trivial_source = rng.chance(0.5);
    const std::size_t l = trivial_source ? 1 : 1 + rng.index(3);
    const std::size_t m = trivial_source ? 1 + rng.index(3) : 1;
    auto inst = random_instance<Rational>(2 + rng.index(3), l, m, rng.next_seed(), rng.chance(0.5));
    const bool lp = check_cto(inst.source, inst.target, inst.context).convertible;
    if (trivial_source) {
      EXPECT_EQ(check_state_to_ensemble(inst.source.column(0), inst.target, inst.context), lp);
    }
    if (m == 1) {
      EXPECT_EQ(check_ensemble_to_state(inst.source, inst.target.column(0), inst.context), lp);
    }
  }
}

TEST(ConvertProperties, PMinIsTheExactThreshold) {
  Rng rng(50);
  int tested = 0;
  for (int t = 0; t < 60; ++t) {
    auto ctx = random_context<Rational>(2 + rng.index(3), rng);
    auto u = random_state(ctx, rng);
    auto v = RS(random_gibbs_stochastic(ctx, 1 + rng.index(4), rng).m.apply(u.values()));
    if (u.values() == ctx.gibbs) continue;
    const Rational p = p_min(u, v, ctx);
    const auto target = RCQ::single(v);
    EXPECT_TRUE(check_cto(gibbs_mixture(u, p, ctx), target, ctx).convertible);
    if (p > q(0)) {
      const Rational below = p * Rational(99, 100);
      EXPECT_FALSE(check_cto(gibbs_mixture(u, below, ctx), target, ctx).convertible);
    }
    ++tested;
  }
  EXPECT_GT(tested, 30);
}

TEST(ConvertProperties, PMinMatchesGridOracle) {
  Rng rng(51);
  for (int t = 0; t < 10; ++t) {
    auto ctx = random_context<double>(2 + rng.index(3), rng);
    auto u = random_state(ctx, rng);
    auto v = StateVector<double>(random_gibbs_stochastic(ctx, 1 + rng.index(4), rng).m.apply(u.values()));
    const double p = p_min(u, v, ctx);
    const double oracle_p = pmin_grid_oracle(u, v, ctx, 1e-2);
    EXPECT_GE(oracle_p, p - 1e-2);
    EXPECT_LE(oracle_p, p + 1e-2);
  }
}

TEST(ConvertProperties, GridSufficiencyOffGrid) {
  Rng rng(52);
  for (int t = 0; t < 60; ++t) {
    auto inst = random_instance<double>(2 + rng.index(3), 1 + rng.index(3), 1 + rng.index(3), rng.next_seed());
    const auto& ctx = inst.context;
    auto d = check_cto(inst.source, inst.target, ctx);
    ASSERT_TRUE(d.convertible);
    const auto& r = *d.plan_seed;
    auto us = branch_curves(inst.source, ctx);
    auto vs = branch_curves(inst.target, ctx);
    for (int k = 0; k < 100; ++k) {
      const double s = rng.uniform();
      for (std::size_t y = 0; y < vs.size(); ++y) {
        double lhs = 0;
        for (std::size_t x = 0; x < us.size(); ++x) lhs += r(x, y) * us[x](s);
        ASSERT_GE(lhs, vs[y](s) - 1e-9);
      }
    }
  }
}
