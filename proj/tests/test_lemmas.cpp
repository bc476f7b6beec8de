#include "nullwave/errors.hpp"
#include "nullwave/lemmas.hpp"
#include "nullwave/solver.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace nullwave;
using namespace testing_support;

namespace {

Poly act(const DiffOperator& op, const Poly& p) { return op.apply_to_polynomial(p); }

/// N_B(f, g) = B_{lmn} d_l f d_m d_n g, symbolically.
Poly null_form(const NullFormTensor& b, const Poly& f, const Poly& g) {
  Poly out;
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        if (b(l, m, n) == 0.0) continue;
        const Poly dl = act(DiffOperator::partial(l), f);
        const Poly dmn = act(DiffOperator::partial(m), act(DiffOperator::partial(n), g));
        out = add(out, multiply(dl, dmn), b(l, m, n));
      }
  return out;
}

NullFormTensor random_tensor(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  RawTensor r{};
  for (auto& a : r)
    for (auto& b : a)
      for (auto& c : b) c = U(rng);
  return NullFormTensor::symmetrize(r);
}

BumpField field(std::uint64_t seed, double rho_lo, double rho_hi) {
  std::mt19937_64 rng(seed);
  return random_bump_field(rng, rho_lo, rho_hi, 1.0, 1.5);
}

} // namespace

TEST(CommutedTensor, SatisfiesCommutationIdentitySymbolically) {
  // For any u: Gamma N(u,u) = N(Gamma u, u) + N(u, Gamma u) + N_{B'}(u,u) - 2 [Gamma = S] N(u,u),
  // and box Gamma = Gamma box + 2 [Gamma = S] box, so for solutions box Gamma u
  // = N(Gamma u,u) + N(u,Gamma u) + N_{B'}(u,u).
  std::mt19937_64 rng(41);
  const Poly u = random_poly(rng, 3);
  for (const auto& b : {random_tensor(rng), canonical_tensor(CanonicalKind::q0_quasilinear),
                        canonical_tensor(CanonicalKind::john_nonnull)})
    for (int k = 0; k < kGeneratorCount; ++k) {
      const DiffOperator gen = DiffOperator::generator(k);
      const Poly gu = act(gen, u);
      const Poly lhs = act(gen, null_form(b, u, u));
      Poly rhs = add(null_form(b, gu, u), null_form(b, u, gu));
      rhs = add(rhs, null_form(commuted_tensor(b, k), u, u));
      if (k == kScaling) rhs = add(rhs, null_form(b, u, u), -2.0);
      EXPECT_LE(max_coef(add(lhs, rhs, -1.0)), 1e-12) << generator_name(k);
    }
}

TEST(CommutedTensor, BoxCommutators) {
  std::mt19937_64 rng(43);
  const Poly u = random_poly(rng, 4);
  const DiffOperator box = DiffOperator::box();
  for (int k = 0; k < kGeneratorCount; ++k) {
    const DiffOperator gen = DiffOperator::generator(k);
    Poly comm = add(act(box, act(gen, u)), act(gen, act(box, u)), -1.0);
    if (k == kScaling) comm = add(comm, act(box, u), -2.0);
    EXPECT_LE(max_coef(comm), 1e-12) << generator_name(k);
  }
}

TEST(CommutedTensor, TranslationsGiveZeroAndNullIsPreserved) {
  const auto q0 = canonical_tensor(CanonicalKind::q0_quasilinear);
  for (int k : {kDt, kD1, kD2, kD3}) EXPECT_TRUE(commuted_tensor(q0, k).is_zero());
  for (int k = 0; k < kGeneratorCount; ++k) EXPECT_LE(null_defect(commuted_tensor(q0, k)), 1e-13);
  EXPECT_THROW(commuted_tensor(q0, 11), ConfigError);
}

TEST(Commutation, ErrorsAndZeroState) {
  const auto g = GridSpec::make(21, 2.0);
  std::vector<FieldSnapshot> w;
  for (int j = 0; j < 9; ++j) w.emplace_back(g, 1.0 + (j - 4) * 0.05);
  const SpacetimeJet zero(w);
  const auto q0 = canonical_tensor(CanonicalKind::q0_quasilinear);
  const auto c = commutation_residual(zero, q0, MultiIndex::unit(kL2));
  EXPECT_EQ(c.residual, 0.0);
  EXPECT_EQ(c.box_norm, 0.0);
  EXPECT_THROW(commutation_residual(zero, q0, MultiIndex{}), ConfigError);
  EXPECT_THROW(commutation_residual(zero, q0, MultiIndex::unit(kD1) + MultiIndex::unit(kD2)),
               ConfigError);
  const SpacetimeJet shallow(w, 2);
  EXPECT_THROW(commutation_residual(shallow, q0, MultiIndex::unit(kD1)), BudgetError);
}

TEST(Commutation, LinearResidualIsBoxOfGammaAndConverges) {
  const auto f = field(3, 0.0, 0.5);
  double prev = 0.0;
  for (int n : {32, 48}) {
    const auto g = GridSpec::make(n, 4.0);
    const auto jet = linear_jet(g, f, 1.0, 0.4 * g.h);
    const auto c = commutation_residual(jet, NullFormTensor{}, MultiIndex::unit(kOmega3));
    EXPECT_EQ(c.residual, c.box_norm);
    if (prev > 0.0) EXPECT_LT(c.residual, prev / 2.0);
    prev = c.residual;
  }
}

TEST(LemmaRatios, ZeroFieldsGiveZero) {
  const auto g = GridSpec::make(21, 3.0);
  const FieldSnapshot z(g, 0.0);
  EXPECT_EQ(weighted_sobolev_ratio(z), 0.0);
  EXPECT_EQ(hardy_ratio(z, 2.0, 1.0), 0.0);
  std::vector<FieldSnapshot> w;
  for (int j = 0; j < 9; ++j) w.emplace_back(g, 2.0 + (j - 4) * 0.05);
  const SpacetimeJet jet(w);
  EXPECT_EQ(derivative_ratio(jet, 1), 0.0);
  EXPECT_EQ(derivative_ratio(jet, 2), 0.0);
  EXPECT_EQ(nullform_ratio(jet, canonical_tensor(CanonicalKind::q0_quasilinear)), 0.0);
  EXPECT_EQ(lorentz_identity_error(jet), 0.0);
  EXPECT_EQ(klainerman_ratio(jet), 0.0);
}

TEST(LemmaRatios, ScaleInvariantToRoundoff) {
  const auto g = GridSpec::make(40, 6.0);
  const auto f = field(8, 0.0, 1.0);
  const auto u = sample_static(g, f);
  EXPECT_NEAR(weighted_sobolev_ratio(u.scaled(-7.0)), weighted_sobolev_ratio(u), 1e-12);
  const auto fh = field(9, 1.0, 2.0);
  const auto uh = sample_static(g, fh);
  EXPECT_NEAR(hardy_ratio(uh.scaled(7.0), 2.0, 1.5), hardy_ratio(uh, 2.0, 1.5), 1e-12);
  const auto jet = linear_jet(g, f, 1.5, 0.4 * g.h);
  std::vector<FieldSnapshot> w7;
  for (int j = 0; j < 9; ++j) {
    const double t = 1.5 + (j - 4) * 0.4 * g.h;
    w7.push_back(FieldSnapshot::sample(g, t, [&](double a, double b, double c) {
      return 7.0 * f.linear_solution(t, a, b, c);
    }));
  }
  const SpacetimeJet jet7(w7);
  const auto q0 = canonical_tensor(CanonicalKind::q0_quasilinear);
  EXPECT_NEAR(derivative_ratio(jet7, 1), derivative_ratio(jet, 1), 1e-12 * derivative_ratio(jet, 1));
  EXPECT_NEAR(derivative_ratio(jet7, 2), derivative_ratio(jet, 2), 1e-12 * derivative_ratio(jet, 2));
  EXPECT_NEAR(nullform_ratio(jet7, q0), nullform_ratio(jet, q0), 1e-12 * nullform_ratio(jet, q0));
}

TEST(LemmaRatios, PreconditionsEnforced) {
  const auto g = GridSpec::make(30, 6.0);
  const auto u = sample_static(g, field(2, 3.0, 4.0));
  EXPECT_THROW(hardy_ratio(u, 1.0, 1.0), Error);
  const auto jet = linear_jet(g, field(2, 0.0, 1.0), 1.0, 0.4 * g.h);
  EXPECT_THROW(nullform_ratio(jet, canonical_tensor(CanonicalKind::john_nonnull)), ConfigError);
}

TEST(LemmaRatios, LorentzIdentityOnAnalyticJets) {
  const auto g = GridSpec::make(40, 6.0);
  const auto jet = linear_jet(g, field(12, 0.0, 1.5), 2.0, 0.4 * g.h);
  EXPECT_LE(lorentz_identity_error(jet), 1e-8);
}

TEST(Bumps, SeededGenerationIsDeterministic) {
  std::mt19937_64 a(99), b(99);
  const auto fa = random_bump_field(a, 1.0, 2.0, 0.5, 1.0);
  const auto fb = random_bump_field(b, 1.0, 2.0, 0.5, 1.0);
  ASSERT_EQ(fa.bumps.size(), fb.bumps.size());
  EXPECT_GE(fa.bumps.size(), 1u);
  EXPECT_LE(fa.bumps.size(), 5u);
  for (std::size_t i = 0; i < fa.bumps.size(); ++i) {
    EXPECT_EQ(fa.bumps[i].center, fb.bumps[i].center);
    EXPECT_EQ(fa.bumps[i].R, fb.bumps[i].R);
    EXPECT_EQ(fa.bumps[i].amplitude, fb.bumps[i].amplitude);
    const auto& c = fa.bumps[i].center;
    const double rho = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
    EXPECT_GE(rho, 1.0 - 1e-12);
    EXPECT_LE(rho, 2.0 + 1e-12);
    EXPECT_GE(std::abs(fa.bumps[i].amplitude), 0.5);
    EXPECT_LE(std::abs(fa.bumps[i].amplitude), 1.5);
  }
  std::mt19937_64 r(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = uniform01(r);
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
}

TEST(Bumps, LinearSolutionStartsAtValue) {
  const auto f = field(5, 0.0, 1.0);
  for (double x : {-0.5, 0.0, 0.3})
    EXPECT_NEAR(f.linear_solution(0.0, x, 0.2, -0.1), f.value(x, 0.2, -0.1), 1e-14);
}

TEST(RatioStats, MaxMedianAndFiniteness) {
  const auto s = ratio_stats({3.0, 1.0, 2.0, 10.0});
  EXPECT_EQ(s.max, 10.0);
  EXPECT_EQ(s.median, 2.5);
  EXPECT_EQ(s.count, 4u);
  EXPECT_TRUE(s.finite);
  EXPECT_FALSE(ratio_stats({1.0, std::nan("")}).finite);
  EXPECT_EQ(ratio_stats({}).count, 0u);
}

TEST(Families, DeterministicAndStructured) {
  LemmaFamilyOptions o;
  o.n = 24;
  o.members_per_level = 1;
  o.seed = 5;
  const auto a = run_lemma_families(o);
  const auto b = run_lemma_families(o);
  ASSERT_EQ(a.size(), 7u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].key, b[i].key);
    EXPECT_EQ(a[i].ratios, b[i].ratios);
    EXPECT_EQ(a[i].ratios.size(), 3u);
    EXPECT_EQ(a[i].members.size(), 3u);
    EXPECT_TRUE(a[i].stats.finite);
  }
  o.n = 10;
  EXPECT_THROW(run_lemma_families(o), ConfigError);
}
