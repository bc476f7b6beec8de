#include "nullwave/errors.hpp"
#include "nullwave/lemmas.hpp"
#include "nullwave/solver.hpp"
#include "nullwave/vectorfields.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace nullwave;
using namespace testing_support;

namespace {

Monomial mono(int a, int b, int c, int d) {
  return {static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b), static_cast<std::uint8_t>(c),
          static_cast<std::uint8_t>(d)};
}

FieldSnapshot radial_field(const GridSpec& g) {
  return FieldSnapshot::sample(g, 0.0, [](double x, double y, double z) {
    const double w = 1.0 - (x * x + y * y + z * z) / 2.25;
    return w > 0 ? std::pow(w, 4) : 0.0;
  });
}

} // namespace

TEST(MultiIndex, EnumerationCountsAndOrder) {
  EXPECT_EQ(enumerate_multiindices(0).size(), 1u);
  EXPECT_EQ(enumerate_multiindices(0)[0].order(), 0);
  const auto one = enumerate_multiindices(1);
  ASSERT_EQ(one.size(), 12u);
  EXPECT_EQ(one[1], MultiIndex::unit(0));
  EXPECT_EQ(one[11], MultiIndex::unit(10));
  EXPECT_EQ(enumerate_multiindices(2).size(), 78u);
  EXPECT_EQ(enumerate_multiindices(3).size(), 364u);
  const auto three = enumerate_multiindices(3);
  for (std::size_t i = 1; i < three.size(); ++i) ASSERT_LE(three[i - 1].order(), three[i].order());
}

TEST(MultiIndex, DumpListsEveryIndex) {
  const auto list = enumerate_multiindices(1);
  std::ostringstream out;
  write_multiindices(out, list);
  std::istringstream in(out.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_GE(lines, 12);
}

TEST(DiffOperator, GeneratorsOnMonomials) {
  // L_1 x_1 = t, S (t^2 - r^2) = 2 (t^2 - r^2), Omega_3 x_1 = x_1 d_2 x_1 - x_2 d_1 x_1 = -x_2
  const Poly x1{{mono(0, 1, 0, 0), 1.0}};
  EXPECT_EQ(DiffOperator::generator(kL1).apply_to_polynomial(x1), (Poly{{mono(1, 0, 0, 0), 1.0}}));
  const Poly q{{mono(2, 0, 0, 0), 1.0}, {mono(0, 2, 0, 0), -1.0}, {mono(0, 0, 2, 0), -1.0},
               {mono(0, 0, 0, 2), -1.0}};
  Poly sq = DiffOperator::generator(kScaling).apply_to_polynomial(q);
  EXPECT_LE(max_coef(add(sq, q, -2.0)), 1e-15);
  const Poly om = DiffOperator::generator(kOmega3).apply_to_polynomial(x1);
  EXPECT_LE(max_coef(add(om, Poly{{mono(0, 0, 1, 0), 1.0}})), 1e-15);
}

TEST(DiffOperator, ProductIsOrderedComposition) {
  MultiIndex a = MultiIndex::unit(kOmega1) + MultiIndex::unit(kScaling);
  const auto direct = compose(DiffOperator::generator(kOmega1), DiffOperator::generator(kScaling));
  EXPECT_EQ(DiffOperator::product(a).terms(), direct.terms());
  EXPECT_EQ(DiffOperator::product(MultiIndex{}).terms(), DiffOperator::identity().terms());
}

TEST(ApplyGenerator, L1OnX1IsTime) {
  const auto g = GridSpec::make(21, 1.0);
  const Poly x1{{mono(0, 1, 0, 0), 1.0}};
  const auto jet = poly_jet(g, x1, 0.7, 0.05, 1);
  const auto l1 = apply_generator(kL1, jet);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.face_distance(i) >= 2) ASSERT_NEAR(l1[i], 0.7, 1e-12);
}

TEST(ApplyGenerator, ScalingDetectsDegree) {
  const auto g = GridSpec::make(21, 1.0);
  const Poly q{{mono(2, 0, 0, 0), 1.0}, {mono(0, 2, 0, 0), -1.0}, {mono(0, 0, 2, 0), -1.0},
               {mono(0, 0, 0, 2), -1.0}};
  const auto jet = poly_jet(g, q, 0.4, 0.05, 1);
  const auto s = apply_generator(kScaling, jet);
  const auto want = sample_poly(g, q, 0.4).scaled(2.0);
  EXPECT_LE(interior_max_diff(s, want, 2), 1e-12);
}

TEST(ApplyGenerator, RotationsAnnihilateRadialPolynomials) {
  // r^4 has degree 4, where the 5-point first difference is exact away from the faces.
  const auto g = GridSpec::make(25, 2.0);
  const auto f = FieldSnapshot::sample(g, 0.0, [](double x, double y, double z) {
    const double r2 = x * x + y * y + z * z;
    return r2 * r2;
  });
  const auto jet = SpacetimeJet::static_field(f, 2);
  const auto zero = FieldSnapshot(g, 0.0);
  const double scale = f.max_abs();
  for (int k : {kOmega1, kOmega2, kOmega3})
    EXPECT_LE(interior_max_diff(apply_generator(k, jet), zero, 2), 1e-12 * scale);
  const MultiIndex om2 = MultiIndex::unit(kOmega1) + MultiIndex::unit(kOmega1);
  EXPECT_LE(interior_max_diff(apply_multi(om2, jet), zero, 4), 1e-12 * scale);
}

TEST(ApplyGenerator, RotationsOfRadialBumpVanishAtFourthOrder) {
  double prev = 0.0;
  for (int n : {33, 65}) {
    const auto g = GridSpec::make(n, 2.0);
    const auto f = FieldSnapshot::sample(g, 0.0, [](double x, double y, double z) {
      const double w = 1.0 - (x * x + y * y + z * z) / 2.25;
      return w > 0 ? std::pow(w, 8) : 0.0;  // C^7, so the stencil error is O(h^4)
    });
    const auto jet = SpacetimeJet::static_field(f, 2);
    double err = 0.0;
    for (int k : {kOmega1, kOmega2, kOmega3}) err = std::max(err, apply_generator(k, jet).max_abs());
    if (prev > 0.0) EXPECT_GE(prev / err, 10.0);
    prev = err;
  }
}

TEST(ApplyMulti, EmptyIndexIsIdentity) {
  const auto g = GridSpec::make(17, 1.0);
  const auto f = radial_field(g);
  const auto jet = SpacetimeJet::static_field(f, 1);
  const auto out = apply_multi(MultiIndex{}, jet);
  for (std::size_t i = 0; i < g.size(); ++i) ASSERT_EQ(out[i], f[i]);
}

TEST(ApplyMulti, ExactOnPolynomialJetsUpToOrderTwo) {
  const auto g = GridSpec::make(19, 1.0);
  std::mt19937_64 rng(17);
  const Poly p = random_poly(rng, 4);
  const double tc = 0.3;
  const auto jet = poly_jet(g, p, tc, 0.04, 2);
  for (const auto& a : enumerate_multiindices(2)) {
    const Poly sym = DiffOperator::product(a).apply_to_polynomial(p);
    const auto num = apply_multi(a, jet);
    const auto want = sample_poly(g, sym, tc);
    const double scale = std::max(1.0, want.max_abs());
    ASSERT_LE(interior_max_diff(num, want, 4), 1e-12 * scale) << a.to_string();
  }
}

TEST(ApplyMulti, LinearInTheJet) {
  const auto g = GridSpec::make(19, 1.0);
  std::mt19937_64 rng(23);
  const Poly p = random_poly(rng, 3), q = random_poly(rng, 3);
  const Poly comb = add(Poly{}, add(p, q, -0.5), 2.0);  // 2 p - q
  const auto jp = poly_jet(g, p, 0.2, 0.05, 1), jq = poly_jet(g, q, 0.2, 0.05, 1);
  const auto jc = poly_jet(g, comb, 0.2, 0.05, 1);
  for (int k = 0; k < kGeneratorCount; ++k) {
    auto lhs = apply_generator(k, jc);
    auto rhs = apply_generator(k, jp).scaled(2.0);
    rhs.axpy(-1.0, apply_generator(k, jq));
    const double scale = std::max(1.0, lhs.max_abs());
    for (std::size_t i = 0; i < g.size(); ++i) ASSERT_NEAR(lhs[i], rhs[i], 1e-12 * scale);
  }
}

TEST(ApplyMulti, BudgetExceededThrows) {
  const auto g = GridSpec::make(17, 1.0);
  const auto jet = SpacetimeJet::static_field(radial_field(g), 1);
  EXPECT_THROW(apply_generator(kDt, jet), BudgetError);
  const MultiIndex two = MultiIndex::unit(kD1) + MultiIndex::unit(kD2);
  EXPECT_THROW(apply_multi(two, jet), BudgetError);
}

TEST(ApplyMulti, DttMatchesLaplacianOnLinearRun) {
  // u_tt = Lap u for B = 0; compare the temporal stencil with the spatial one.
  RunConfig rc;
  rc.grid = GridSpec::make(48, 4.0);
  rc.data = make_cauchy_data(1.0, 0.1, Profile::poly_bump8);
  rc.b = NullFormTensor{};
  double prev = 0.0;
  // The wave focuses at the origin near t = 1; coarser grids are pre-asymptotic there.
  for (int n : {56, 80}) {
    rc.grid = GridSpec::make(n, 4.0);
    const auto jet = solution_jet(rc, 1.0);
    const auto utt = apply_multi(MultiIndex::unit(kDt) + MultiIndex::unit(kDt), jet);
    std::vector<double> lap(rc.grid.size()), scratch(2 * rc.grid.size());
    laplacian_into(jet.center().values(), lap, rc.grid, LaplacianKind::composed, scratch);
    double err = 0.0;
    for (std::size_t i = 0; i < lap.size(); ++i) err = std::max(err, std::abs(utt[i] - lap[i]));
    EXPECT_LE(err, 0.01 * utt.max_abs());
    if (prev > 0.0) EXPECT_GE(prev / err, 2.0);
    prev = err;
  }
}

TEST(Jet, WindowRules) {
  EXPECT_EQ(SpacetimeJet::max_order_for_window(9), 4);
  EXPECT_EQ(SpacetimeJet::max_order_for_window(5), 0);
  const auto g = GridSpec::make(17, 1.0);
  std::vector<FieldSnapshot> w{FieldSnapshot(g, 0.0), FieldSnapshot(g, 0.1)};
  EXPECT_THROW(SpacetimeJet{w}, Error);
  std::vector<FieldSnapshot> uneven;
  for (double t : {0.0, 0.1, 0.2, 0.35, 0.4, 0.5, 0.6}) uneven.emplace_back(g, t);
  EXPECT_THROW(SpacetimeJet{uneven}, Error);
}

TEST(Jet, FornbergWeightsReproduceMonomials) {
  const std::vector<double> xs{-2, -1, 0, 1, 2};
  const auto w = fornberg_weights(1, 0.0, xs);
  EXPECT_NEAR(w[0], 1.0 / 12, 1e-15);
  EXPECT_NEAR(w[1], -8.0 / 12, 1e-15);
  EXPECT_NEAR(w[3], 8.0 / 12, 1e-15);
  const auto w2 = fornberg_weights(2, 0.0, xs);
  double s = 0;
  for (int j = 0; j < 5; ++j) s += w2[j] * xs[j] * xs[j];
  EXPECT_NEAR(s, 2.0, 1e-14);
}

TEST(LorentzIdentity, ExactOnPolynomialJets) {
  const auto g = GridSpec::make(25, 2.0);
  std::mt19937_64 rng(29);
  const Poly p = random_poly(rng, 3);
  const auto jet = poly_jet(g, p, 0.5, 0.05, 1);
  EXPECT_LE(lorentz_identity_error(jet), 1e-8);
}
