#include "nullwave/errors.hpp"
#include "nullwave/nullform.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace nullwave;

namespace {

RawTensor random_raw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  RawTensor r{};
  for (auto& a : r)
    for (auto& b : a)
      for (auto& c : b) c = U(rng);
  return r;
}

NullFormTensor only_b000() {
  RawTensor r{};
  r[0][0][0] = 1.0;
  return NullFormTensor::symmetrize(r);
}

/// Brute-force contraction B_{lmn} X_l X_m X_n.
double contract_by_hand(const NullFormTensor& b, const std::array<double, 4>& x) {
  double s = 0.0;
  for (int l = 0; l < 4; ++l)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) s += b(l, m, n) * x[l] * x[m] * x[n];
  return s;
}

} // namespace

TEST(Symmetrize, ZeroArrayGivesZeroTensor) {
  EXPECT_TRUE(NullFormTensor::symmetrize(RawTensor{}).is_zero());
}

TEST(Symmetrize, AveragesOffDiagonalPair) {
  RawTensor r{};
  r[0][0][1] = 1.0;
  const auto b = NullFormTensor::symmetrize(r);
  EXPECT_EQ(b(0, 0, 1), 0.5);
  EXPECT_EQ(b(0, 1, 0), 0.5);
}

TEST(Symmetrize, IdempotentAndSymmetric) {
  std::mt19937_64 rng(3);
  const auto b = NullFormTensor::symmetrize(random_raw(rng));
  EXPECT_EQ(NullFormTensor::symmetrize(b.entries()), b);
  EXPECT_EQ(symmetry_defect(b.entries()), 0.0);
}

TEST(Symmetrize, RejectsNonFinite) {
  RawTensor r{};
  r[1][2][3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(NullFormTensor::symmetrize(r), ConfigError);
  r[1][2][3] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(NullFormTensor::symmetrize(r), ConfigError);
}

TEST(NullVector, LiesOnCone) {
  const auto x = NullVector::from_direction(0.3, -2.0, 1.1);
  EXPECT_EQ(x.components[0], -1.0);
  EXPECT_LE(x.cone_defect(), 1e-14);
  EXPECT_THROW(NullVector::from_direction(0, 0, 0), Error);
}

TEST(NullDefect, CanonicalTensors) {
  EXPECT_EQ(null_defect(canonical_tensor(CanonicalKind::zero)), 0.0);
  EXPECT_LE(null_defect(canonical_tensor(CanonicalKind::q0_quasilinear)), 1e-14);
  EXPECT_NEAR(null_defect(canonical_tensor(CanonicalKind::john_nonnull)), 1.0, 1e-14);
  EXPECT_NEAR(null_defect(only_b000()), 1.0, 1e-14);
}

TEST(NullDefect, Q0EntriesMatchDefinition) {
  const auto q = canonical_tensor("q0_quasilinear");
  EXPECT_EQ(q(0, 0, 0), 1.0);
  for (int i = 1; i <= 3; ++i) {
    EXPECT_EQ(q(i, 0, i), -0.5);
    EXPECT_EQ(q(i, i, 0), -0.5);
  }
}

TEST(NullDefect, SampledAgreesWithExactOnCanonicalTensors) {
  for (const char* name : {"zero", "q0_quasilinear", "john_nonnull"}) {
    const auto b = canonical_tensor(name);
    EXPECT_NEAR(null_defect(b, DefectMethod::sampled, 512), null_defect(b), 1e-10) << name;
  }
}

TEST(NullDefect, SampledNeverExceedsExact) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto b = NullFormTensor::symmetrize(random_raw(rng));
    EXPECT_LE(null_defect(b, DefectMethod::sampled, 256), null_defect(b) * (1 + 1e-12));
  }
}

TEST(NullDefect, ContractionPolynomialMatchesBruteForce) {
  std::mt19937_64 rng(5);
  const auto b = NullFormTensor::symmetrize(random_raw(rng));
  auto p = null_contraction_polynomial(b);
  const auto q = p;
  p.reduce_on_sphere();
  for (const auto& w : sphere_directions(50)) {
    const double direct = contract_by_hand(b, {-1.0, w[0], w[1], w[2]});
    EXPECT_NEAR(q.evaluate(w[0], w[1], w[2]), direct, 1e-12);
    EXPECT_NEAR(p.evaluate(w[0], w[1], w[2]), direct, 1e-12);
    EXPECT_NEAR(b.contract({-1.0, w[0], w[1], w[2]}), direct, 1e-12);
  }
}

TEST(NullDefect, HomogeneousOfDegreeOne) {
  std::mt19937_64 rng(7);
  const auto b = NullFormTensor::symmetrize(random_raw(rng));
  for (double c : {-3.0, 0.5, 2.0})
    EXPECT_NEAR(null_defect(b.scaled(c)), std::abs(c) * null_defect(b), 1e-12 * null_defect(b));
}

TEST(NullDefect, ConvexCombinationOfNullTensorsIsNull) {
  // Second null tensor: a spatial null form B_{0 1 2} = B_{0 2 1} = 1, B_{1 0 2} = B_{1 2 0} = -1
  // contracts to X0 X1 X2 (2 - 2) = 0.
  RawTensor r{};
  r[0][1][2] = r[0][2][1] = 1.0;
  r[1][0][2] = r[1][2][0] = -1.0;
  const auto n2 = NullFormTensor::symmetrize(r);
  ASSERT_LE(null_defect(n2), 1e-14);
  const auto q0 = canonical_tensor(CanonicalKind::q0_quasilinear);
  for (double a : {0.0, 0.25, 0.7, 1.0})
    EXPECT_LE(null_defect(q0.scaled(a) + n2.scaled(1.0 - a)), 1e-14);
}

TEST(IsNull, Examples) {
  EXPECT_TRUE(is_null(canonical_tensor(CanonicalKind::zero), 0.0));
  EXPECT_FALSE(is_null(only_b000(), 1e-9));
  EXPECT_TRUE(is_null(canonical_tensor(CanonicalKind::q0_quasilinear), 1e-12));
}

TEST(Canonical, UnknownNameThrows) {
  EXPECT_THROW(canonical_tensor("cubic"), ConfigError);
  EXPECT_TRUE(is_canonical_name("john_nonnull"));
  EXPECT_FALSE(is_canonical_name("john"));
}

TEST(TensorLiteral, RoundTripAndSymmetrizeOnLoad) {
  std::istringstream in("# comment\n\n0 0 1 1.0\n2 3 3 -0.25\n");
  const auto raw = read_tensor_literal(in);
  EXPECT_EQ(raw[0][0][1], 1.0);
  EXPECT_EQ(raw[0][1][0], 0.0);
  EXPECT_EQ(symmetry_defect(raw), 1.0);
  const auto b = NullFormTensor::symmetrize(raw);
  std::stringstream io;
  write_tensor_literal(io, b);
  EXPECT_EQ(NullFormTensor::symmetrize(read_tensor_literal(io)), b);
}

TEST(TensorLiteral, MalformedInputThrows) {
  for (const char* bad : {"0 0 0\n", "0 0 4 1\n", "a b c d\n", "0 0 0 1 extra\n", "0 0 0 nan\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(read_tensor_literal(in), ConfigError) << bad;
  }
  EXPECT_THROW(read_tensor_file("/nonexistent/tensor.txt"), ConfigError);
}
