#pragma once

// Empirical checks of the pointwise and integral inequalities behind the
// energy method. Every ratio is homogeneous of degree 0 in u, and 0/0 is
// reported as 0.

#include "nullwave/grid.hpp"
#include "nullwave/nullform.hpp"
#include "nullwave/vectorfields.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace nullwave {

/// sup_{r >= 2h} r^{1/2} |u| / sum_{|beta| <= 1} ||grad Omega^beta u||_{L^2}.
double weighted_sobolev_ratio(const FieldSnapshot& u);

/// ||u / <t - r>||_{L^2} / ||grad u||_{L^2}, <x> = (1 + x^2)^{1/2}.
/// Throws Error when u is nonzero outside |x| <= t + R.
double hardy_ratio(const FieldSnapshot& u, double t, double R);

/// max over nodes of sum_{|alpha| = N} |d^alpha u| /
///   [(1 + |t - r|)^{-N} sum_{|beta| <= N} |Gamma^beta u|],
/// alpha over space-time derivatives, beta over generator multi-indices.
/// Nodes whose denominator is below 1e-6 of its maximum are skipped.
double derivative_ratio(const SpacetimeJet& jet, int N);

/// max over nodes with r >= (t + 1)/2 of |B d_l u d_m d_n u| /
///   ((1 + t)^{-1} [|Gamma u| |d^2 u| + |d u| |d Gamma u| + <t - r> |d u| |d^2 u|]).
/// |.| sums absolute values over generators and space-time indices.
/// Throws ConfigError unless B is null.
double nullform_ratio(const SpacetimeJet& jet, const NullFormTensor& b);

/// Tensor B' of the extra term N_d(u, u) in
///   box Gamma u = N(Gamma u, u) + N(u, Gamma u) + N_d(u, u)
/// for a solution of box u = N(u, u) and a single generator Gamma.
NullFormTensor commuted_tensor(const NullFormTensor& b, int generator);

struct CommutationResidual {
  double residual = 0.0;   ///< ||box Gamma u - sum N_d||_{L^2}
  double box_norm = 0.0;   ///< ||box Gamma u||_{L^2}
};

/// Throws ConfigError unless |a| = 1; BudgetError if the jet order is below 3.
CommutationResidual commutation_residual(const SpacetimeJet& jet, const NullFormTensor& b,
                                         const MultiIndex& a);

/// max over nodes with r >= max((t + 1)/2, 2h) of
///   |(d_t + d_r) u - [S u + (x_i / r) L_i u] / (t + r)|.
double lorentz_identity_error(const SpacetimeJet& jet);

/// Optional diagnostic: sup |u| (1 + t + r) (1 + |t - r|)^{1/2} / sum_{|a| <= 2} ||Gamma^a u||.
double klainerman_ratio(const SpacetimeJet& jet);

// --- seeded bump families ---------------------------------------------------

struct Bump {
  std::array<double, 3> center{};
  double R = 1.0;
  double amplitude = 1.0;
};

/// Superposition of translated poly bumps a (1 - |x - c|^2 / R^2)^4.
struct BumpField {
  std::vector<Bump> bumps;

  double value(double x1, double x2, double x3) const noexcept;
  /// Solution of the linear wave equation with this field as u(0) and u_t(0) = 0.
  double linear_solution(double t, double x1, double x2, double x3) const;
  double support_radius() const noexcept;  ///< max |c| + R
};

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double uniform01(std::mt19937_64& rng);

/// Between 1 and 5 bumps whose centres lie at distance in [rho_lo, rho_hi]
/// from the origin, radii in [R_lo, R_hi], amplitudes of either sign in [0.5, 1.5].
BumpField random_bump_field(std::mt19937_64& rng, double rho_lo, double rho_hi, double R_lo,
                            double R_hi);

FieldSnapshot sample_static(const GridSpec& grid, const BumpField& f);
/// W snapshots of the linear evolution centred at t_c, spacing dt.
SpacetimeJet linear_jet(const GridSpec& grid, const BumpField& f, double t_c, double dt, int W = 9);

// --- family suite -------------------------------------------------------------

struct RatioStats {
  double max = 0.0;
  double median = 0.0;
  std::size_t count = 0;
  bool finite = true;
};

RatioStats ratio_stats(std::vector<double> values);

struct LemmaFamily {
  std::string key;                   ///< e.g. "sobolev"
  std::string label;                 ///< e.g. "weighted Sobolev"
  std::vector<std::string> members;  ///< member descriptions
  std::vector<double> ratios;
  std::vector<double> scaled_ratios; ///< same members with u -> 7u
  RatioStats stats;
};

struct LemmaFamilyOptions {
  int n = 96;
  std::uint64_t seed = 1;
  int members_per_level = 3;
};

/// Runs the seeded families for the derivative-ordering bound (N = 1, 2), the
/// weighted Sobolev bound, the null-form bound and the Hardy bound, plus the
/// (d_t + d_r) identity error and the optional Klainerman sup diagnostic.
/// Each family uses its own fixed cube; only n varies.
std::vector<LemmaFamily> run_lemma_families(const LemmaFamilyOptions& options);

} // namespace nullwave
