#pragma once

#include "nullwave/grid.hpp"
#include "nullwave/nullform.hpp"
#include "nullwave/vectorfields.hpp"

#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace nullwave {

/// Ghost weight at sigma = t - r: q = arctan(sigma), q' = 1 / (1 + sigma^2).
struct GhostWeight {
  double sigma = 0.0;
  double q = 0.0;
  double qprime = 1.0;
};

GhostWeight ghost_q(double sigma) noexcept;

/// `none` replaces q by 0 (unweighted diagnostics; G vanishes identically).
enum class Weighting { ghost, none };

/// 1/2 int (|d_t w|^2 + |grad w|^2) e^{-q(t - r)} dx for the jet's field.
double energy_E1(const SpacetimeJet& jet, Weighting weighting = Weighting::ghost);

struct GeneralizedEnergy {
  double Es = 0.0;
  std::vector<MultiIndex> indices;
  std::vector<double> per_index;
};

/// sum over |a| <= s - 1 of E_1(Gamma^a u).
GeneralizedEnergy energy_Es(const SpacetimeJet& jet, int s,
                            Weighting weighting = Weighting::ghost);
GeneralizedEnergy energy_Es(const SpacetimeJet& jet, std::span<const MultiIndex> indices,
                            Weighting weighting = Weighting::ghost);

/// sum over |a| <= s - 1 of 1/2 int |d_t Gamma^a u x/r + grad Gamma^a u|^2 e^{-q} q' dx,
/// nodes with r < h/2 left out.
double dissipation_G(const SpacetimeJet& jet, int s, Weighting weighting = Weighting::ghost);

/// E_s - 1/2 B_{lmn} eta_{nd} sum_{|a| = s-1} int d_l u d_m Gamma^a u d_d Gamma^a u e^{-q} dx.
double modified_energy(const SpacetimeJet& jet, int s, const NullFormTensor& b,
                       Weighting weighting = Weighting::ghost);

/// ||d_t u||^2_{H^{s-1}} + ||grad u||^2_{H^{s-1}} at the jet centre (no weight).
double hs_energy(const SpacetimeJet& jet, int s);

/// 1/2 int (v^2 + |grad u|^2) dx straight from a solver state.
double plain_energy(const FieldSnapshot& u, const FieldSnapshot& v);

struct SampleRequest {
  int s = 1;
  NullFormTensor b{};
  Weighting weighting = Weighting::ghost;
  bool with_hs = true;
  bool with_identity = true;
};

/// Everything one diagnostic sample needs, evaluated in a single pass.
struct EnergySample {
  double t = 0.0;
  double Es = 0.0;
  double EsTilde = 0.0;
  double G = 0.0;
  double Hs = 0.0;
  /// sum_a int (box Gamma^a u) d_t Gamma^a u e^{-q} dx
  double identity_rhs = 0.0;
  std::vector<double> per_index;
};

EnergySample sample_energies(const SpacetimeJet& jet, const SampleRequest& request);

/// One row of the energy time series.
struct EnergyReport {
  double t = 0.0;
  double Es = 0.0;
  double EsTilde = 0.0;
  double G = 0.0;
  double Hs = 0.0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  double min_denom = 1.0;
  double identity_rhs = 0.0;
  std::vector<double> per_index;
};

EnergyReport to_report(const EnergySample& sample, double min_denom);

/// |dE_s/dt + G - RHS| per row. dE_s/dt uses finite-difference weights over
/// the (up to) five nearest samples, so it is fourth order in the sample
/// spacing. Throws Error with fewer than 3 rows or non-uniform spacing.
std::vector<double> energy_identity_residuals(std::span<const EnergyReport> series,
                                              bool include_rhs = true);
void fill_residuals(std::vector<EnergyReport>& series);

/// Columns t,Es,EsTilde,G,Hs,residual,min_denom; 17 significant digits.
void write_report_csv(std::ostream& out, std::span<const EnergyReport> series);
std::vector<EnergyReport> read_report_csv(std::istream& in);

} // namespace nullwave
