#pragma once

#include "nullwave/energetics.hpp"
#include "nullwave/grid.hpp"
#include "nullwave/nullform.hpp"

#include <array>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nullwave {

enum class Profile { poly_bump, poly_bump8, gauss_truncated };

Profile parse_profile(const std::string& name);
const char* profile_name(Profile p);

/// Radial Cauchy data supported in the ball of radius R about `center`:
///   poly_bump:       eps (1 - |x|^2/R^2)^4
///   poly_bump8:      eps (1 - |x|^2/R^2)^8
///   gauss_truncated: eps exp(-1 / (1 - |x|^2/R^2))
/// psi uses the same profile with amplitude psi_eps (0 by default).
struct CauchyData {
  double R = 1.0;
  double eps = 0.0;
  double psi_eps = 0.0;
  Profile profile = Profile::poly_bump;
  std::array<double, 3> center{0.0, 0.0, 0.0};

  bool is_radial() const noexcept {
    return center[0] == 0.0 && center[1] == 0.0 && center[2] == 0.0;
  }
  /// Profile shape at distance rho from the centre (even in rho, 0 for |rho| >= R).
  double shape(double rho) const noexcept;
  double shape_derivative(double rho) const noexcept;
  double phi(double rho) const noexcept { return eps * shape(rho); }
  double psi(double rho) const noexcept { return psi_eps * shape(rho); }

  double phi_at(double x1, double x2, double x3) const noexcept;
  double psi_at(double x1, double x2, double x3) const noexcept;
};

/// Throws ConfigError unless R > 0 and eps, psi_eps >= 0.
CauchyData make_cauchy_data(double R, double eps, Profile profile, double psi_eps = 0.0);
/// Throws ConfigError when the data support reaches the padded boundary.
void check_data_fits(const CauchyData& data, const GridSpec& grid, int pad);

/// Exact solution of the linear wave equation for radial data at (t, r):
///   u = [w0(r+t) + w0(r-t)] / (2r) + (1/(2r)) int_{r-t}^{r+t} w1,
/// w0 = rho phi, w1 = rho psi (odd), with the r -> 0 limit w0'(t) + w1(t).
/// Throws ConfigError for non-radial data.
double linear_radial_oracle(const CauchyData& data, double t, double r);

struct RhsResult {
  FieldSnapshot du_dt;
  FieldSnapshot dv_dt;
  double min_denom = 1.0;
};

/// Right-hand side of the first-order system (u, v = u_t):
///   dv/dt = [Lap u + sum_{(mu,nu) != (0,0)} B_{l mu nu} d_l u d_mu d_nu u] / (1 - B_{l00} d_l u)
/// with d_0 u = v and d_0 d_i u = d_i v. Throws HyperbolicityLoss when the
/// denominator drops below delta_hyp anywhere.
RhsResult quasilinear_rhs(const FieldSnapshot& u, const FieldSnapshot& v, const NullFormTensor& b,
                          double delta_hyp = 0.5,
                          LaplacianKind laplacian = LaplacianKind::composed);

/// Reusable evaluator for the right-hand side; owns its scratch fields.
class QuasilinearOperator {
public:
  QuasilinearOperator(const GridSpec& grid, const NullFormTensor& b, LaplacianKind laplacian);

  struct Margin {
    double min = 1.0;
    std::size_t where = 0;
  };

  /// Writes dv/dt; returns the minimum of 1 - B_{l00} d_l u over nodes.
  Margin evaluate(std::span<const double> u, std::span<const double> v, std::span<double> dvdt);

  const NullFormTensor& tensor() const noexcept { return b_; }
  const GridSpec& grid() const noexcept { return grid_; }

private:
  GridSpec grid_;
  NullFormTensor b_;
  LaplacianKind laplacian_;
  bool need_du_[4] = {};
  bool need_dv_[4] = {};
  bool need_dudu_[4][4] = {};
  std::vector<double> lap_, scratch_;
  std::array<std::vector<double>, 4> du_;          // spatial d_i u (index 1..3)
  std::array<std::vector<double>, 4> dv_;          // d_i v
  std::array<std::array<std::vector<double>, 4>, 4> dd_;  // d_i d_j u, i <= j
};

struct SimState {
  FieldSnapshot u;
  FieldSnapshot v;
  double t = 0.0;
  double dt = 0.0;
  long step = 0;
  int window = 9;
  /// Last `window` snapshots of u at uniform spacing dt, oldest first.
  std::deque<FieldSnapshot> history;
  /// Nodal minimum of the denominator at each history time (NaN until known).
  std::deque<double> history_margin;
  /// Running minimum of the denominator over every stage evaluated so far.
  double min_denom = 1.0;
  /// Largest value removed from the outermost pad layers.
  double boundary_leak = 0.0;

  bool history_full() const noexcept { return static_cast<int>(history.size()) == window; }
};

struct StepOptions {
  double delta_hyp = 0.5;
  int pad = 4;
  LaplacianKind laplacian = LaplacianKind::composed;
};

SimState initial_state(const GridSpec& grid, const CauchyData& data, double dt, int window = 9);

/// Classical four-stage step of (u, v). Throws HyperbolicityLoss or BlowupError.
SimState step_rk4(const SimState& state, const NullFormTensor& b, const StepOptions& options = {});
/// In-place form reusing an operator's scratch space.
void step_rk4_inplace(SimState& state, QuasilinearOperator& op, const StepOptions& options);

struct RunConfig {
  GridSpec grid = GridSpec::make(64, 4.0);
  double cfl = 0.4;
  double T_final = 1.5;
  int s = 3;
  CauchyData data{};
  NullFormTensor b{};
  int sample_every = 1;
  int pad = 4;
  double delta_hyp = 0.5;
  int window = 9;
  LaplacianKind laplacian = LaplacianKind::composed;
  Weighting weighting = Weighting::ghost;
  bool diagnostics = true;
  bool with_hs = true;
  /// Relative size of a pad-layer leak that counts as boundary contact.
  double leak_tolerance = 1e-4;
  /// Record the unweighted energy 1/2 int (v^2 + |grad u|^2) after every step.
  bool track_plain_energy = false;
};

/// Largest dt <= cfl * h that divides T_final into whole steps.
double choose_dt(const RunConfig& config, long* steps = nullptr);

struct FailureRecord {
  enum class Kind { hyperbolicity, blowup };
  Kind kind = Kind::hyperbolicity;
  double t = 0.0;
  std::string message;
};

struct RunResult {
  std::vector<EnergyReport> reports;
  std::optional<FailureRecord> failure;
  SimState final_state;
  bool boundary_contact = false;
  /// (t, nodal minimum of the denominator) at every step start.
  std::vector<std::pair<double, double>> margin_series;
  /// (t, plain_energy) at t = 0 and after every step, when tracked.
  std::vector<std::pair<double, double>> plain_energy_series;
};

using RunObserver = std::function<void(const SimState&, const EnergyReport&)>;

/// Evolves to T_final, emitting a report every `sample_every` steps once the
/// history window is full (reports refer to the window centre time).
/// Hyperbolicity loss and blowup end the run with a failure record.
RunResult run(const RunConfig& config, const RunObserver& observer = {});

/// Steps with dt = t_c / ceil(t_c / (cfl h)) until the history window is
/// centred exactly on t_c and returns that window as a jet. T_final and the
/// diagnostics settings of `config` are ignored. Throws HyperbolicityLoss or
/// BlowupError like step_rk4.
SpacetimeJet solution_jet(const RunConfig& config, double t_c);

} // namespace nullwave
