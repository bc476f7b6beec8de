#pragma once

// Experiment orchestration: configuration files, growth fits, and the five
// CLI scenarios. Every cmd_* writes its artefacts under the output directory
// and returns a process exit code: 0 success or verdict, 1 usage or config
// error, 2 hyperbolicity loss or blowup.

#include "nullwave/energetics.hpp"
#include "nullwave/lemmas.hpp"
#include "nullwave/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nullwave {

struct ExperimentConfig {
  /// Informational; manifests record the scenario that produced them.
  std::string scenario;
  // solver
  int n = 64;
  double L = 7.5;
  double cfl = 0.4;
  double T_final = 2.5;
  int s_max = 3;
  double eps = 0.05;
  double R = 3.45;
  Profile profile = Profile::poly_bump;
  double psi_eps = 0.0;
  std::string tensor = "q0_quasilinear";
  int sample_every = 1;
  int pad = 4;
  double delta_hyp = 0.5;
  int window = 9;
  LaplacianKind laplacian = LaplacianKind::composed;
  Weighting weighting = Weighting::ghost;
  // orchestration
  int threads = 1;
  std::string output_dir = "out";
  std::vector<double> eps_list;
  std::string null_tensor = "q0_quasilinear";
  std::string nonnull_tensor = "john_nonnull";
  std::vector<int> ladder{48, 64, 96};
  std::uint64_t seed = 1;
  int lemma_members = 3;

  /// Sets one key from its text value. Throws ConfigError on an unknown key
  /// or unparsable value.
  void set(const std::string& key, const std::string& value);
  /// Resolved `key = value` lines for manifest.txt, one per key.
  std::vector<std::pair<std::string, std::string>> entries() const;
  /// Throws ConfigError on values no scenario accepts.
  void validate() const;
};

/// `key = value` lines; '#' starts a comment, blank lines are skipped.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Solver configuration for one grid of the experiment.
RunConfig make_run_config(const ExperimentConfig& cfg, const NullFormTensor& b, int n, double eps);

void write_manifest(std::ostream& out, const ExperimentConfig& cfg, const std::string& scenario);

/// Least-squares fit of log E_s against log(1 + t) over the report series,
/// whose first row is the warm-up end t_w.
struct GrowthFit {
  double slope = 0.0;
  double residual = 0.0;    ///< rms deviation of log E_s from the fitted line
  double max_ratio = 1.0;   ///< max E_s(t) / E_s(t_w)
  std::size_t samples = 0;
};

/// Throws Error with fewer than 8 samples. An all-zero series fits slope 0, ratio 1.
GrowthFit fit_growth(std::span<const EnergyReport> series);

/// Least-squares slope of log err against log h. Errors must be positive.
double observed_order(std::span<const double> h, std::span<const double> err);

/// Mantissa with one decimal and a bare exponent, "e0" dropped except for zero:
/// 0 -> "0.0e0", 1 -> "1.0", 2.5e-15 -> "2.5e-15".
std::string format_defect(double d);

// --- scenarios ---------------------------------------------------------------

int cmd_check_null(const std::string& tensor, std::ostream& out);

struct SimulateOutcome {
  RunResult result;
  std::optional<GrowthFit> fit;
  int exit_code = 0;
};

/// One run (or one per eps_list entry); energy.csv or energy_eps<k>.csv,
/// summary.txt, manifest.txt.
int cmd_simulate(const ExperimentConfig& cfg, std::ostream& out);
SimulateOutcome simulate_once(const ExperimentConfig& cfg, double eps,
                              const std::filesystem::path& csv);

struct ContrastRun {
  std::string tensor;
  RunResult result;
  std::optional<GrowthFit> fit;
  /// min_denom at every step of the final quarter strictly below its predecessor.
  bool margin_decreasing = false;
};

struct ContrastOutcome {
  ContrastRun null_run;
  ContrastRun nonnull_run;
};

/// Null and non-null runs on identical grid, data and eps; energy_null.csv,
/// energy_nonnull.csv, summary.txt. Run failures are recorded, exit 0.
ContrastOutcome contrast(const ExperimentConfig& cfg);
int cmd_contrast(const ExperimentConfig& cfg, std::ostream& out);

struct ConvergenceLevel {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  double max_error = 0.0;            ///< max over nodes of |u - oracle| at T_final
  double energy_drift = 0.0;         ///< max |E(t) - E(0)| / E(0), unweighted
  double identity_residual = 0.0;    ///< max |dE_1/dt + G| over samples
  double identity_scale = 0.0;       ///< max over samples of max(E_1, G)
  bool boundary_contact = false;
};

struct ConvergenceOutcome {
  std::vector<ConvergenceLevel> levels;
  std::optional<double> error_order;     ///< empty when every error is 0
  std::optional<double> identity_order;  ///< empty unless every level has a nonzero residual
};

/// Linear runs (B = 0, the tensor key is ignored) of radial data on every
/// ladder grid, compared with linear_radial_oracle. Throws ConfigError when
/// the ladder has fewer than 3 distinct grids.
ConvergenceOutcome convergence(const ExperimentConfig& cfg);
int cmd_convergence(const ExperimentConfig& cfg, std::ostream& out);

struct LemmaOutcome {
  std::vector<LemmaFamily> fine;     ///< families at n
  std::vector<LemmaFamily> coarse;   ///< same seed at n / 2
  /// Ratios on a small-eps solution window centred at t = 1.
  std::vector<std::pair<std::string, double>> simulation;
  bool pass = true;
  std::vector<std::string> failures;
};

/// Seeded families at n and n / 2, plus the simulation snapshot checks;
/// lemmas.csv, summary.txt. Verdicts exit 0.
LemmaOutcome lemmas(const ExperimentConfig& cfg);
int cmd_lemmas(const ExperimentConfig& cfg, std::ostream& out);

} // namespace nullwave
