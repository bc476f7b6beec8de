#include "nullwave/errors.hpp"
#include "nullwave/harness.hpp"
#include "nullwave/parallel.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Globals {
  std::string config;
  std::optional<std::string> output_dir;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
};

nullwave::ExperimentConfig resolve(const Globals& g) {
  nullwave::ExperimentConfig cfg =
      g.config.empty() ? nullwave::ExperimentConfig{} : nullwave::load_config(g.config);
  if (g.output_dir) cfg.output_dir = *g.output_dir;
  if (g.threads) cfg.threads = *g.threads;
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  nullwave::parallel::set_threads(cfg.threads);
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-difference laboratory for quasilinear wave equations with null forms"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "key = value experiment file")->check(CLI::ExistingFile);
  app.add_option("--output-dir", g.output_dir, "directory for CSV, summary and manifest");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "seed for randomized lemma families");

  std::string tensor = "q0_quasilinear";
  auto* check = app.add_subcommand("check-null", "null-condition verdict for a tensor");
  check->add_option("tensor", tensor, "canonical name or tensor literal file");
  auto* simulate = app.add_subcommand("simulate", "one evolution with energy diagnostics");
  auto* contrast = app.add_subcommand("contrast", "null vs non-null tensor at equal data");
  auto* convergence = app.add_subcommand("convergence", "linear oracle convergence ladder");
  auto* lemmas = app.add_subcommand("lemmas", "empirical inequality constants");
  for (auto* sub : {check, simulate, contrast, convergence, lemmas}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*check) {
      if (g.threads) nullwave::parallel::set_threads(*g.threads);
      return nullwave::cmd_check_null(tensor, std::cout);
    }
    const nullwave::ExperimentConfig cfg = resolve(g);
    if (*simulate) return nullwave::cmd_simulate(cfg, std::cout);
    if (*contrast) return nullwave::cmd_contrast(cfg, std::cout);
    if (*convergence) return nullwave::cmd_convergence(cfg, std::cout);
    if (*lemmas) return nullwave::cmd_lemmas(cfg, std::cout);
  } catch (const nullwave::HyperbolicityLoss& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nullwave::BlowupError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
