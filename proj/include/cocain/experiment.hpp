#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cocain/diagnostics.hpp"
#include "cocain/image.hpp"
#include "cocain/problems.hpp"
#include "cocain/solvers.hpp"

namespace cocain {

enum class SolverKind { CoCaIn, CoCaInNoBacktracking, CoCaInCfi, BpgWb, BpgFixed, IPiano };

/// cocain | cocain_nobt | cocain_cfi | bpg_wb | bpg_fixed | ipiano.
SolverKind parse_solver(const std::string& name);
const char* solver_name(SolverKind kind);

struct SolverSpec {
  SolverKind kind = SolverKind::CoCaIn;
  SolverConfig config;
  double ipiano_beta = 0.7;
  std::optional<double> fixed_L;  // bpg_fixed; problem.smad_L when unset
};

SolverResult run_solver(const SolverSpec& spec, const CompositeProblem& problem, const Vector& x0);

struct BundleRun {
  std::string name;
  SolverResult result;
  RunSummary summary;
};

/// Runs compared on one instance from one start. `reference` is the smallest
/// Psi attained by any of them, filled in after every run has finished.
struct Bundle {
  std::string problem;
  double reference = 0.0;
  std::vector<BundleRun> runs;

  const BundleRun& at(const std::string& name) const;
};

/// Runs the specs on up to `jobs` threads; results keep the order of `specs`.
Bundle run_bundle(const CompositeProblem& problem, const std::vector<SolverSpec>& specs,
                  const Vector& x0, int jobs = 1);

// Univariate sweep.

SolverConfig sweep_config();

struct SweepRow {
  std::string solver;
  std::vector<double> starts;
  std::vector<double> finals;
  double average = 0.0;
  int global_count = 0;  // finals within 1e-3 of the known global value
};

/// n equidistant starts lo + (hi - lo) i / (n - 1).
std::vector<SweepRow> sweep_univariate(UnivariateKind kind, int n_starts, double lo, double hi,
                                       const std::vector<SolverSpec>& specs);

/// Defaults used for single runs from one start (the x0 = 13 contrast).
SolverConfig single_start_config();

// Spurious stationary points in two variables.

SolverConfig spurious_config();

/// Global minimiser of lambda log(1 + rho (t - b_i)^2) + log(1 + |t|) in each
/// coordinate, by a dense grid followed by bisection on the derivative.
Vector spurious_minimizer(double lambda, double rho, const Vector& b);

struct SpuriousOutcome {
  Vector start;
  SolverResult result;
  double distance_to_b = 0.0;          // |x_final - b|
  double distance_to_minimizer = 0.0;  // |x_final - spurious_minimizer|
};

std::vector<SpuriousOutcome> run_spurious(double lambda, double rho, const Vector& b,
                                          const std::vector<Vector>& starts,
                                          const SolverConfig& config);

std::vector<Vector> default_spurious_starts();

// Phase retrieval.

struct PhaseSetup {
  int d = 10;
  int m = 50;
  std::uint64_t seed = 1;
  double noise = 0.0;
  double lambda = 0.1;
  Regularizer reg = Regularizer::L1;
  double x0_scale = 1.0;
};

SolverConfig phase_config();

/// x0_scale * N(0, 1) per coordinate from mt19937_64(seed + 1).
Vector phase_start(const PhaseSetup& setup);

/// cocain, cocain_cfi, bpg_wb and bpg_fixed with the global smad constant.
std::vector<SolverSpec> phase_solvers(const SolverConfig& config);

// Robust denoising.

struct DenoiseSetup {
  int rows = 32;
  int cols = 32;
  std::optional<std::filesystem::path> image;  // synthetic when unset
  double magnitude = 1e5;
  double fraction = 0.05;
  std::uint64_t seed = 1;
  double background_std = 0.0;
  double lambda = 10.0;
  double rho = 1.0;
  DataTerm data_term = DataTerm::LogRobust;
};

SolverConfig denoise_config();

/// cocain, bpg_wb and bpg_fixed with L = 16 lambda rho.
std::vector<SolverSpec> denoise_solvers(const SolverConfig& config);

struct DenoiseOutcome {
  ImageGrid clean;
  ImageGrid noisy;
  Bundle bundle;
};

/// Starts from the corrupted image clipped to [0, 1].
DenoiseOutcome run_denoise(const DenoiseSetup& setup, const std::vector<SolverSpec>& specs,
                           int jobs = 1);

}  // namespace cocain
