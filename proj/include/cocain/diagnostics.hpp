#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cocain/problems.hpp"
#include "cocain/solvers.hpp"
#include "cocain/trace.hpp"

namespace cocain {

struct LyapunovParams {
  double delta = 0.99;
  double epsilon = 0.0099;
  double v_lower = 0.0;     // stands in for the optimal value
  double tau_frozen = 1.0;  // tau of the frozen phase
  double delta1() const { return delta / tau_frozen; }
};

/// delta, epsilon from the config; v_lower from the problem; tau_frozen from
/// the trace row at the phase switch.
LyapunovParams lyapunov_params(const SolverConfig& config, const CompositeProblem& problem,
                               const SolverResult& result);

/// Outcome of one certificate over a trace. `worst` is the largest value of
/// lhs - rhs over the checked rows (violation when > slack); rows are named by k.
struct CheckReport {
  std::string name;
  bool passed = true;
  int n_checked = 0;
  int first_violation = -1;
  double worst = 0.0;
  bool proxy = false;
  std::vector<std::pair<std::string, std::string>> extra;

  void add(const std::string& key, double value);
  void add(const std::string& key, const std::string& value);
  /// "key = value" lines, one block per report.
  std::string to_text() const;
};

/// tau_{k-1} (Psi(x^k) - v) + delta D_h(x^{k-1}, x^k) from the recorded row.
double lyapunov_phi(const TraceRecord& record, const LyapunovParams& params);

struct LyapunovReport {
  CheckReport descent;  // Phi^k >= Phi^{k+1} + eps D_h(x^{k-1}, x^k)
  CheckReport prefix;   // min_{k<=n} D_h(x^{k-1}, x^k) <= Phi^1 / (eps n)
  double phi1 = 0.0;
};

/// Recomputes Psi and the distances from the stored iterates (cross-checked
/// against the trace at 1e-10) and verifies the descent with slack
/// 1e-9 max(1, |Phi^k|). The prefix bound is checked for every n, together
/// with the sharper form over k >= 2, where x^0 = x^1 does not make it vacuous.
LyapunovReport check_lyapunov_descent(const SolverResult& result, const CompositeProblem& problem,
                                      const LyapunovParams& params);

/// Psi(x) + delta1 D_h(y, x) in the frozen phase (k >= K), Phi^k before it.
double psi_delta1(const SolverResult& result, const CompositeProblem& problem,
                  const LyapunovParams& params, int k, int K);

/// Largest rho1 with rho1 |x^k - x^{k-1}|^2 <= Psi_d1(k) - Psi_d1(k+1) over
/// k >= K; also checks the implied floor eps sigma / (2 tau_frozen).
CheckReport check_sufficient_decrease_C1(const SolverResult& result,
                                         const CompositeProblem& problem,
                                         const LyapunovParams& params, int K);

struct SubgradientWitness {
  Vector w1;
  Vector w2;
  double norm = 0.0;
};

SubgradientWitness subgradient_witness_C2(const Vector& x_next, const Vector& x_curr,
                                          const Vector& y, const CompositeProblem& problem,
                                          double tau, const LyapunovParams& params);

/// Empirical rho2 = max |w| / (|x^k - x^{k-1}| + |x^{k+1} - x^k|) over k >= K.
CheckReport check_relative_error_C2(const SolverResult& result, const CompositeProblem& problem,
                                    const LyapunovParams& params, int K);

/// Psi(x^k) - Psi(x^{k+1}) >= D_h(x^k, x^{k+1}) / tau_k + alpha/2 |x^{k+1} - x^k|^2
///                            - (1/tau_k + L_lower_k) D_h(x^k, y^k), slack 1e-9 max(1, |Psi|).
CheckReport check_function_descent(const SolverResult& result, const CompositeProblem& problem);

/// Rechecks the inertia condition, the minorant and majorant tests, tau_k = min(tau_{k-1}, 1/L_bar_k), monotone L_bar
/// and 0 <= gamma <= gamma_cap from the iterates.
CheckReport check_step_conditions(const SolverResult& result, const CompositeProblem& problem,
                                  const SolverConfig& config);

/// D_h(x^k, y^k) <= gamma_k^2 |dx|^2 (3/2 |x^k|^2 + 7/4) + 1e-10 on every row.
CheckReport check_cfi_bound(const SolverResult& result, const CompositeProblem& problem);

/// Observable stand-in for the continuity condition: when the last `window`
/// steps are below step_tol, Psi over that window spans at most
/// step_tol max(1, |Psi|).
CheckReport check_continuity_proxy(const SolverResult& result, int window = 50,
                                   double step_tol = 1e-6);

/// First row index k where L_bar stays unchanged for `run` consecutive rows;
/// the last row when that never happens.
int frozen_phase_start(const SolverResult& result, int run = 25);

struct RunSummary {
  std::string solver;
  double final_psi = 0.0;
  double best_psi = 0.0;
  int iterations = 0;
  long total_backtracks = 0;
  double final_suboptimality = 0.0;
  std::vector<double> suboptimality;  // per row, clamped at 0
  std::string termination;
};

/// Suboptimality against `reference` (typically the bundle minimum).
RunSummary summarize(const SolverResult& result, double reference);

/// Minimum Psi over every row of every run.
double bundle_reference(const std::vector<const SolverResult*>& runs);

/// Negative-control fixtures. Both replace iteration j (row k = j) of a
/// recorded run and recompute x^{j+1} from the corrupted parameters; the run
/// ends there with its terminal row.
SolverResult corrupt_inflate_gamma(const SolverResult& result, const CompositeProblem& problem,
                                   int j, double gamma);
SolverResult corrupt_scale_tau(const SolverResult& result, const CompositeProblem& problem, int j,
                               double factor);

}  // namespace cocain
