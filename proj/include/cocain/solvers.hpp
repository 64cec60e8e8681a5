#pragma once

#include <functional>
#include <optional>
#include <string>

#include "cocain/problems.hpp"
#include "cocain/trace.hpp"

namespace cocain {

/// Seed for the minorant ladder at iteration k.
struct LowerSeed {
  enum class Policy {
    Constant,         // value
    PreviousIterate,  // decay * L_lower_{k-1}; value seeds iteration 1
    FractionOfUpper,  // value * L_bar_{k-1}
  };
  Policy policy = Policy::PreviousIterate;
  double value = 0.0;
  double decay = 0.5;
};

struct SolverConfig {
  double delta = 0.99;
  double epsilon = 0.0099;
  double nu_lower = 2.0;
  double nu_upper = 2.0;
  double L_bar_init = 1.0;
  LowerSeed lower_seed;
  double lower_floor = 1e-10;
  double gamma_cap = 1.0;
  int max_backtracks = 60;
  int max_iters = 1000;
  double stop_tol = 1e-9;  // on |x^{k+1} - x^k|_inf; 0 disables
  /// From this iteration on the majorant is pinned to max(L_bar, smad_L), so
  /// tau stays constant for the rest of the run.
  std::optional<int> freeze_after;
  bool store_iterates = true;
  std::function<void(const TraceRecord&)> on_iteration;
};

/// Throws std::invalid_argument if the config breaks 1 > delta > epsilon > 0,
/// nu > 1, gamma_cap in [0,1], or L_bar_init <= -alpha / ((1 - delta) sigma).
void validate(const SolverConfig& config, const CompositeProblem& problem);

/// Slack 1e-12 max(1, |g_ref|) on the minorant and majorant tests.
double acceptance_slack(double g_ref);

/// Inputs of iteration k: x^k, x^{k-1} and the previous parameters.
struct IterateState {
  Vector x_curr;
  Vector x_prev;
  double tau = 1.0;      // tau_{k-1}
  double L_bar = 1.0;    // L_bar_{k-1}
  double L_lower = 0.0;  // L_lower_{k-1}
  int k = 1;
};

/// Largest tried gamma in [0, gamma_cap] with
///   (delta - eps) D_h(x_prev, x_curr) >= (1 + L_lower tau_prev) D_h(x_curr, y).
/// Closed form sqrt((delta - eps) / (1 + L_lower tau_prev)) for the Euclidean
/// kernel; otherwise that value halved until the inequality holds (0 always does).
double find_gamma(const IterateState& state, double L_lower, const SolverConfig& config,
                  const Kernel& kernel);

struct LowerStep {
  double L_lower = 0.0;
  double gamma = 0.0;
  Vector y;
  int trials = 0;
  double g_y = 0.0;
  Vector grad_g_y;
};

/// Minorant ladder: smallest L in {nu^i L_0} for which g at x^k stays above
/// the linearisation at y^k minus L D_h(x^k, y^k), with gamma re-derived for
/// each trial. When the ladder is exhausted gamma falls back to 0.
LowerStep lower_backtrack(const IterateState& state, const SolverConfig& config,
                          const CompositeProblem& problem);

struct UpperStep {
  bool ok = true;
  double L_bar = 0.0;
  double tau = 0.0;
  Vector x_next;
  int trials = 0;
  double g_next = 0.0;
};

/// Majorant ladder from L_bar_{k-1}: smallest L in {nu^i L_bar_{k-1}} such
/// that the prox step with tau = min(tau_{k-1}, 1/L) satisfies
///   g(x+) <= g(y) + <grad g(y), x+ - y> + L D_h(x+, y).
UpperStep upper_backtrack(const IterateState& state, const Vector& y, const SolverConfig& config,
                          const CompositeProblem& problem);

SolverResult cocain_bpg(const CompositeProblem& problem, const SolverConfig& config,
                        const Vector& x0);

/// Global constant L = max(-alpha/((1-delta) sigma), smad_L), tau = 1/L, and
/// gamma from (delta - eps) D_h(x^{k-1}, x^k) >= 2 D_h(x^k, y^k).
SolverResult cocain_bpg_no_backtracking(const CompositeProblem& problem,
                                        const SolverConfig& config, const Vector& x0);

/// Closed-form inertia for the quartic kernel:
///   gamma^2 = (delta - eps) D_h(x^{k-1}, x^k)
///             / ((1 + L_lower tau_{k-1}) |dx|^2 (3/2 |x^k|^2 + 7/4)).
SolverResult cocain_bpg_cfi(const CompositeProblem& problem, const SolverConfig& config,
                            const Vector& x0);

/// Plain Bregman proximal gradient with fixed tau = 1/L.
SolverResult bpg_fixed(const CompositeProblem& problem, double L, const Vector& x0,
                       const SolverConfig& config = {});

/// Bregman proximal gradient with majorant backtracking (gamma = 0).
SolverResult bpg_wb(const CompositeProblem& problem, const SolverConfig& config,
                    const Vector& x0);

/// Fixed inertia beta with majorant backtracking only; Euclidean kernel.
SolverResult ipiano(const CompositeProblem& problem, double beta, const SolverConfig& config,
                    const Vector& x0);

}  // namespace cocain
