#include "cocain/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace cocain {

bool TraceRecord::same_numbers(const TraceRecord& o) const {
  return k == o.k && psi == o.psi && tau == o.tau && tau_prev == o.tau_prev &&
         gamma == o.gamma && L_bar == o.L_bar && L_lower == o.L_lower &&
         dh_prev_curr == o.dh_prev_curr && dh_curr_y == o.dh_curr_y &&
         step_norm == o.step_norm && lower_trials == o.lower_trials &&
         upper_trials == o.upper_trials;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::MaxIters: return "max_iters";
    case Termination::StepTol: return "step_tol";
    case Termination::BacktrackFailure: return "backtrack_failure";
    case Termination::NonFinite: return "non_finite";
  }
  return "unknown";
}

namespace {

void check_common(const SolverConfig& c) {
  if (!(c.delta < 1.0 && c.delta > c.epsilon && c.epsilon > 0.0)) {
    throw std::invalid_argument("solver config: need 1 > delta > epsilon > 0");
  }
  if (!(c.nu_lower > 1.0) || !(c.nu_upper > 1.0)) {
    throw std::invalid_argument("solver config: scale factors must exceed 1");
  }
  if (!(c.gamma_cap >= 0.0 && c.gamma_cap <= 1.0)) {
    throw std::invalid_argument("solver config: gamma_cap must lie in [0, 1]");
  }
  if (c.max_backtracks < 0 || c.max_iters < 1 || !(c.stop_tol >= 0.0)) {
    throw std::invalid_argument("solver config: bad iteration limits");
  }
  if (!(c.lower_floor > 0.0)) {
    throw std::invalid_argument("solver config: lower_floor must be > 0");
  }
}

double semiconvexity_bound(const SolverConfig& c, const CompositeProblem& p) {
  return -p.alpha / ((1.0 - c.delta) * p.kernel.sigma());
}

}  // namespace

// Near a fixed point both sides of the minorant and majorant tests agree to the last few bits
// and no finite L separates them, so both tests carry this slack.
double acceptance_slack(double g_ref) { return 1e-12 * std::max(1.0, std::abs(g_ref)); }

namespace {

double seed_lower(const IterateState& s, const SolverConfig& c) {
  double seed = 0.0;
  switch (c.lower_seed.policy) {
    case LowerSeed::Policy::Constant: seed = c.lower_seed.value; break;
    case LowerSeed::Policy::PreviousIterate:
      seed = s.k == 1 ? c.lower_seed.value : c.lower_seed.decay * s.L_lower;
      break;
    case LowerSeed::Policy::FractionOfUpper: seed = c.lower_seed.value * s.L_bar; break;
  }
  return std::max(c.lower_floor, seed);
}

bool inertia_ok(const IterateState& s, double L_lower, double gamma, const SolverConfig& c,
                const Kernel& kernel, double dh_prev) {
  const Vector y = s.x_curr + gamma * (s.x_curr - s.x_prev);
  return (c.delta - c.epsilon) * dh_prev >= (1.0 + L_lower * s.tau) * kernel.distance(s.x_curr, y);
}

double halve_until_inertia_ok(const IterateState& s, double L_lower, double gamma, const SolverConfig& c,
                     const Kernel& kernel, double dh_prev) {
  for (int i = 0; i <= c.max_backtracks; ++i) {
    if (inertia_ok(s, L_lower, gamma, c, kernel, dh_prev)) return gamma;
    gamma *= 0.5;
  }
  return 0.0;
}

enum class GammaMode { Backtracked, ClosedFormCFI, Fixed, Zero, NoBacktrack };

struct Variant {
  Variant(std::string n, GammaMode g) : name(std::move(n)), gamma(g) {}
  std::string name;
  GammaMode gamma = GammaMode::Backtracked;
  double beta = 0.0;
  std::optional<double> fixed_L;  // skips the majorant ladder and its test
  bool grad_at_x = false;         // iPiano: gradient at x^k, prox around y^k
};

double cfi_gamma(const IterateState& s, double L_lower, const SolverConfig& c,
                 const Kernel& kernel, double dh_prev) {
  const Vector dx = s.x_curr - s.x_prev;
  const double dd = dx.squaredNorm();
  if (dd == 0.0) return 0.0;
  const double denom =
      (1.0 + L_lower * s.tau) * dd * (1.5 * s.x_curr.squaredNorm() + 1.75);
  const double gamma = std::min(c.gamma_cap, std::sqrt((c.delta - c.epsilon) * dh_prev / denom));
  // The closed form rests on a second-order bound; for long steps it can
  // overshoot, so the inertia condition is still confirmed.
  return halve_until_inertia_ok(s, L_lower, gamma, c, kernel, dh_prev);
}

LowerStep lower_ladder(const IterateState& s, const SolverConfig& c, const CompositeProblem& p,
                       bool closed_form) {
  const double dh_prev = p.kernel.distance(s.x_prev, s.x_curr);
  const double g_x = p.g_value(s.x_curr);
  const double seed = seed_lower(s, c);
  LowerStep out;
  double L = seed;
  for (int trial = 0; trial <= c.max_backtracks; ++trial) {
    const double gamma = closed_form ? cfi_gamma(s, L, c, p.kernel, dh_prev)
                                     : find_gamma(s, L, c, p.kernel);
    Vector y = s.x_curr + gamma * (s.x_curr - s.x_prev);
    const double g_y = p.g_value(y);
    Vector grad = p.g_grad(y);
    if (std::isfinite(g_y) && grad.allFinite() &&
        g_x + acceptance_slack(g_x) >=
            g_y + grad.dot(s.x_curr - y) - L * p.kernel.distance(s.x_curr, y)) {
      out.L_lower = L;
      out.gamma = gamma;
      out.y = std::move(y);
      out.trials = trial;
      out.g_y = g_y;
      out.grad_g_y = std::move(grad);
      return out;
    }
    L *= c.nu_lower;
  }
  // Ladder exhausted (in practice only when rounding noise dominates the
  // minorant test): gamma = 0 passes the inertia condition and the minorant test for any L.
  out.L_lower = seed;
  out.gamma = 0.0;
  out.y = s.x_curr;
  out.trials = c.max_backtracks;
  out.g_y = g_x;
  out.grad_g_y = p.g_grad(s.x_curr);
  return out;
}

UpperStep upper_ladder(const IterateState& s, const Vector& y, const Vector& grad_at,
                       const Vector& center, double g_center, const SolverConfig& c,
                       const CompositeProblem& p, double L_start) {
  const Vector grad_h_y = p.kernel.grad(y);
  UpperStep out;
  double L = L_start;
  for (int trial = 0; trial <= c.max_backtracks; ++trial) {
    const double tau = std::min(s.tau, 1.0 / L);
    Vector x_next = p.f_prox_step(grad_h_y, grad_at, tau);
    if (x_next.allFinite()) {
      const double g_next = p.g_value(x_next);
      const double rhs = g_center + grad_at.dot(x_next - center) +
                         L * p.kernel.distance(x_next, center);
      if (std::isfinite(g_next) && g_next <= rhs + acceptance_slack(g_center)) {
        out.L_bar = L;
        out.tau = tau;
        out.x_next = std::move(x_next);
        out.trials = trial;
        out.g_next = g_next;
        return out;
      }
    }
    L *= c.nu_upper;
  }
  out.ok = false;
  out.L_bar = L / c.nu_upper;
  out.trials = c.max_backtracks;
  return out;
}

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

SolverResult run(const CompositeProblem& p, const SolverConfig& c, const Vector& x0,
                 const Variant& v) {
  if (x0.size() != p.dim) {
    throw std::invalid_argument("solver: x0 has dimension " + std::to_string(x0.size()) +
                                ", problem expects " + std::to_string(p.dim));
  }
  require_finite(x0, "solver x0");

  SolverResult res;
  res.solver = v.name;
  IterateState s;
  s.x_curr = x0;
  s.x_prev = x0;
  const double L0 = v.fixed_L ? *v.fixed_L : c.L_bar_init;
  s.L_bar = L0;
  s.tau = 1.0 / L0;
  s.L_lower = 0.0;
  if (c.store_iterates) {
    res.iterates.push_back(x0);
    res.iterates.push_back(x0);
  }

  auto emit = [&](const TraceRecord& r) {
    res.trace.push_back(r);
    if (c.on_iteration) c.on_iteration(r);
  };

  double psi = p.psi(s.x_curr);
  if (!std::isfinite(psi)) {
    res.termination = Termination::NonFinite;
    res.message = "objective is not finite at x0";
    res.final_point = x0;
    return res;
  }

  for (int k = 1; k <= c.max_iters; ++k) {
    s.k = k;
    const auto t0 = std::chrono::steady_clock::now();
    TraceRecord r;
    r.k = k;
    r.psi = psi;
    r.tau_prev = s.tau;
    r.dh_prev_curr = p.kernel.distance(s.x_prev, s.x_curr);
    r.step_norm = (s.x_curr - s.x_prev).norm();

    // Extrapolation: gamma_k, L_lower_k and y^k.
    LowerStep low;
    switch (v.gamma) {
      case GammaMode::Backtracked:
      case GammaMode::ClosedFormCFI:
        low = lower_ladder(s, c, p, v.gamma == GammaMode::ClosedFormCFI);
        break;
      case GammaMode::NoBacktrack:
        low.L_lower = *v.fixed_L;
        low.gamma = find_gamma(s, *v.fixed_L, c, p.kernel);
        break;
      case GammaMode::Fixed: low.gamma = v.beta; break;
      case GammaMode::Zero: low.gamma = 0.0; break;
    }
    if (v.gamma != GammaMode::Backtracked && v.gamma != GammaMode::ClosedFormCFI) {
      low.y = s.x_curr + low.gamma * (s.x_curr - s.x_prev);
      if (!v.grad_at_x) low.grad_g_y = p.g_grad(low.y);
      low.g_y = v.grad_at_x ? 0.0 : p.g_value(low.y);
    }

    // Prox step: L_bar_k, tau_k and x^{k+1}.
    UpperStep up;
    if (v.fixed_L) {
      up.L_bar = *v.fixed_L;
      up.tau = 1.0 / *v.fixed_L;
      if (low.grad_g_y.allFinite()) {
        up.x_next = p.f_prox_step(p.kernel.grad(low.y), low.grad_g_y, up.tau);
      } else {
        up.x_next = low.y;
        up.x_next.setConstant(std::numeric_limits<double>::quiet_NaN());
      }
    } else {
      double L_start = s.L_bar;
      if (c.freeze_after && k >= *c.freeze_after) L_start = std::max(L_start, p.smad_L);
      if (v.grad_at_x) {
        const Vector grad_x = p.g_grad(s.x_curr);
        up = upper_ladder(s, low.y, grad_x, s.x_curr, p.g_value(s.x_curr), c, p, L_start);
      } else if (!low.grad_g_y.allFinite() || !std::isfinite(low.g_y)) {
        up.ok = false;
      } else {
        up = upper_ladder(s, low.y, low.grad_g_y, low.y, low.g_y, c, p, L_start);
      }
    }

    r.tau = up.ok ? up.tau : s.tau;
    r.gamma = low.gamma;
    r.L_bar = up.ok ? up.L_bar : s.L_bar;
    r.L_lower = low.L_lower;
    r.dh_curr_y = p.kernel.distance(s.x_curr, low.y);
    r.lower_trials = low.trials;
    r.upper_trials = up.trials;

    if (!up.ok) {
      r.wall_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                           std::chrono::steady_clock::now() - t0).count();
      emit(r);
      if (c.store_iterates) res.extrapolated.push_back(low.y);
      res.termination = Termination::BacktrackFailure;
      res.message = "majorant ladder exhausted at k=" + std::to_string(k);
      res.final_point = s.x_curr;
      return res;
    }

    const double psi_next = up.x_next.allFinite() ? p.psi(up.x_next)
                                                   : std::numeric_limits<double>::quiet_NaN();
    r.wall_time_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                         std::chrono::steady_clock::now() - t0).count();
    emit(r);
    if (c.store_iterates) res.extrapolated.push_back(low.y);
    if (!std::isfinite(psi_next)) {
      res.termination = Termination::NonFinite;
      res.message = "objective is not finite at iteration " + std::to_string(k + 1);
      res.final_point = s.x_curr;
      return res;
    }

    const double move = inf_norm(up.x_next - s.x_curr);
    s.x_prev = std::move(s.x_curr);
    s.x_curr = std::move(up.x_next);
    s.tau = up.tau;
    s.L_bar = up.L_bar;
    s.L_lower = low.L_lower;
    psi = psi_next;
    if (c.store_iterates) res.iterates.push_back(s.x_curr);
    if (c.stop_tol > 0.0 && move < c.stop_tol) {
      res.termination = Termination::StepTol;
      break;
    }
  }

  // Terminal row: x^{N+1} with no extrapolation.
  TraceRecord last;
  last.k = static_cast<int>(res.trace.size()) + 1;
  last.psi = psi;
  last.tau = s.tau;
  last.tau_prev = s.tau;
  last.L_bar = s.L_bar;
  last.dh_prev_curr = p.kernel.distance(s.x_prev, s.x_curr);
  last.step_norm = (s.x_curr - s.x_prev).norm();
  emit(last);
  if (c.store_iterates) res.extrapolated.push_back(s.x_curr);
  res.final_point = s.x_curr;
  return res;
}

}  // namespace

void validate(const SolverConfig& config, const CompositeProblem& problem) {
  check_common(config);
  const double bound = semiconvexity_bound(config, problem);
  if (!(config.L_bar_init > 0.0) || !(config.L_bar_init > bound)) {
    throw std::invalid_argument("solver config: L_bar_init = " +
                                std::to_string(config.L_bar_init) + " must exceed " +
                                std::to_string(std::max(bound, 0.0)) + " for " + problem.name);
  }
}

double find_gamma(const IterateState& state, double L_lower, const SolverConfig& config,
                  const Kernel& kernel) {
  const double kappa = (config.delta - config.epsilon) / (1.0 + L_lower * state.tau);
  double gamma = std::min(config.gamma_cap, std::sqrt(kappa));
  const double dh_prev = kernel.distance(state.x_prev, state.x_curr);
  if (dh_prev == 0.0) return gamma;
  if (kernel.kind() == KernelKind::Euclidean) {
    // Equality case of the inertia condition; shave an ulp or two if rounding tips it over.
    for (double shrink : {1.0, 1.0 - 1e-14, 1.0 - 1e-12}) {
      if (inertia_ok(state, L_lower, gamma * shrink, config, kernel, dh_prev)) {
        return gamma * shrink;
      }
    }
  }
  return halve_until_inertia_ok(state, L_lower, gamma, config, kernel, dh_prev);
}

LowerStep lower_backtrack(const IterateState& state, const SolverConfig& config,
                          const CompositeProblem& problem) {
  return lower_ladder(state, config, problem, false);
}

UpperStep upper_backtrack(const IterateState& state, const Vector& y, const SolverConfig& config,
                          const CompositeProblem& problem) {
  return upper_ladder(state, y, problem.g_grad(y), y, problem.g_value(y), config, problem,
                      state.L_bar);
}

SolverResult cocain_bpg(const CompositeProblem& problem, const SolverConfig& config,
                        const Vector& x0) {
  validate(config, problem);
  Variant v{"cocain", GammaMode::Backtracked};
  // With no room for inertia y^k = x^k, the minorant test is vacuous and the
  // method is exactly BPG with backtracking.
  if (config.gamma_cap == 0.0) v.gamma = GammaMode::Zero;
  return run(problem, config, x0, v);
}

SolverResult cocain_bpg_no_backtracking(const CompositeProblem& problem,
                                        const SolverConfig& config, const Vector& x0) {
  check_common(config);
  const double L = std::max(semiconvexity_bound(config, problem), problem.smad_L);
  if (!(L > 0.0)) throw std::invalid_argument("no-backtracking: smad constant must be > 0");
  Variant v{"cocain_nobt", GammaMode::NoBacktrack};
  v.fixed_L = L;
  return run(problem, config, x0, v);
}

SolverResult cocain_bpg_cfi(const CompositeProblem& problem, const SolverConfig& config,
                            const Vector& x0) {
  if (problem.kernel.kind() != KernelKind::QuarticPlusQuadratic) {
    throw std::invalid_argument("cfi: needs the quartic kernel, got " +
                                std::string(problem.kernel.name()));
  }
  validate(config, problem);
  return run(problem, config, x0, Variant{"cocain_cfi", GammaMode::ClosedFormCFI});
}

SolverResult bpg_fixed(const CompositeProblem& problem, double L, const Vector& x0,
                       const SolverConfig& config) {
  check_common(config);
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("bpg_fixed: need L > 0");
  Variant v{"bpg_fixed", GammaMode::Zero};
  v.fixed_L = L;
  return run(problem, config, x0, v);
}

SolverResult bpg_wb(const CompositeProblem& problem, const SolverConfig& config,
                    const Vector& x0) {
  validate(config, problem);
  return run(problem, config, x0, Variant{"bpg_wb", GammaMode::Zero});
}

SolverResult ipiano(const CompositeProblem& problem, double beta, const SolverConfig& config,
                    const Vector& x0) {
  if (problem.kernel.kind() != KernelKind::Euclidean) {
    throw std::invalid_argument("ipiano: needs the Euclidean kernel");
  }
  if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("ipiano: need 0 <= beta < 1");
  validate(config, problem);
  Variant v{"ipiano", GammaMode::Fixed};
  v.beta = beta;
  // beta = 0 is the backtracked BPG iteration, same code path.
  if (beta == 0.0) {
    v.gamma = GammaMode::Zero;
  } else {
    v.grad_at_x = true;
  }
  return run(problem, config, x0, v);
}

}  // namespace cocain
