#include "cocain/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cocain {

namespace {

constexpr double kCrossCheckTol = 1e-10;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_iterates(const SolverResult& r, const char* what) {
  if (r.iterates.size() != r.trace.size() + 1 || r.extrapolated.size() != r.trace.size()) {
    throw std::invalid_argument(std::string(what) + ": needs a run with stored iterates");
  }
}

void fail_at(CheckReport& rep, int k) {
  if (rep.passed) rep.first_violation = k;
  rep.passed = false;
}

// Recomputed row quantities, compared against what the solver recorded.
struct Row {
  double psi;
  double dh_prev_curr;
  double dh_curr_y;
};

Row recompute(const SolverResult& r, const CompositeProblem& p, std::size_t i,
              CheckReport& rep) {
  const Vector& x = r.iterates[i + 1];
  Row row{p.psi(x), p.kernel.distance(r.iterates[i], x), p.kernel.distance(x, r.extrapolated[i])};
  const TraceRecord& t = r.trace[i];
  auto off = [](double a, double b) { return std::abs(a - b) > kCrossCheckTol * std::max(1.0, std::abs(a)); };
  if (off(row.psi, t.psi) || off(row.dh_prev_curr, t.dh_prev_curr) ||
      off(row.dh_curr_y, t.dh_curr_y)) {
    rep.add("cross_check_mismatch_k", static_cast<double>(t.k));
    fail_at(rep, t.k);
  }
  return row;
}

}  // namespace

void CheckReport::add(const std::string& key, double value) { extra.emplace_back(key, fmt(value)); }

void CheckReport::add(const std::string& key, const std::string& value) {
  extra.emplace_back(key, value);
}

std::string CheckReport::to_text() const {
  std::ostringstream out;
  out << "[" << name << "]\n";
  out << "status = " << (passed ? "pass" : "fail") << (proxy ? " (proxy)" : "") << '\n';
  out << "n_checked = " << n_checked << '\n';
  out << "first_violation = " << first_violation << '\n';
  out << "worst = " << fmt(worst) << '\n';
  for (const auto& [k, v] : extra) out << k << " = " << v << '\n';
  return out.str();
}

LyapunovParams lyapunov_params(const SolverConfig& config, const CompositeProblem& problem,
                               const SolverResult& result) {
  LyapunovParams lp;
  lp.delta = config.delta;
  lp.epsilon = config.epsilon;
  lp.v_lower = problem.psi_lower_bound;
  if (!result.trace.empty()) {
    const int K = frozen_phase_start(result);
    lp.tau_frozen = result.trace.at(static_cast<std::size_t>(K - 1)).tau;
  }
  return lp;
}

double lyapunov_phi(const TraceRecord& record, const LyapunovParams& params) {
  return record.tau_prev * (record.psi - params.v_lower) + params.delta * record.dh_prev_curr;
}

LyapunovReport check_lyapunov_descent(const SolverResult& result, const CompositeProblem& problem,
                                      const LyapunovParams& params) {
  require_iterates(result, "lyapunov descent");
  LyapunovReport out;
  out.descent.name = "lyapunov_descent";
  out.prefix.name = "prefix_min_gap";
  out.descent.worst = -std::numeric_limits<double>::infinity();
  out.prefix.worst = -std::numeric_limits<double>::infinity();

  const std::size_t n = result.trace.size();
  std::vector<double> phi(n);
  std::vector<double> gap(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Row row = recompute(result, problem, i, out.descent);
    phi[i] = result.trace[i].tau_prev * (row.psi - params.v_lower) + params.delta * row.dh_prev_curr;
    gap[i] = row.dh_prev_curr;
  }
  if (n == 0) return out;
  out.phi1 = phi[0];

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double lhs = phi[i + 1] + params.epsilon * gap[i];
    const double margin = lhs - phi[i];
    out.descent.worst = std::max(out.descent.worst, margin);
    ++out.descent.n_checked;
    if (margin > 1e-9 * std::max(1.0, std::abs(phi[i]))) fail_at(out.descent, result.trace[i].k);
  }
  out.descent.add("phi_1", out.phi1);
  out.descent.add("phi_final", phi.back());

  double running_min = std::numeric_limits<double>::infinity();
  double sharp_min = std::numeric_limits<double>::infinity();
  bool sharp_ok = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double count = static_cast<double>(i + 1);
    running_min = std::min(running_min, gap[i]);
    const double bound = out.phi1 / (params.epsilon * count) + 1e-12;
    out.prefix.worst = std::max(out.prefix.worst, running_min - bound);
    ++out.prefix.n_checked;
    if (running_min > bound) fail_at(out.prefix, result.trace[i].k);
    if (i >= 1) {
      sharp_min = std::min(sharp_min, gap[i]);
      if (sharp_min > out.phi1 / (params.epsilon * (count - 1.0)) + 1e-12) sharp_ok = false;
    }
  }
  out.prefix.add("sharp_form_from_k2", sharp_ok ? "pass" : "fail");
  if (!sharp_ok) out.prefix.passed = false;
  return out;
}

double psi_delta1(const SolverResult& result, const CompositeProblem& problem,
                  const LyapunovParams& params, int k, int K) {
  require_iterates(result, "psi_delta1");
  const auto i = static_cast<std::size_t>(k);
  const Vector& x = result.iterates.at(i);
  const Vector& x_prev = result.iterates.at(i - 1);
  if (k < K) {
    const double tau_prev = result.trace.at(i - 1).tau_prev;
    return tau_prev * (problem.psi(x) - params.v_lower) +
           params.delta * problem.kernel.distance(x_prev, x);
  }
  return problem.psi(x) + params.delta1() * problem.kernel.distance(x_prev, x);
}

CheckReport check_sufficient_decrease_C1(const SolverResult& result,
                                         const CompositeProblem& problem,
                                         const LyapunovParams& params, int K) {
  require_iterates(result, "C1");
  CheckReport rep;
  rep.name = "sufficient_decrease_C1";
  const int last = static_cast<int>(result.trace.size());
  const double floor = params.epsilon * problem.kernel.sigma() / (2.0 * params.tau_frozen);
  double rho1 = std::numeric_limits<double>::infinity();
  rep.worst = -std::numeric_limits<double>::infinity();
  for (int k = std::max(K, 1); k < last; ++k) {
    const double now = psi_delta1(result, problem, params, k, K);
    const double next = psi_delta1(result, problem, params, k + 1, K);
    const double dec = now - next;
    const double step2 = (result.iterate(k) - result.iterate(k - 1)).squaredNorm();
    ++rep.n_checked;
    const double margin = floor * step2 - dec;
    rep.worst = std::max(rep.worst, margin);
    if (margin > 1e-9 * std::max(1.0, std::abs(now))) fail_at(rep, k);
    if (step2 > 1e-12) rho1 = std::min(rho1, dec / step2);
  }
  rep.add("K", static_cast<double>(K));
  rep.add("tau_frozen", params.tau_frozen);
  rep.add("rho1_floor", floor);
  rep.add("rho1_empirical", rho1);
  if (K >= 1 && K <= last) {
    // At the switch index both Lyapunov forms describe the same pair, related
    // by Phi^K = tau (Psi_d1 - v) once tau is frozen.
    const double phi_k = lyapunov_phi(result.trace.at(static_cast<std::size_t>(K - 1)), params);
    const double pd1 = psi_delta1(result, problem, params, K, K);
    const double tau_prev = result.trace.at(static_cast<std::size_t>(K - 1)).tau_prev;
    const double back = tau_prev * (pd1 - params.v_lower);
    rep.add("switch_gap", phi_k - back);
    if (tau_prev == params.tau_frozen &&
        std::abs(phi_k - back) > 1e-12 * std::max(1.0, std::abs(phi_k))) {
      fail_at(rep, K);
    }
  }
  return rep;
}

SubgradientWitness subgradient_witness_C2(const Vector& x_next, const Vector& x_curr,
                                          const Vector& y, const CompositeProblem& problem,
                                          double tau, const LyapunovParams& params) {
  const Kernel& h = problem.kernel;
  SubgradientWitness w;
  w.w1 = problem.g_grad(x_next) - problem.g_grad(y) + (h.grad(y) - h.grad(x_next)) / tau +
         params.delta1() * h.hess_vector(x_next, x_next - x_curr);
  w.w2 = params.delta1() * (h.grad(x_curr) - h.grad(x_next));
  w.norm = std::sqrt(w.w1.squaredNorm() + w.w2.squaredNorm());
  return w;
}

CheckReport check_relative_error_C2(const SolverResult& result, const CompositeProblem& problem,
                                    const LyapunovParams& params, int K) {
  require_iterates(result, "C2");
  CheckReport rep;
  rep.name = "relative_error_C2";
  const int last = static_cast<int>(result.trace.size());
  double rho2 = 0.0;
  double max_norm = 0.0;
  for (int k = std::max(K, 1); k < last; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const auto w = subgradient_witness_C2(result.iterate(k + 1), result.iterate(k),
                                          result.extrapolated[i - 1], problem,
                                          result.trace[i - 1].tau, params);
    const double denom = (result.iterate(k) - result.iterate(k - 1)).norm() +
                         (result.iterate(k + 1) - result.iterate(k)).norm();
    ++rep.n_checked;
    max_norm = std::max(max_norm, w.norm);
    if (!std::isfinite(w.norm)) fail_at(rep, k);
    if (denom > 1e-12) rho2 = std::max(rho2, w.norm / denom);
  }
  rep.worst = max_norm;
  rep.add("K", static_cast<double>(K));
  rep.add("rho2_empirical", rho2);
  rep.add("max_witness_norm", max_norm);
  return rep;
}

CheckReport check_function_descent(const SolverResult& result, const CompositeProblem& problem) {
  require_iterates(result, "function descent");
  CheckReport rep;
  rep.name = "function_descent";
  rep.worst = -std::numeric_limits<double>::infinity();
  const Kernel& h = problem.kernel;
  for (std::size_t i = 0; i + 1 < result.trace.size(); ++i) {
    const TraceRecord& t = result.trace[i];
    const Vector& x = result.iterates[i + 1];
    const Vector& x_next = result.iterates[i + 2];
    const Vector& y = result.extrapolated[i];
    const double psi = problem.psi(x);
    const double rhs = h.distance(x, x_next) / t.tau +
                       0.5 * problem.alpha * (x_next - x).squaredNorm() -
                       (1.0 / t.tau + t.L_lower) * h.distance(x, y);
    const double margin = rhs - (psi - problem.psi(x_next));
    rep.worst = std::max(rep.worst, margin);
    ++rep.n_checked;
    if (margin > 1e-9 * std::max(1.0, std::abs(psi))) fail_at(rep, t.k);
  }
  return rep;
}

CheckReport check_step_conditions(const SolverResult& result, const CompositeProblem& problem,
                                  const SolverConfig& config) {
  require_iterates(result, "step conditions");
  CheckReport rep;
  rep.name = "step_conditions";
  rep.worst = -std::numeric_limits<double>::infinity();
  const Kernel& h = problem.kernel;
  int bad9 = 0, bad10 = 0, bad12 = 0, bad_params = 0;
  for (std::size_t i = 0; i + 1 < result.trace.size(); ++i) {
    const TraceRecord& t = result.trace[i];
    const Vector& xp = result.iterates[i];
    const Vector& x = result.iterates[i + 1];
    const Vector& xn = result.iterates[i + 2];
    const Vector& y = result.extrapolated[i];
    ++rep.n_checked;
    bool ok = true;

    const double m9 = (1.0 + t.L_lower * t.tau_prev) * h.distance(x, y) -
                      (config.delta - config.epsilon) * h.distance(xp, x);
    if (m9 > 1e-12) { ++bad9; ok = false; }

    const double g_x = problem.g_value(x);
    const double g_y = problem.g_value(y);
    const Vector grad_y = problem.g_grad(y);
    const double m10 = g_y + grad_y.dot(x - y) - t.L_lower * h.distance(x, y) - g_x;
    if (m10 > acceptance_slack(g_x) + 1e-12) { ++bad10; ok = false; }

    const double m12 = problem.g_value(xn) -
                       (g_y + grad_y.dot(xn - y) + t.L_bar * h.distance(xn, y));
    if (m12 > acceptance_slack(g_y) + 1e-12) { ++bad12; ok = false; }

    const double prev_L = i == 0 ? config.L_bar_init : result.trace[i - 1].L_bar;
    if (t.tau != std::min(t.tau_prev, 1.0 / t.L_bar) || t.L_bar < prev_L ||
        !(t.gamma >= 0.0 && t.gamma <= config.gamma_cap) ||
        t.tau * t.L_bar > 1.0 + 1e-15) {
      ++bad_params;
      ok = false;
    }
    rep.worst = std::max({rep.worst, m9, m10, m12});
    if (!ok) fail_at(rep, t.k);
  }
  rep.add("violations_inertia", static_cast<double>(bad9));
  rep.add("violations_minorant", static_cast<double>(bad10));
  rep.add("violations_majorant", static_cast<double>(bad12));
  rep.add("violations_params", static_cast<double>(bad_params));
  return rep;
}

CheckReport check_cfi_bound(const SolverResult& result, const CompositeProblem& problem) {
  require_iterates(result, "cfi bound");
  CheckReport rep;
  rep.name = "cfi_bound";
  rep.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const TraceRecord& t = result.trace[i];
    const Vector& x = result.iterates[i + 1];
    const Vector dx = x - result.iterates[i];
    const double bound = t.gamma * t.gamma * dx.squaredNorm() * (1.5 * x.squaredNorm() + 1.75);
    const double margin = problem.kernel.distance(x, result.extrapolated[i]) - bound;
    rep.worst = std::max(rep.worst, margin);
    ++rep.n_checked;
    if (margin > 1e-10) fail_at(rep, t.k);
  }
  return rep;
}

CheckReport check_continuity_proxy(const SolverResult& result, int window, double step_tol) {
  CheckReport rep;
  rep.name = "continuity_C3";
  rep.proxy = true;
  const int n = static_cast<int>(result.trace.size());
  const int start = std::max(0, n - window);
  double max_step = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = start; i < n; ++i) {
    const TraceRecord& t = result.trace[static_cast<std::size_t>(i)];
    if (i > start) max_step = std::max(max_step, t.step_norm);
    lo = std::min(lo, t.psi);
    hi = std::max(hi, t.psi);
    ++rep.n_checked;
  }
  const bool converged = n >= 2 && max_step <= step_tol;
  rep.worst = hi - lo;
  rep.add("iterates_converged", converged ? "yes" : "no");
  rep.add("psi_span", hi - lo);
  if (converged && hi - lo > step_tol * std::max(1.0, std::abs(hi))) fail_at(rep, n);
  return rep;
}

int frozen_phase_start(const SolverResult& result, int run) {
  const auto& tr = result.trace;
  const int n = static_cast<int>(tr.size());
  if (n == 0) return 0;
  int streak_start = 0;
  for (int i = 1; i < n; ++i) {
    if (tr[static_cast<std::size_t>(i)].L_bar != tr[static_cast<std::size_t>(i - 1)].L_bar) {
      streak_start = i;
    } else if (i - streak_start + 1 >= run) {
      return tr[static_cast<std::size_t>(streak_start)].k;
    }
  }
  return tr.back().k;
}

RunSummary summarize(const SolverResult& result, double reference) {
  RunSummary s;
  s.solver = result.solver;
  s.termination = to_string(result.termination);
  s.iterations = static_cast<int>(result.trace.size());
  s.best_psi = std::numeric_limits<double>::infinity();
  for (const auto& t : result.trace) {
    s.best_psi = std::min(s.best_psi, t.psi);
    s.total_backtracks += t.lower_trials + t.upper_trials;
    s.suboptimality.push_back(std::max(0.0, t.psi - reference));
  }
  if (!result.trace.empty()) {
    s.final_psi = result.trace.back().psi;
    s.final_suboptimality = s.suboptimality.back();
  }
  return s;
}

double bundle_reference(const std::vector<const SolverResult*>& runs) {
  double ref = std::numeric_limits<double>::infinity();
  for (const auto* r : runs) {
    for (const auto& t : r->trace) ref = std::min(ref, t.psi);
  }
  return ref;
}

namespace {

SolverResult corrupt_at(const SolverResult& result, const CompositeProblem& problem, int j,
                        double gamma, double tau) {
  require_iterates(result, "corruption fixture");
  if (j < 1 || j + 1 > static_cast<int>(result.trace.size())) {
    throw std::invalid_argument("corruption fixture: j out of range");
  }
  const auto i = static_cast<std::size_t>(j - 1);
  SolverResult out;
  out.solver = result.solver + "_corrupted";
  out.termination = result.termination;
  out.trace.assign(result.trace.begin(), result.trace.begin() + static_cast<long>(i) + 1);
  out.iterates.assign(result.iterates.begin(), result.iterates.begin() + static_cast<long>(i) + 2);
  out.extrapolated.assign(result.extrapolated.begin(),
                          result.extrapolated.begin() + static_cast<long>(i));

  const Vector& x = out.iterates[i + 1];
  const Vector& xp = out.iterates[i];
  const Vector y = x + gamma * (x - xp);
  const Vector x_next = problem.f_prox_step(problem.kernel.grad(y), problem.g_grad(y), tau);
  TraceRecord& row = out.trace.back();
  row.gamma = gamma;
  row.tau = tau;
  row.dh_curr_y = problem.kernel.distance(x, y);
  out.extrapolated.push_back(y);
  out.iterates.push_back(x_next);

  TraceRecord last;
  last.k = row.k + 1;
  last.psi = problem.psi(x_next);
  last.tau = tau;
  last.tau_prev = tau;
  last.L_bar = row.L_bar;
  last.dh_prev_curr = problem.kernel.distance(x, x_next);
  last.step_norm = (x_next - x).norm();
  out.trace.push_back(last);
  out.extrapolated.push_back(x_next);
  out.final_point = x_next;
  return out;
}

}  // namespace

SolverResult corrupt_inflate_gamma(const SolverResult& result, const CompositeProblem& problem,
                                   int j, double gamma) {
  const auto& row = result.trace.at(static_cast<std::size_t>(j - 1));
  return corrupt_at(result, problem, j, gamma, row.tau);
}

SolverResult corrupt_scale_tau(const SolverResult& result, const CompositeProblem& problem, int j,
                               double factor) {
  const auto& row = result.trace.at(static_cast<std::size_t>(j - 1));
  return corrupt_at(result, problem, j, row.gamma, factor * row.tau);
}

}  // namespace cocain
