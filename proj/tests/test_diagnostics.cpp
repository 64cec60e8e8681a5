#include <cmath>

#include "cocain/diagnostics.hpp"
#include "cocain/experiment.hpp"
#include "doctest.h"

using namespace cocain;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }

CompositeProblem quadratic(double L0) {
  CompositeProblem p;
  p.name = "quadratic";
  p.dim = 1;
  p.f_value = [](const Vector&) { return 0.0; };
  p.f_prox_step = [](const Vector& gh, const Vector& gg, double tau) -> Vector { return gh - tau * gg; };
  p.g_value = [L0](const Vector& x) { return 0.5 * L0 * x.squaredNorm(); };
  p.g_grad = [L0](const Vector& x) -> Vector { return L0 * x; };
  p.smad_L = L0;
  return p;
}

}  // namespace

TEST_CASE("lyapunov value") {
  TraceRecord t;
  t.tau_prev = 1.0;
  t.psi = 1.0;
  t.dh_prev_curr = 0.1;
  LyapunovParams lp;
  lp.delta = 0.99;
  lp.v_lower = 0.0;
  CHECK(lyapunov_phi(t, lp) == doctest::Approx(1.099).epsilon(1e-15));
  t.psi = 0.0;
  t.dh_prev_curr = 0.0;
  CHECK(lyapunov_phi(t, lp) == 0.0);
}

TEST_CASE("descent holds on real runs and fails on corrupted ones") {
  const auto lq = make_univariate(UnivariateKind::LogQuad);
  const SolverConfig c;
  const auto r = cocain_bpg(lq, c, v1(3.0));
  const auto lp = lyapunov_params(c, lq, r);
  const auto rep = check_lyapunov_descent(r, lq, lp);
  CHECK(rep.descent.passed);
  CHECK(rep.prefix.passed);
  CHECK(rep.descent.n_checked > 0);
  CHECK(rep.phi1 >= 0.0);

  const auto sp = make_spurious2d(0.5, 100, Vector::Ones(2));
  const auto rs = cocain_bpg(sp, spurious_config(), Vector::Constant(2, 2.0));
  const auto lps = lyapunov_params(spurious_config(), sp, rs);
  CHECK(check_lyapunov_descent(rs, sp, lps).descent.passed);
  for (int j : {2, 3, 5}) {
    const auto bad = corrupt_inflate_gamma(rs, sp, j, 10.0);
    const auto br = check_lyapunov_descent(bad, sp, lps);
    CHECK_FALSE(br.descent.passed);
    CHECK(br.descent.first_violation == j);
  }

  const auto from_one = cocain_bpg(lq, c, v1(1.0));
  const auto bad_tau = corrupt_scale_tau(from_one, lq, 3, 2.0);
  const auto fd = check_function_descent(bad_tau, lq);
  CHECK_FALSE(fd.passed);
  CHECK(fd.first_violation == 3);
  CHECK(check_function_descent(r, lq).passed);
}

TEST_CASE("missing iterates are an error") {
  const auto lq = make_univariate(UnivariateKind::LogQuad);
  SolverConfig c;
  c.store_iterates = false;
  const auto r = cocain_bpg(lq, c, v1(3.0));
  CHECK_THROWS(check_lyapunov_descent(r, lq, lyapunov_params(c, lq, r)));
}

TEST_CASE("sufficient decrease after the frozen phase") {
  const auto quad = quadratic(2.0);
  SolverConfig c;
  c.freeze_after = 5;
  c.stop_tol = 0.0;
  c.max_iters = 60;
  const auto r = cocain_bpg(quad, c, v1(1.0));
  const int K = frozen_phase_start(r);
  CHECK(K <= 6);
  const auto lp = lyapunov_params(c, quad, r);
  CHECK(lp.tau_frozen == 0.5);
  const auto rep = check_sufficient_decrease_C1(r, quad, lp, K);
  CHECK(rep.passed);
  CHECK(rep.n_checked > 0);

  // The affine relation at the switch row.
  const auto& row = r.trace.at(static_cast<std::size_t>(K - 1));
  const double lhs = lyapunov_phi(row, lp);
  const double rhs = row.tau_prev * (psi_delta1(r, quad, lp, K, K) - lp.v_lower);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("subgradient witness") {
  const auto lq = make_univariate(UnivariateKind::LogQuad);
  LyapunovParams lp;
  lp.tau_frozen = 0.5;
  const auto w = subgradient_witness_C2(v1(0), v1(0), v1(0), lq, 0.5, lp);
  CHECK(w.norm == 0.0);

  // Euclidean kernel: the second block is delta1 (x_curr - x_next).
  const auto w2 = subgradient_witness_C2(v1(0.2), v1(0.5), v1(0.6), lq, 0.5, lp);
  CHECK(w2.w2[0] == doctest::Approx(lp.delta1() * (0.5 - 0.2)).epsilon(1e-14));

  const PhaseSetup ps;
  const auto p = make_phase_retrieval(generate_phase_retrieval(ps.d, ps.m, ps.seed, 0), Regularizer::L1, ps.lambda);
  const auto cfg = phase_config();
  const auto r = cocain_bpg(p, cfg, phase_start(ps));
  const auto plp = lyapunov_params(cfg, p, r);
  const auto c2 = check_relative_error_C2(r, p, plp, frozen_phase_start(r));
  CHECK(c2.passed);
  CHECK(std::isfinite(c2.worst));
}

TEST_CASE("step conditions and inertia bound") {
  const PhaseSetup ps;
  const auto p = make_phase_retrieval(generate_phase_retrieval(ps.d, ps.m, ps.seed, 0), Regularizer::SqL2, ps.lambda);
  SolverConfig cfg = phase_config();
  cfg.max_iters = 200;
  const auto co = cocain_bpg(p, cfg, phase_start(ps));
  CHECK(check_step_conditions(co, p, cfg).passed);
  CHECK(check_cfi_bound(co, p).passed);
  const auto cfi = cocain_bpg_cfi(p, cfg, phase_start(ps));
  CHECK(check_cfi_bound(cfi, p).passed);
  CHECK(check_step_conditions(cfi, p, cfg).passed);
}

TEST_CASE("continuity proxy") {
  const auto lq = make_univariate(UnivariateKind::LogQuad);
  SolverConfig c;
  c.stop_tol = 0.0;
  c.max_iters = 400;
  const auto r = cocain_bpg(lq, c, v1(2.0));
  const auto rep = check_continuity_proxy(r);
  CHECK(rep.proxy);
  CHECK(rep.passed);

  SolverConfig short_run;
  short_run.max_iters = 3;
  short_run.stop_tol = 0.0;
  const auto s = cocain_bpg(lq, short_run, v1(2.0));
  const auto early = check_continuity_proxy(s);
  CHECK(early.passed);
  CHECK(early.to_text().find("iterates_converged = no") != std::string::npos);
}

TEST_CASE("frozen phase start") {
  SolverResult r;
  for (int k = 1; k <= 40; ++k) {
    TraceRecord t;
    t.k = k;
    t.L_bar = k < 8 ? k : 8;
    r.trace.push_back(t);
  }
  CHECK(frozen_phase_start(r) == 8);
  CHECK(frozen_phase_start(r, 50) == 40);
  CHECK(frozen_phase_start(SolverResult{}) == 0);
}

TEST_CASE("summaries") {
  SolverResult r;
  r.solver = "x";
  for (double v : {3.0, 2.0, 2.5}) {
    TraceRecord t;
    t.psi = v;
    t.upper_trials = 1;
    t.lower_trials = 2;
    r.trace.push_back(t);
  }
  const auto s = summarize(r, 2.25);
  CHECK(s.final_psi == 2.5);
  CHECK(s.best_psi == 2.0);
  CHECK(s.iterations == 3);
  CHECK(s.total_backtracks == 9);
  CHECK(s.final_suboptimality == 0.25);
  CHECK(s.suboptimality[1] == 0.0);

  SolverResult q = r;
  q.trace[2].psi = 1.5;
  CHECK(bundle_reference({&r, &q}) == 1.5);
}

TEST_CASE("report text") {
  CheckReport rep;
  rep.name = "demo";
  rep.add("rho", 0.5);
  rep.add("note", std::string("ok"));
  const auto text = rep.to_text();
  CHECK(text.find("rho") != std::string::npos);
  CHECK(text.find("note = ok") != std::string::npos);
}
