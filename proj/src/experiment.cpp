#include "cocain/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace cocain {

SolverKind parse_solver(const std::string& name) {
  if (name == "cocain") return SolverKind::CoCaIn;
  if (name == "cocain_nobt") return SolverKind::CoCaInNoBacktracking;
  if (name == "cocain_cfi") return SolverKind::CoCaInCfi;
  if (name == "bpg_wb") return SolverKind::BpgWb;
  if (name == "bpg_fixed") return SolverKind::BpgFixed;
  if (name == "ipiano") return SolverKind::IPiano;
  throw std::invalid_argument("unknown solver: " + name);
}

const char* solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::CoCaIn: return "cocain";
    case SolverKind::CoCaInNoBacktracking: return "cocain_nobt";
    case SolverKind::CoCaInCfi: return "cocain_cfi";
    case SolverKind::BpgWb: return "bpg_wb";
    case SolverKind::BpgFixed: return "bpg_fixed";
    case SolverKind::IPiano: return "ipiano";
  }
  return "?";
}

SolverResult run_solver(const SolverSpec& spec, const CompositeProblem& problem, const Vector& x0) {
  switch (spec.kind) {
    case SolverKind::CoCaIn: return cocain_bpg(problem, spec.config, x0);
    case SolverKind::CoCaInNoBacktracking: return cocain_bpg_no_backtracking(problem, spec.config, x0);
    case SolverKind::CoCaInCfi: return cocain_bpg_cfi(problem, spec.config, x0);
    case SolverKind::BpgWb: return bpg_wb(problem, spec.config, x0);
    case SolverKind::BpgFixed:
      return bpg_fixed(problem, spec.fixed_L.value_or(problem.smad_L), x0, spec.config);
    case SolverKind::IPiano: return ipiano(problem, spec.ipiano_beta, spec.config, x0);
  }
  throw std::logic_error("run_solver: bad kind");
}

const BundleRun& Bundle::at(const std::string& name) const {
  for (const auto& r : runs) {
    if (r.name == name) return r;
  }
  throw std::out_of_range("bundle has no run named " + name);
}

Bundle run_bundle(const CompositeProblem& problem, const std::vector<SolverSpec>& specs,
                  const Vector& x0, int jobs) {
  Bundle b;
  b.problem = problem.name;
  b.runs.resize(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  auto work = [&](std::size_t i) {
    try {
      b.runs[i].name = solver_name(specs[i].kind);
      b.runs[i].result = run_solver(specs[i], problem, x0);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t width = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t start = 0; start < specs.size(); start += width) {
    const std::size_t stop = std::min(specs.size(), start + width);
    if (stop - start == 1) {
      work(start);
      continue;
    }
    std::vector<std::thread> pool;
    for (std::size_t i = start; i < stop; ++i) pool.emplace_back(work, i);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<const SolverResult*> all;
  for (const auto& r : b.runs) all.push_back(&r.result);
  b.reference = bundle_reference(all);
  for (auto& r : b.runs) r.summary = summarize(r.result, b.reference);
  return b;
}

SolverConfig sweep_config() {
  SolverConfig c;
  c.L_bar_init = 0.1;
  c.nu_lower = 1.5;
  c.nu_upper = 1.5;
  c.lower_seed.policy = LowerSeed::Policy::Constant;
  c.lower_seed.value = 0.1;
  c.max_iters = 1000;
  c.stop_tol = 1e-9;
  c.store_iterates = false;
  return c;
}

std::vector<SweepRow> sweep_univariate(UnivariateKind kind, int n_starts, double lo, double hi,
                                       const std::vector<SolverSpec>& specs) {
  if (n_starts < 2) throw std::invalid_argument("sweep: need at least 2 starts");
  const CompositeProblem p = make_univariate(kind);
  std::vector<SweepRow> rows;
  for (const auto& spec : specs) {
    SweepRow row;
    row.solver = solver_name(spec.kind);
    double sum = 0.0;
    for (int i = 0; i < n_starts; ++i) {
      const double x0 = lo + (hi - lo) * i / (n_starts - 1);
      const SolverResult r = run_solver(spec, p, Vector::Constant(1, x0));
      const double f = p.psi(r.final_point);
      row.starts.push_back(x0);
      row.finals.push_back(f);
      sum += f;
      if (p.known_min && std::abs(f - *p.known_min) <= 1e-3) ++row.global_count;
    }
    row.average = sum / n_starts;
    rows.push_back(std::move(row));
  }
  return rows;
}

SolverConfig single_start_config() { return SolverConfig{}; }

SolverConfig spurious_config() {
  SolverConfig c;
  c.L_bar_init = 101.0;  // above 1 / (1 - delta) for alpha = -1
  c.max_iters = 2000;
  return c;
}

Vector spurious_minimizer(double lambda, double rho, const Vector& b) {
  Vector out(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    const double bi = b[i];
    auto phi = [&](double t) {
      return lambda * std::log1p(rho * (t - bi) * (t - bi)) + std::log1p(std::abs(t));
    };
    auto dphi = [&](double t) {
      const double s = t > 0 ? 1.0 : (t < 0 ? -1.0 : 0.0);
      return 2.0 * lambda * rho * (t - bi) / (1.0 + rho * (t - bi) * (t - bi)) +
             s / (1.0 + std::abs(t));
    };
    const double lo = std::min(0.0, bi) - 1.0, hi = std::max(0.0, bi) + 1.0;
    const double step = 1e-4;
    double best_t = 0.0, best = phi(0.0);
    for (double t = lo; t <= hi; t += step) {
      if (phi(t) < best) {
        best = phi(t);
        best_t = t;
      }
    }
    double a = best_t - step, c = best_t + step;
    if (best_t != 0.0 && dphi(a) < 0.0 && dphi(c) > 0.0) {
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + c);
        if (m <= a || m >= c) break;
        (dphi(m) < 0.0 ? a : c) = m;
      }
      best_t = 0.5 * (a + c);
    }
    out[i] = best_t;
  }
  return out;
}

std::vector<SpuriousOutcome> run_spurious(double lambda, double rho, const Vector& b,
                                          const std::vector<Vector>& starts,
                                          const SolverConfig& config) {
  const CompositeProblem p = make_spurious2d(lambda, rho, b);
  const Vector xstar = spurious_minimizer(lambda, rho, b);
  std::vector<SpuriousOutcome> out;
  for (const auto& s : starts) {
    SpuriousOutcome o;
    o.start = s;
    o.result = cocain_bpg(p, config, s);
    o.distance_to_b = (o.result.final_point - b).norm();
    o.distance_to_minimizer = (o.result.final_point - xstar).norm();
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<Vector> default_spurious_starts() {
  std::vector<Vector> s;
  for (double a : {2.0, -2.0}) {
    for (double c : {2.0, -2.0}) s.push_back((Vector(2) << a, c).finished());
  }
  return s;
}

SolverConfig phase_config() {
  SolverConfig c;
  c.L_bar_init = 1.0;
  c.max_iters = 1000;
  c.stop_tol = 0.0;
  return c;
}

Vector phase_start(const PhaseSetup& setup) {
  std::mt19937_64 rng(setup.seed + 1);
  std::normal_distribution<double> n(0.0, 1.0);
  Vector x0(setup.d);
  for (int i = 0; i < setup.d; ++i) x0[i] = setup.x0_scale * n(rng);
  return x0;
}

std::vector<SolverSpec> phase_solvers(const SolverConfig& config) {
  std::vector<SolverSpec> s;
  for (auto k : {SolverKind::CoCaIn, SolverKind::CoCaInCfi, SolverKind::BpgWb,
                 SolverKind::BpgFixed}) {
    s.push_back(SolverSpec{k, config, 0.7, std::nullopt});
  }
  return s;
}

SolverConfig denoise_config() {
  SolverConfig c;
  c.L_bar_init = 101.0;
  c.max_iters = 500;
  c.stop_tol = 0.0;
  return c;
}

std::vector<SolverSpec> denoise_solvers(const SolverConfig& config) {
  std::vector<SolverSpec> s;
  for (auto k : {SolverKind::CoCaIn, SolverKind::BpgWb, SolverKind::BpgFixed}) {
    s.push_back(SolverSpec{k, config, 0.7, std::nullopt});
  }
  return s;
}

DenoiseOutcome run_denoise(const DenoiseSetup& setup, const std::vector<SolverSpec>& specs,
                           int jobs) {
  DenoiseOutcome out;
  out.clean = setup.image ? read_pgm(*setup.image) : make_synthetic_image(setup.rows, setup.cols);
  out.noisy = add_outlier_noise(out.clean, setup.magnitude, setup.fraction, setup.seed,
                                setup.background_std);
  const CompositeProblem p =
      make_robust_denoising(out.noisy, setup.lambda, setup.rho, setup.data_term);
  const Vector x0 = out.noisy.flatten().cwiseMax(0.0).cwiseMin(1.0);
  out.bundle = run_bundle(p, specs, x0, jobs);
  return out;
}

}  // namespace cocain
