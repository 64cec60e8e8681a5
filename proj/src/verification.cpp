#include "cocain/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "cocain/bregman.hpp"
#include "cocain/diagnostics.hpp"
#include "cocain/image.hpp"
#include "cocain/problems.hpp"
#include "cocain/prox.hpp"
#include "cocain/solvers.hpp"

namespace cocain {

namespace {

using Rng = std::mt19937_64;

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Vector uniform_vector(Rng& rng, int d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = u(rng);
  return v;
}

SuiteCheck make(const char* suite, std::string name, bool ok, std::string detail) {
  return SuiteCheck{suite, std::move(name), ok, false, std::move(detail)};
}

Vector fd_gradient(const ScalarField& fn, const Vector& x, double step = 1e-5) {
  Vector g(x.size());
  Vector xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + step;
    xm[i] = x[i] - step;
    g[i] = (fn(xp) - fn(xm)) / (2.0 * step);
    xp[i] = xm[i] = x[i];
  }
  return g;
}

double log1abs_objective(double x, double y, double tau, double c) {
  return std::log1p(std::abs(x - c)) + (x - y) * (x - y) / (2.0 * tau);
}

PhaseRetrievalData small_phase_data() { return generate_phase_retrieval(10, 50, 1, 0.0); }

ImageGrid small_noisy_image(int n) {
  return add_outlier_noise(make_synthetic_image(n, n), 1.0, 0.1, 3);
}

struct Named {
  std::string name;
  CompositeProblem problem;
};

std::vector<Named> all_instances() {
  const auto pr = small_phase_data();
  const auto img = small_noisy_image(8);
  return {
      {"logquad", make_univariate(UnivariateKind::LogQuad)},
      {"sigmoid", make_univariate(UnivariateKind::Sigmoid)},
      {"abssincos", make_univariate(UnivariateKind::AbsSinCos)},
      {"spurious2d", make_spurious2d(0.5, 100.0, Vector::Ones(2))},
      {"phase_l1", make_phase_retrieval(pr, Regularizer::L1, 0.1)},
      {"phase_sql2", make_phase_retrieval(pr, Regularizer::SqL2, 0.1)},
      {"denoise_log", make_robust_denoising(img, 10.0, 1.0, DataTerm::LogRobust)},
      {"denoise_l1", make_robust_denoising(img, 10.0, 1.0, DataTerm::L1)},
      {"denoise_sql2", make_robust_denoising(img, 10.0, 1.0, DataTerm::SqL2)},
  };
}

// f = 0, g = L0/2 x^2, Euclidean kernel.
CompositeProblem quadratic_problem(double L0) {
  CompositeProblem p;
  p.name = "quadratic";
  p.dim = 1;
  p.f_value = [](const Vector&) { return 0.0; };
  p.f_prox_step = [](const Vector& gh, const Vector& gg, double tau) -> Vector {
    return gh - tau * gg;
  };
  p.g_value = [L0](const Vector& x) { return 0.5 * L0 * x.squaredNorm(); };
  p.g_grad = [L0](const Vector& x) -> Vector { return L0 * x; };
  p.smad_L = L0;
  return p;
}

bool bit_identical(const SolverResult& a, const SolverResult& b) {
  if (a.trace.size() != b.trace.size() || a.iterates.size() != b.iterates.size()) return false;
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    if (!a.trace[i].same_numbers(b.trace[i])) return false;
  }
  for (std::size_t i = 0; i < a.iterates.size(); ++i) {
    if (a.iterates[i] != b.iterates[i]) return false;
  }
  return a.termination == b.termination;
}

}  // namespace

VerifyScope parse_verify_scope(const std::string& s) {
  if (s == "kernels") return VerifyScope::Kernels;
  if (s == "prox") return VerifyScope::Prox;
  if (s == "problems") return VerifyScope::Problems;
  if (s == "solvers") return VerifyScope::Solvers;
  if (s == "all") return VerifyScope::All;
  throw std::invalid_argument("unknown verify scope: " + s);
}

double bisect_root(const std::function<double(double)>& fn, double lo, double hi) {
  double flo = fn(lo);
  if (flo == 0.0) return lo;
  if (fn(hi) == 0.0) return hi;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = fn(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double log1abs_grid_min(double y, double tau, double center, double step) {
  const double half = std::abs(y - center) + 2.0;
  const long n = static_cast<long>(std::ceil(2.0 * half / step));
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i <= n; ++i) {
    const double x = center - half + static_cast<double>(i) * step;
    best = std::min(best, log1abs_objective(x, y, tau, center));
  }
  return best;
}

std::vector<SuiteCheck> verify_kernels(std::uint64_t seed) {
  std::vector<SuiteCheck> out;
  Rng rng(seed);
  const Kernel kernels[] = {Kernel::euclidean(), Kernel::quartic()};

  for (const Kernel& h : kernels) {
    const std::string tag = h.name();
    double worst_gap = 0.0, worst_scaled = 0.0, worst_grad = 0.0, worst_sc = 0.0,
           min_dist = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 10000; ++s) {
      const int d = 1 + static_cast<int>(rng() % 5);
      const Vector x = uniform_vector(rng, d, -1.0, 1.0);
      const Vector y = uniform_vector(rng, d, -1.0, 1.0);
      const Vector z = uniform_vector(rng, d, -1.0, 1.0);
      const double gap = std::abs(three_points_gap(h, x, y, z));
      worst_gap = std::max(worst_gap, gap);
      const double scale = std::max(1.0, x.squaredNorm() * x.squaredNorm() +
                                             y.squaredNorm() * y.squaredNorm() +
                                             z.squaredNorm() * z.squaredNorm());
      worst_scaled = std::max(worst_scaled, gap / scale);
      const double dxy = h.distance(x, y);
      min_dist = std::min(min_dist, dxy);
      worst_sc = std::max(worst_sc, 0.5 * h.sigma() * (x - y).squaredNorm() - dxy);
      if (s < 1000) {
        const Vector g = h.grad(x);
        const Vector fd = fd_gradient([&](const Vector& v) { return h.value(v); }, x);
        worst_grad = std::max(worst_grad, (g - fd).norm() / std::max(1.0, g.norm()));
      }
    }
    out.push_back(make("kernels", tag + "/three_points", worst_gap < 1e-10,
                       fmt("max |gap| = %.3e", worst_gap)));
    out.push_back(make("kernels", tag + "/three_points_scaled", worst_scaled < 1e-10,
                       fmt("max scaled |gap| = %.3e", worst_scaled)));
    out.push_back(make("kernels", tag + "/gradient_fd", worst_grad < 1e-6,
                       fmt("max rel err = %.3e", worst_grad)));
    out.push_back(make("kernels", tag + "/nonnegative", min_dist >= -1e-12,
                       fmt("min D = %.3e", min_dist)));
    out.push_back(make("kernels", tag + "/strong_convexity", worst_sc <= 1e-10,
                       fmt("max sigma/2 |x-y|^2 - D = %.3e", worst_sc)));
  }

  {
    const Kernel h = Kernel::quartic();
    double worst_bound = -std::numeric_limits<double>::infinity(), worst_hess = 0.0;
    for (int s = 0; s < 10000; ++s) {
      const int d = 1 + static_cast<int>(rng() % 5);
      const Vector x = uniform_vector(rng, d, -2.0, 2.0);
      const Vector a = uniform_vector(rng, d, -2.0, 2.0);
      const double bound = 1.5 * x.squaredNorm() * a.squaredNorm() + 0.5 * a.squaredNorm();
      worst_bound = std::max(worst_bound, h.second_order_term(x, a) - bound);
      if (s < 1000) {
        // <a, Hess a> against a central difference of the gradient along a.
        const double t = 1e-6;
        const double fd = a.dot(h.grad(x + t * a) - h.grad(x - t * a)) / (2.0 * t);
        const double exact = h.hess_quadratic_form(x, a);
        worst_hess = std::max(worst_hess, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
      }
    }
    out.push_back(make("kernels", "quartic/hessian_bound", worst_bound <= 1e-10,
                       fmt("max term - bound = %.3e over 1e4 samples", worst_bound)));
    out.push_back(make("kernels", "quartic/hessian_fd", worst_hess < 1e-6,
                       fmt("max rel err = %.3e", worst_hess)));
  }

  {
    std::vector<PointPair> pairs;
    for (int s = 0; s < 1000; ++s) {
      const int d = 1 + static_cast<int>(rng() % 4);
      pairs.emplace_back(uniform_vector(rng, d, -3.0, 3.0), uniform_vector(rng, d, -3.0, 3.0));
    }
    const double e = symmetry_coefficient_estimate(Kernel::euclidean(), pairs);
    out.push_back(make("kernels", "euclidean/symmetry_exactly_one", e == 1.0,
                       fmt("estimate = %.17g", e)));
    const Kernel q = Kernel::quartic();
    const double a = symmetry_coefficient_estimate(q, pairs);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& [x, y] : pairs) {
      const double dxy = q.distance(x, y), dyx = q.distance(y, x);
      worst = std::max({worst, a * dxy - dyx, dyx - dxy / a - 1e-10});
    }
    out.push_back(make("kernels", "quartic/symmetry_sandwich", a > 0.0 && a <= 1.0 && worst <= 0.0,
                       fmt("estimate = %.6f", a)));
    const std::vector<PointPair> one{{Vector::Unit(2, 0), Vector::Zero(2)}};
    const double two_point = symmetry_coefficient_estimate(q, one);
    out.push_back(make("kernels", "quartic/symmetry_two_point", std::abs(two_point - 0.6) < 1e-15,
                       fmt("estimate = %.17g", two_point)));
  }
  return out;
}

std::vector<SuiteCheck> verify_prox(std::uint64_t seed) {
  std::vector<SuiteCheck> out;
  Rng rng(seed);
  std::uniform_real_distribution<double> uy(-5.0, 5.0), utau(0.0, 3.0), uc(-1.0, 1.0);

  {
    double worst = -std::numeric_limits<double>::infinity();
    int bad = 0;
    for (int s = 0; s < 1000; ++s) {
      const double y = uy(rng), c = uc(rng);
      double tau = utau(rng);
      if (tau == 0.0) tau = 1e-3;
      const double x = prox_log1abs(y, tau, c);
      const double gap = log1abs_objective(x, y, tau, c) - log1abs_grid_min(y, tau, c);
      worst = std::max(worst, gap);
      if (gap > 1e-6) ++bad;
    }
    out.push_back(make("prox", "log1abs_vs_grid", bad == 0,
                       fmt("max objective gap = %.3e over 1000 instances", worst)));
  }

  {
    double worst = 0.0, worst_oracle = 0.0;
    bool in_unit = true;
    std::uniform_real_distribution<double> us(0.0, 100.0), ul(0.1, 5.0);
    for (int s = 0; s < 1000; ++s) {
      const double sc = s % 10 == 0 ? 0.0 : us(rng);
      const bool l1 = s % 2 == 0;
      const CubicProblem cp{sc, l1 ? 1.0 : ul(rng), l1 ? -1.0 : 1.0};
      const double t = solve_monotone_cubic(cp);
      const double r = std::abs(cp.s * t * t * t + cp.linear_coeff * t + cp.constant);
      worst = std::max(worst, r / std::max(1.0, std::abs(cp.constant)));
      if (l1 && !(t > 0.0 && t <= 1.0)) in_unit = false;
      auto fn = [&](double u) { return cp.s * u * u * u + cp.linear_coeff * u + cp.constant; };
      const double lo = l1 ? 0.0 : -std::max(1.0, 1.0 / cp.linear_coeff);
      const double hi = l1 ? 1.0 : 0.0;
      worst_oracle = std::max(worst_oracle, std::abs(t - bisect_root(fn, lo, hi)));
    }
    out.push_back(make("prox", "cubic_residual", worst < 1e-12,
                       fmt("max scaled residual = %.3e", worst)));
    out.push_back(make("prox", "cubic_l1_root_in_unit_interval", in_unit, "t in (0,1]"));
    out.push_back(make("prox", "cubic_vs_bisection", worst_oracle < 1e-12,
                       fmt("max |t - t_bisect| = %.3e", worst_oracle)));
  }

  {
    const Kernel h = Kernel::quartic();
    double worst_l1 = 0.0, worst_l2 = 0.0;
    std::uniform_real_distribution<double> ulam(0.0, 2.0);
    for (int s = 0; s < 1000; ++s) {
      const int d = 1 + static_cast<int>(rng() % 8);
      const Vector gh = uniform_vector(rng, d, -3.0, 3.0);
      const Vector gg = uniform_vector(rng, d, -3.0, 3.0);
      double tau = utau(rng);
      if (tau == 0.0) tau = 1e-3;
      const double lam = ulam(rng);
      const double scale = std::max(1.0, gh.cwiseAbs().maxCoeff() + tau * gg.cwiseAbs().maxCoeff());

      // tau lam s + tau grad_g + grad h(x+) - grad_h_y = 0 with s in d|x+|_1.
      const Vector x1 = bpg_step_l1_quartic(gh, gg, tau, lam);
      const Vector r1 = tau * gg + h.grad(x1) - gh;
      for (int i = 0; i < d; ++i) {
        const double v = x1[i] != 0.0 ? std::abs(r1[i] + tau * lam * (x1[i] > 0 ? 1.0 : -1.0))
                                      : std::max(0.0, std::abs(r1[i]) - tau * lam);
        worst_l1 = std::max(worst_l1, v / scale);
      }
      const Vector x2 = bpg_step_sql2_quartic(gh, gg, tau, lam);
      const Vector r2 = 2.0 * lam * tau * x2 + tau * gg + h.grad(x2) - gh;
      worst_l2 = std::max(worst_l2, r2.cwiseAbs().maxCoeff() / scale);
    }
    out.push_back(make("prox", "quartic_l1_first_order", worst_l1 < 1e-8,
                       fmt("max residual = %.3e over 1000 instances", worst_l1)));
    out.push_back(make("prox", "quartic_sql2_first_order", worst_l2 < 1e-8,
                       fmt("max residual = %.3e over 1000 instances", worst_l2)));
  }

  {
    bool composition = true, monotone = true;
    std::uniform_real_distribution<double> ut(0.0, 2.0);
    for (int s = 0; s < 1000; ++s) {
      const Vector y = uniform_vector(rng, 5, -4.0, 4.0);
      const double a = ut(rng), b = ut(rng);
      const Vector lhs = soft_threshold(soft_threshold(y, b), a);
      if ((lhs - soft_threshold(y, a + b)).cwiseAbs().maxCoeff() > 1e-14) composition = false;
      const Vector lo = soft_threshold(y, std::min(a, b)), hi = soft_threshold(y, std::max(a, b));
      if ((lo.cwiseAbs() - hi.cwiseAbs()).minCoeff() < 0.0) monotone = false;
    }
    out.push_back(make("prox", "soft_threshold_composition", composition, "S_a(S_b y) = S_{a+b} y"));
    out.push_back(make("prox", "soft_threshold_monotone", monotone, "|S| non-increasing in theta"));
  }
  return out;
}

std::vector<SuiteCheck> verify_problems(std::uint64_t seed) {
  std::vector<SuiteCheck> out;
  Rng rng(seed);
  const auto instances = all_instances();

  for (const auto& [name, p] : instances) {
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      const Vector x = uniform_vector(rng, p.dim, p.operating_box.lo, p.operating_box.hi);
      const Vector g = p.g_grad(x);
      const Vector fd = fd_gradient(p.g_value, x);
      worst = std::max(worst, (g - fd).norm() / std::max(1.0, g.norm()));
    }
    out.push_back(make("problems", name + "/gradient_fd", worst < 1e-5,
                       fmt("max rel err = %.3e", worst)));

    double worst_semi = -std::numeric_limits<double>::infinity();
    double min_psi_gap = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 10000; ++s) {
      const Vector x = uniform_vector(rng, p.dim, p.operating_box.lo, p.operating_box.hi);
      const Vector y = uniform_vector(rng, p.dim, p.operating_box.lo, p.operating_box.hi);
      auto phi = [&](const Vector& v) { return p.f_value(v) - 0.5 * p.alpha * v.squaredNorm(); };
      const Vector m = 0.5 * (x + y);
      worst_semi = std::max(worst_semi, phi(m) - 0.5 * (phi(x) + phi(y)));
      min_psi_gap = std::min(min_psi_gap, p.psi(x) - p.psi_lower_bound);
    }
    out.push_back(make("problems", name + "/semiconvexity", worst_semi <= 1e-9,
                       fmt("max midpoint excess = %.3e", worst_semi)));
    out.push_back(make("problems", name + "/lower_bound", min_psi_gap >= 0.0,
                       fmt("min psi - bound = %.3e", min_psi_gap)));
  }

  // Declared smoothness constants on 1e4 segments each, at experiment scale.
  {
    const auto pr = small_phase_data();
    const auto img = add_outlier_noise(make_synthetic_image(32, 32), 1e5, 0.05, 1);
    std::vector<Named> scaled{
        {"logquad", make_univariate(UnivariateKind::LogQuad)},
        {"sigmoid", make_univariate(UnivariateKind::Sigmoid)},
        {"abssincos", make_univariate(UnivariateKind::AbsSinCos)},
        {"spurious2d", make_spurious2d(0.5, 100.0, Vector::Ones(2))},
        {"phase_retrieval", make_phase_retrieval(pr, Regularizer::L1, 0.1)},
        {"denoise_32x32", make_robust_denoising(img, 10.0, 1.0)},
    };
    for (const auto& [name, p] : scaled) {
      const SmadReport r = verify_smad_by_sampling(p, 10000, seed + 11);
      out.push_back(make("problems", name + "/smad_sampling", r.passed,
                         fmt("L = %g", p.smad_L) + fmt(", worst ratio = %.4f", r.worst_ratio)));
    }
    const auto lq = make_univariate(UnivariateKind::LogQuad);
    const SmadReport halved = verify_smad_by_sampling(lq, 10000, seed + 12, Box{-1.0, 1.0},
                                                      lq.smad_L / 2.0);
    SuiteCheck neg = make("problems", "logquad/smad_halved_negative_control", !halved.passed,
                          fmt("worst ratio = %.4f", halved.worst_ratio));
    neg.expected_fail = true;
    out.push_back(neg);
    const double lemma = phase_retrieval_smad_constant(pr);
    out.push_back(make("problems", "phase_retrieval/constant_matches_problem",
                       lemma == make_phase_retrieval(pr, Regularizer::SqL2, 0.1).smad_L,
                       fmt("L = %.6g", lemma)));
  }

  {
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
      Grid x(5, 5), p(5, 5), q(5, 5);
      for (auto* g : {&x, &p, &q}) {
        for (int i = 0; i < 25; ++i) g->data()[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
      }
      const auto [dx1, dx2] = finite_difference(x);
      const double lhs = (dx1.array() * p.array()).sum() + (dx2.array() * q.array()).sum();
      const double rhs = (x.array() * finite_difference_adjoint(p, q).array()).sum();
      worst = std::max(worst, std::abs(lhs - rhs));
    }
    out.push_back(make("problems", "finite_difference/adjoint", worst < 1e-12,
                       fmt("max |<Dx,p> - <x,D^T p>| = %.3e", worst)));
  }

  {
    const auto d1 = generate_phase_retrieval(10, 50, 7, 0.0);
    const auto d2 = generate_phase_retrieval(10, 50, 7, 0.0);
    const auto p = make_phase_retrieval(d1, Regularizer::L1, 0.0);
    out.push_back(make("problems", "phase_retrieval/deterministic",
                       d1.A == d2.A && d1.b == d2.b && d1.x_true == d2.x_true, "seed 7 twice"));
    const double gt = p.g_value(d1.x_true);
    out.push_back(make("problems", "phase_retrieval/zero_at_truth", std::abs(gt) < 1e-20,
                       fmt("g(x_true) = %.3e", gt)));
  }
  return out;
}

std::vector<SuiteCheck> verify_solvers(std::uint64_t seed) {
  std::vector<SuiteCheck> out;
  (void)seed;
  const auto logquad = make_univariate(UnivariateKind::LogQuad);
  const auto abssc = make_univariate(UnivariateKind::AbsSinCos);
  const auto spur = make_spurious2d(0.5, 100.0, Vector::Ones(2));
  const auto pr = small_phase_data();
  const auto phase = make_phase_retrieval(pr, Regularizer::L1, 0.1);

  struct Case {
    std::string name;
    const CompositeProblem* p;
    Vector x0;
    double L0;
  };
  Vector x0_phase = Vector::Constant(pr.A.cols(), 0.5);
  const std::vector<Case> cases{{"logquad", &logquad, Vector::Constant(1, 1.0), 1.0},
                                {"abssincos", &abssc, Vector::Constant(1, 13.0), 1.0},
                                {"spurious2d", &spur, Vector::Constant(2, 2.0), 101.0},
                                {"phase_l1", &phase, x0_phase, 1.0}};

  for (const auto& c : cases) {
    SolverConfig cfg;
    cfg.L_bar_init = c.L0;
    cfg.max_iters = 300;
    const SolverResult wb = bpg_wb(*c.p, cfg, c.x0);
    SolverConfig zero = cfg;
    zero.gamma_cap = 0.0;
    const SolverResult co0 = cocain_bpg(*c.p, zero, c.x0);
    out.push_back(make("solvers", c.name + "/gamma_cap0_equals_bpg_wb", bit_identical(wb, co0),
                       fmt("%g rows", static_cast<double>(wb.trace.size()))));
    if (c.p->kernel.kind() == KernelKind::Euclidean) {
      const SolverResult ip0 = ipiano(*c.p, 0.0, cfg, c.x0);
      out.push_back(make("solvers", c.name + "/ipiano_beta0_equals_bpg_wb", bit_identical(wb, ip0),
                         fmt("%g rows", static_cast<double>(wb.trace.size()))));
    }

    const SolverResult co = cocain_bpg(*c.p, cfg, c.x0);
    const auto lp = lyapunov_params(cfg, *c.p, co);
    const auto lyap = check_lyapunov_descent(co, *c.p, lp);
    out.push_back(make("solvers", c.name + "/lyapunov_descent", lyap.descent.passed && !co.failed(),
                       fmt("worst margin = %.3e", lyap.descent.worst)));
    out.push_back(make("solvers", c.name + "/prefix_bound", lyap.prefix.passed, ""));
    const auto steps = check_step_conditions(co, *c.p, cfg);
    out.push_back(make("solvers", c.name + "/step_conditions", steps.passed,
                       fmt("worst margin = %.3e", steps.worst)));
    const auto fdesc = check_function_descent(co, *c.p);
    out.push_back(make("solvers", c.name + "/function_descent", fdesc.passed,
                       fmt("worst margin = %.3e", fdesc.worst)));
  }

  {
    SolverConfig cfg;
    const SolverResult r = cocain_bpg(logquad, cfg, Vector::Constant(1, 1.0));
    const double x = std::abs(r.final_point[0]);
    out.push_back(make("solvers", "logquad/converges_to_zero", x < 1e-6, fmt("|x*| = %.3e", x)));

    const SolverResult nb = cocain_bpg_no_backtracking(logquad, cfg, Vector::Constant(1, 1.0));
    bool constant = true;
    for (const auto& t : nb.trace) constant = constant && t.tau == 0.5;
    out.push_back(make("solvers", "logquad/no_backtracking_tau_constant", constant, "tau = 0.5"));

    SolverConfig bad = cfg;
    bad.epsilon = bad.delta;
    bool threw = false;
    try {
      validate(bad, logquad);
    } catch (const std::invalid_argument&) {
      threw = true;
    }
    out.push_back(make("solvers", "config/rejects_eps_ge_delta", threw, ""));
  }

  {
    SolverConfig cfg;
    cfg.delta = 0.6;
    cfg.epsilon = 0.1;
    IterateState st;
    st.x_prev = Vector::Constant(1, 0.0);
    st.x_curr = Vector::Constant(1, 1.0);
    st.tau = 1.0;
    const double g = find_gamma(st, 1.0, cfg, Kernel::euclidean());
    out.push_back(make("solvers", "find_gamma/euclidean_closed_form", g == 0.5,
                       fmt("gamma = %.17g", g)));
  }

  {
    const double L0 = 4.0;
    const auto quad = quadratic_problem(L0);
    SolverConfig cfg;
    cfg.nu_upper = 2.0;
    IterateState st;
    st.x_curr = st.x_prev = Vector::Constant(1, 1.0);
    st.L_bar = L0 / 4.0;
    st.tau = 1.0 / st.L_bar;
    const UpperStep up = upper_backtrack(st, st.x_curr, cfg, quad);
    out.push_back(make("solvers", "upper_backtrack/quadratic_two_escalations",
                       up.ok && up.trials == 2 && up.L_bar == L0,
                       fmt("trials = %g", up.trials) + fmt(", L_bar = %g", up.L_bar)));
  }

  // Negative controls: corrupted traces must fail at the corrupted index.
  {
    SolverConfig cfg;
    const SolverResult co = cocain_bpg(spur, [] {
      SolverConfig c;
      c.L_bar_init = 101.0;
      return c;
    }(), Vector::Constant(2, 2.0));
    cfg.L_bar_init = 101.0;
    const auto lp = lyapunov_params(cfg, spur, co);
    const int j = 3;
    const auto bad = corrupt_inflate_gamma(co, spur, j, 10.0);
    const auto rep = check_lyapunov_descent(bad, spur, lp);
    SuiteCheck c = make("solvers", "negative_control/inflated_gamma",
                        !rep.descent.passed && rep.descent.first_violation == j,
                        fmt("first violation at k = %g", rep.descent.first_violation));
    c.expected_fail = true;
    out.push_back(c);

    const auto lq = cocain_bpg(logquad, SolverConfig{}, Vector::Constant(1, 1.0));
    const auto bad_tau = corrupt_scale_tau(lq, logquad, j, 2.0);
    const auto frep = check_function_descent(bad_tau, logquad);
    SuiteCheck c2 = make("solvers", "negative_control/doubled_tau",
                         !frep.passed && frep.first_violation == j,
                         fmt("first violation at k = %g", frep.first_violation));
    c2.expected_fail = true;
    out.push_back(c2);
  }
  return out;
}

std::vector<SuiteCheck> run_verification(VerifyScope scope, std::uint64_t seed) {
  std::vector<SuiteCheck> out;
  auto append = [&](std::vector<SuiteCheck> v) { out.insert(out.end(), v.begin(), v.end()); };
  if (scope == VerifyScope::Kernels || scope == VerifyScope::All) append(verify_kernels(seed));
  if (scope == VerifyScope::Prox || scope == VerifyScope::All) append(verify_prox(seed));
  if (scope == VerifyScope::Problems || scope == VerifyScope::All) append(verify_problems(seed));
  if (scope == VerifyScope::Solvers || scope == VerifyScope::All) append(verify_solvers(seed));
  return out;
}

bool all_passed(const std::vector<SuiteCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.passed; });
}

std::string format_checks(const std::vector<SuiteCheck>& checks) {
  std::ostringstream os;
  for (const auto& c : checks) {
    os << (c.passed ? "PASS " : "FAIL ") << c.suite << '/' << c.name;
    if (c.expected_fail) os << " (expected fail)";
    if (!c.detail.empty()) os << ": " << c.detail;
    os << '\n';
  }
  return os.str();
}

}  // namespace cocain
