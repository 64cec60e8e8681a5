#include <cmath>
#include <random>

#include "cocain/bregman.hpp"
#include "cocain/prox.hpp"
#include "cocain/verification.hpp"
#include "doctest.h"

using namespace cocain;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

double cubic_bisect(double s, double b, double c, double lo, double hi) {
  return bisect_root([&](double t) { return s * t * t * t + b * t + c; }, lo, hi);
}

double log1abs_obj(double x, double y, double tau, double c) {
  return std::log1p(std::abs(x - c)) + (x - y) * (x - y) / (2 * tau);
}

}  // namespace

TEST_CASE("monotone cubic") {
  CHECK(solve_monotone_cubic({0.0, 1.0, -1.0}) == 1.0);
  const double t1 = solve_monotone_cubic({1.0, 1.0, -1.0});
  CHECK(t1 == doctest::Approx(cubic_bisect(1, 1, -1, 0, 1)).epsilon(1e-14));
  CHECK(t1 == doctest::Approx(0.682327803828).epsilon(1e-11));
  const double t2 = solve_monotone_cubic({4.0, 3.0, 1.0});
  CHECK(t2 == doctest::Approx(cubic_bisect(4, 3, 1, -1, 0)).epsilon(1e-14));
  CHECK(t2 == doctest::Approx(-0.298036).epsilon(1e-6));

  CHECK_THROWS_AS(solve_monotone_cubic({-1.0, 1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(solve_monotone_cubic({1.0, 0.0, -1.0}), std::invalid_argument);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> us(0.0, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double s = us(rng);
    const double t = solve_monotone_cubic({s, 1.0, -1.0});
    CHECK(t > 0.0);
    CHECK(t <= 1.0);
    CHECK(std::abs(s * t * t * t + t - 1.0) < 1e-12);
  }
}

TEST_CASE("soft threshold") {
  CHECK(soft_threshold(v2(3, -1), 1.0) == v2(2, 0));
  CHECK(soft_threshold(v2(0.7, -4), 0.0) == v2(0.7, -4));
  CHECK(soft_threshold(v2(0.5, -2.5), 1.5) == v2(0, -1));
}

TEST_CASE("prox of log(1 + |x - c|)") {
  CHECK(prox_log1abs(1.7, 0.3, 1.7) == 1.7);
  CHECK(prox_log1abs(0.2, 2.0, 0.0) == 0.0);

  // Grid oracle on [-1, 5], then compare objective values.
  double best = 1e300, arg = 0;
  for (double x = -1.0; x <= 5.0; x += 1e-5) {
    const double f = log1abs_obj(x, 3.0, 0.5, 0.0);
    if (f < best) { best = f; arg = x; }
  }
  const double x = prox_log1abs(3.0, 0.5, 0.0);
  CHECK(x == doctest::Approx(arg).epsilon(1e-4));
  CHECK(x == doctest::Approx(2.8708).epsilon(1e-4));
  CHECK(log1abs_obj(x, 3.0, 0.5, 0.0) <= best + 1e-12);

  // Translation: the shifted problem is the centred one moved by c.
  CHECK(prox_log1abs(3.0 + 2.5, 0.5, 2.5) == doctest::Approx(x + 2.5).epsilon(1e-14));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> uy(-5, 5), ut(1e-3, 3), uc(-1, 1);
  for (int i = 0; i < 50; ++i) {
    const double y = uy(rng), tau = ut(rng), c = uc(rng);
    const double p = prox_log1abs(y, tau, c);
    CHECK(log1abs_obj(p, y, tau, c) <= log1abs_grid_min(y, tau, c) + 1e-6);
  }
}

TEST_CASE("shrink step for |x|") {
  CHECK(prox_abs_shrink_step(0.0, 0.0, 0.7) == 0.0);
  CHECK(prox_abs_shrink_step(2.0, 0.0, 0.5) == 1.5);
  CHECK(prox_abs_shrink_step(1.0, 3.0, 0.5) == 0.0);
}

TEST_CASE("quartic l1 step") {
  CHECK(bpg_step_l1_quartic(v2(0.5, -0.5), v2(0, 0), 1.0, 1.0).norm() == 0.0);
  const Vector x = bpg_step_l1_quartic(v2(2, 0), v2(0, 0), 1.0, 1.0);
  CHECK(x[0] == doctest::Approx(cubic_bisect(1, 1, -1, 0, 1)).epsilon(1e-14));
  CHECK(x[1] == 0.0);

  const Vector gh = v2(1.3, -0.4), gg = v2(0.2, 0.9);
  const Vector p = bpg_step_l1_quartic(gh, gg, 0.7, 0.0);
  const Vector dir = gh - 0.7 * gg;
  CHECK(std::abs(p[0] * dir[1] - p[1] * dir[0]) < 1e-15);
  CHECK(p.dot(dir) > 0.0);

  // First-order optimality with the l1 subdifferential.
  const Kernel h = Kernel::quartic();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3), ut(0.01, 3), ul(0, 2);
  for (int i = 0; i < 200; ++i) {
    Vector a(4), b(4);
    for (int j = 0; j < 4; ++j) { a[j] = u(rng); b[j] = u(rng); }
    const double tau = ut(rng), lam = ul(rng);
    const Vector xp = bpg_step_l1_quartic(a, b, tau, lam);
    const Vector r = tau * b + h.grad(xp) - a;
    for (int j = 0; j < 4; ++j) {
      if (xp[j] != 0.0) {
        CHECK(std::abs(r[j] + tau * lam * (xp[j] > 0 ? 1 : -1)) < 1e-8);
      } else {
        CHECK(std::abs(r[j]) <= tau * lam + 1e-8);
      }
    }
  }
}

TEST_CASE("quartic squared l2 step") {
  // tau grad g = grad h: zero argument, zero output.
  CHECK(bpg_step_sql2_quartic(v2(1, 2), v2(2, 4), 0.5, 1.0).norm() == 0.0);

  // |tau g - grad h| = 2 and lambda tau = 1: 4 t^3 + 3 t + 1 = 0.
  const Vector gh = v2(2, 0), gg = v2(0, 0);
  const Vector x = bpg_step_sql2_quartic(gh, gg, 1.0, 1.0);
  const double t = cubic_bisect(4, 3, 1, -1, 0);
  CHECK(x[0] == doctest::Approx(t * -2.0).epsilon(1e-14));

  const Vector x0 = bpg_step_sql2_quartic(v2(1, 0), v2(0, 0), 1.0, 0.0);
  CHECK(x0[0] == doctest::Approx(-cubic_bisect(1, 1, 1, -1, 0)).epsilon(1e-14));
  CHECK(cubic_bisect(1, 1, 1, -1, 0) == doctest::Approx(-0.682328).epsilon(1e-6));

  const Kernel h = Kernel::quartic();
  const Vector a = v2(0.3, -2.0), b = v2(1.1, 0.4);
  const Vector p = bpg_step_sql2_quartic(a, b, 0.8, 0.6);
  const Vector r = 2 * 0.6 * 0.8 * p + 0.8 * b + h.grad(p) - a;
  CHECK(r.cwiseAbs().maxCoeff() < 1e-12);
}
