#include <cmath>
#include <random>

#include "cocain/bregman.hpp"
#include "doctest.h"

using namespace cocain;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

Vector random_vec(std::mt19937_64& rng, int d, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(d);
  for (int i = 0; i < d; ++i) v[i] = u(rng);
  return v;
}

}  // namespace

TEST_CASE("kernel values") {
  CHECK(h_value(Kernel::euclidean(), v2(0, 0)) == 0.0);
  CHECK(h_value(Kernel::quartic(), v2(1, 0)) == doctest::Approx(0.75).epsilon(1e-15));
  // 1/4 * 25 + 1/2 * 5
  CHECK(h_value(Kernel::quartic(), v2(1, 2)) == doctest::Approx(8.75).epsilon(1e-15));
}

TEST_CASE("kernel gradients") {
  const Kernel q = Kernel::quartic();
  CHECK(h_grad(q, v2(1, 0)) == v2(2, 0));
  CHECK(h_grad(q, v2(1, 1)) == v2(3, 3));
  CHECK(h_grad(q, v2(0, 0)).norm() == 0.0);
  CHECK(h_grad(Kernel::euclidean(), v2(0, 0)).norm() == 0.0);

  std::mt19937_64 rng(5);
  for (const Kernel& h : {Kernel::euclidean(), Kernel::quartic()}) {
    for (int s = 0; s < 200; ++s) {
      const Vector x = random_vec(rng, 4, 2.0);
      Vector fd(4);
      for (int i = 0; i < 4; ++i) {
        Vector xp = x, xm = x;
        xp[i] += 1e-5;
        xm[i] -= 1e-5;
        fd[i] = (h.value(xp) - h.value(xm)) / 2e-5;
      }
      const Vector g = h.grad(x);
      CHECK((g - fd).norm() / std::max(1.0, g.norm()) < 1e-6);
    }
  }
}

TEST_CASE("hessian quadratic form") {
  const Kernel q = Kernel::quartic();
  CHECK(hess_quadratic_form(Kernel::euclidean(), v2(3, -1), v2(1, 0)) == 1.0);
  // <a,x>^2 + 1/2 |x|^2 |a|^2 + 1/2 |a|^2
  CHECK(q.second_order_term(v2(1, 0), v2(1, 0)) == 2.0);
  CHECK(q.second_order_term(v2(1, 0), v2(0, 1)) == 1.0);
  CHECK(q.second_order_term(v2(1, 0), v2(0, 1)) <= 1.5 + 0.5);

  std::mt19937_64 rng(6);
  for (int s = 0; s < 10000; ++s) {
    const Vector x = random_vec(rng, 3, 3.0);
    const Vector a = random_vec(rng, 3, 3.0);
    CHECK(q.second_order_term(x, a) <=
          1.5 * x.squaredNorm() * a.squaredNorm() + 0.5 * a.squaredNorm() + 1e-10);
  }
  // Exact form against a difference quotient of the gradient.
  for (int s = 0; s < 100; ++s) {
    const Vector x = random_vec(rng, 3, 2.0);
    const Vector a = random_vec(rng, 3, 2.0);
    const double t = 1e-6;
    const double fd = a.dot(q.grad(x + t * a) - q.grad(x - t * a)) / (2 * t);
    CHECK(q.hess_quadratic_form(x, a) == doctest::Approx(fd).epsilon(1e-7));
    CHECK(q.hess_vector(x, a).dot(a) == doctest::Approx(q.hess_quadratic_form(x, a)).epsilon(1e-14));
  }
}

TEST_CASE("bregman distance") {
  const Kernel q = Kernel::quartic();
  CHECK(bregman_distance(q, v2(0.3, 1), v2(0.3, 1)) == 0.0);
  CHECK(bregman_distance(Kernel::euclidean(), v2(1, 0), v2(0, 0)) == 0.5);
  // 0.75 - 0.75 - <(0,2), (1,-1)>
  CHECK(bregman_distance(q, v2(1, 0), v2(0, 1)) == doctest::Approx(2.0).epsilon(1e-15));

  std::mt19937_64 rng(7);
  for (int s = 0; s < 2000; ++s) {
    const Vector x = random_vec(rng, 3, 4.0), y = random_vec(rng, 3, 4.0);
    const double d = q.distance(x, y);
    CHECK(d >= -1e-12);
    CHECK(d >= 0.5 * (x - y).squaredNorm() - 1e-10);
    // Naive definition as an oracle.
    const double naive = q.value(x) - q.value(y) - q.grad(y).dot(x - y);
    CHECK(d == doctest::Approx(naive).epsilon(1e-9).scale(std::max(1.0, q.value(x))));
  }
}

TEST_CASE("three points identity") {
  const Kernel q = Kernel::quartic();
  CHECK(three_points_gap(q, v2(1, 2), v2(1, 2), v2(1, 2)) == 0.0);
  CHECK(three_points_gap(Kernel::euclidean(), v2(1, 0), v2(0, 1), v2(1, 1)) == 0.0);
  std::mt19937_64 rng(8);
  for (int s = 0; s < 1000; ++s) {
    const Vector x = random_vec(rng, 4, 2.0), y = random_vec(rng, 4, 2.0), z = random_vec(rng, 4, 2.0);
    const double scale = std::max(1.0, std::pow(x.norm(), 4) + std::pow(y.norm(), 4) + std::pow(z.norm(), 4));
    CHECK(std::abs(three_points_gap(q, x, y, z)) < 1e-10 * scale);
  }
}

TEST_CASE("symmetry coefficient") {
  std::mt19937_64 rng(9);
  auto sampler = [&] { return PointPair{random_vec(rng, 3, 5.0), random_vec(rng, 3, 5.0)}; };
  CHECK(symmetry_coefficient_estimate(Kernel::euclidean(), sampler, 500) == 1.0);

  const std::vector<PointPair> one{{v2(1, 0), v2(0, 0)}};
  // 0.75 / 1.25
  CHECK(symmetry_coefficient_estimate(Kernel::quartic(), one) == doctest::Approx(0.6).epsilon(1e-15));

  const std::vector<PointPair> both{{v2(1, 2), v2(-1, 0)}, {v2(-1, 0), v2(1, 2)}};
  CHECK(symmetry_coefficient_estimate(Kernel::quartic(), both) <= 1.0);

  const std::vector<PointPair> degenerate{{v2(1, 1), v2(1, 1)}};
  CHECK_THROWS_AS(symmetry_coefficient_estimate(Kernel::quartic(), degenerate), std::invalid_argument);

  std::vector<PointPair> pairs;
  for (int s = 0; s < 300; ++s) pairs.push_back(sampler());
  const Kernel q = Kernel::quartic();
  const double a = symmetry_coefficient_estimate(q, pairs);
  for (const auto& [x, y] : pairs) {
    CHECK(a * q.distance(x, y) <= q.distance(y, x) + 1e-12);
    CHECK(q.distance(y, x) <= q.distance(x, y) / a + 1e-10);
  }
}

TEST_CASE("non-finite input is rejected") {
  Vector x = v2(1, 0);
  x[1] = std::nan("");
  CHECK_THROWS_AS(require_finite(x, "x"), std::invalid_argument);
}
