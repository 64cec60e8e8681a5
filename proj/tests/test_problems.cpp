#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "cocain/experiment.hpp"
#include "cocain/image.hpp"
#include "cocain/problems.hpp"
#include "doctest.h"

using namespace cocain;

namespace {

Vector v1(double a) { return Vector::Constant(1, a); }
Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

double fd1(const ScalarField& f, double x) { return (f(v1(x + 1e-5)) - f(v1(x - 1e-5))) / 2e-5; }

}  // namespace

TEST_CASE("univariate instances") {
  const auto lq = make_univariate(UnivariateKind::LogQuad);
  CHECK(lq.psi(v1(0)) == 0.0);
  CHECK(lq.g_grad(v1(0))[0] == 0.0);
  CHECK(lq.smad_L == 2.0);

  const auto asc = make_univariate(UnivariateKind::AbsSinCos);
  CHECK(asc.psi(v1(-std::numbers::pi / 2)) == doctest::Approx(0.5708).epsilon(1e-4));
  CHECK(asc.psi_lower_bound == -std::numbers::sqrt2);
  CHECK(asc.smad_L == std::numbers::sqrt2);

  const auto sg = make_univariate(UnivariateKind::Sigmoid);
  CHECK(sg.g_grad(v1(0))[0] == doctest::Approx(-0.25).epsilon(1e-15));
  for (double x : {-30.0, -3.0, -0.5, 0.0, 0.5, 3.0, 30.0}) {
    CHECK(sg.g_grad(v1(x))[0] < 0.0);
    CHECK(sg.g_grad(v1(x))[0] == doctest::Approx(fd1(sg.g_value, x)).epsilon(1e-6));
  }
  // sup |g''| = 1 / (6 sqrt 3) on a fine grid, below the declared 0.1.
  double sup = 0;
  for (double x = -10; x <= 10; x += 1e-3) {
    sup = std::max(sup, std::abs((sg.g_grad(v1(x + 1e-5))[0] - sg.g_grad(v1(x - 1e-5))[0]) / 2e-5));
  }
  CHECK(sup == doctest::Approx(1 / (6 * std::sqrt(3.0))).epsilon(1e-6));
  CHECK(sup < sg.smad_L);
}

TEST_CASE("spurious two-variable instance") {
  const Vector b = v2(1, 1);
  const auto p = make_spurious2d(0.5, 100, b);
  CHECK(p.g_grad(b).norm() == 0.0);
  CHECK(p.f_value(v2(0, 0)) == 0.0);
  CHECK(p.f_value(v2(std::numbers::e - 1, 0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(p.smad_L == 100.0);
  CHECK(p.alpha == -1.0);

  // The log(1 + |x|) term pulls the minimiser slightly off b.
  const Vector xs = spurious_minimizer(0.5, 100, b);
  double best = 1e300, arg = 0;
  for (double t = -2; t <= 2; t += 1e-6) {
    const double f = 0.5 * std::log1p(100 * (t - 1) * (t - 1)) + std::log1p(std::abs(t));
    if (f < best) { best = f; arg = t; }
  }
  CHECK(xs[0] == doctest::Approx(arg).epsilon(1e-6));
  CHECK(xs[0] == doctest::Approx(0.99497).epsilon(1e-5));
  CHECK(p.psi(xs) < p.psi(b));
}

TEST_CASE("phase retrieval instance") {
  const auto data = generate_phase_retrieval(10, 50, 7, 0.0);
  const auto again = generate_phase_retrieval(10, 50, 7, 0.0);
  CHECK(data.A == again.A);
  CHECK(data.b == again.b);
  CHECK(data.x_true.norm() == doctest::Approx(1.0).epsilon(1e-15));
  for (int i = 0; i < 50; ++i) {
    CHECK(data.b[i] == std::max(std::abs(data.A.row(i).dot(data.x_true)), 1e-6));
  }

  const auto p = make_phase_retrieval(data, Regularizer::L1, 0.1);
  CHECK(p.g_value(data.x_true) == 0.0);
  CHECK(p.g_value(Vector::Zero(10)) ==
        doctest::Approx(0.25 * data.b.array().pow(4).sum()).epsilon(1e-14));
  CHECK(p.g_grad(Vector::Zero(10)).norm() == 0.0);
  CHECK(p.kernel.kind() == KernelKind::QuarticPlusQuadratic);

  PhaseRetrievalData one;
  one.A = Eigen::MatrixXd::Zero(1, 2);
  one.A(0, 0) = 1.0;
  one.b = Vector::Constant(1, 1.0);
  one.x_true = v2(1, 0);
  CHECK(phase_retrieval_smad_constant(one) == 4.0);
  CHECK(make_phase_retrieval(one, Regularizer::SqL2, 0.0).smad_L == 4.0);

  const SmadReport r = verify_smad_by_sampling(p, 10000, 3);
  CHECK(r.passed);
  CHECK(r.n_checked == 10000);
}

TEST_CASE("denoising instance") {
  ImageGrid img;
  img.pixels = Grid::Constant(4, 5, 0.3);
  const auto p = make_robust_denoising(img, 10, 1);
  const Vector c = Vector::Constant(20, 0.8);
  CHECK(p.g_value(c) == 0.0);
  CHECK(p.g_grad(c).norm() == 0.0);
  CHECK(p.f_value(img.flatten()) == 0.0);
  CHECK(p.smad_L == 160.0);
  CHECK(p.alpha == -1.0);
  CHECK(make_robust_denoising(img, 2, 3).smad_L == 96.0);
}

TEST_CASE("finite differences") {
  Grid x(2, 2);
  x << 0, 1, 2, 3;
  const auto [d1, d2] = finite_difference(x);
  Grid e1(2, 2), e2(2, 2);
  e1 << 2, 2, 0, 0;
  e2 << 1, 0, 1, 0;
  CHECK(d1 == e1);
  CHECK(d2 == e2);

  const auto [z1, z2] = finite_difference(Grid::Constant(3, 4, 7.0));
  CHECK(z1.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z2.cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  Grid a(5, 5), p(5, 5), q(5, 5);
  for (int i = 0; i < 25; ++i) {
    a.data()[i] = u(rng);
    p.data()[i] = u(rng);
    q.data()[i] = u(rng);
  }
  const auto [da1, da2] = finite_difference(a);
  const double lhs = (da1.array() * p.array()).sum() + (da2.array() * q.array()).sum();
  const double rhs = (a.array() * finite_difference_adjoint(p, q).array()).sum();
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("outlier noise") {
  const ImageGrid clean = make_synthetic_image(10, 10);
  const ImageGrid same = add_outlier_noise(clean, 0.0, 0.3, 1);
  CHECK(same.pixels == clean.pixels);

  const ImageGrid noisy = add_outlier_noise(clean, 1e5, 0.05, 1);
  int changed = 0;
  for (int i = 0; i < 100; ++i) {
    const double d = noisy.pixels.data()[i] - clean.pixels.data()[i];
    if (d != 0.0) {
      ++changed;
      CHECK(std::abs(d) == doctest::Approx(1e5).epsilon(1e-15));
    }
  }
  CHECK(changed == 5);
  CHECK(add_outlier_noise(clean, 1.0, 0.031, 2).pixels != clean.pixels);
  int c2 = 0;
  const auto n2 = add_outlier_noise(clean, 1.0, 0.031, 2);
  for (int i = 0; i < 100; ++i) c2 += n2.pixels.data()[i] != clean.pixels.data()[i];
  CHECK(c2 == 4);  // ceil(3.1)
  CHECK(add_outlier_noise(clean, 1e5, 0.05, 1).pixels == noisy.pixels);
}

TEST_CASE("graymap round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "cocain_pgm_test";
  std::filesystem::create_directories(dir);
  const ImageGrid img = make_synthetic_image(6, 9);
  for (int maxval : {255, 65535}) {
    for (bool plain : {false, true}) {
      const auto path = dir / ("img_" + std::to_string(maxval) + (plain ? "p" : "b") + ".pgm");
      write_pgm(path, img, maxval, plain);
      const ImageGrid back = read_pgm(path);
      CHECK(back.rows() == 6);
      CHECK(back.cols() == 9);
      CHECK((back.pixels - img.pixels).cwiseAbs().maxCoeff() <= 0.5 / maxval + 1e-15);
    }
  }
  CHECK_THROWS(read_pgm(dir / "missing.pgm"));
}

TEST_CASE("smoothness sampling") {
  CompositeProblem quad;
  quad.dim = 2;
  quad.g_value = [](const Vector& x) { return 1.5 * x.squaredNorm(); };
  quad.g_grad = [](const Vector& x) -> Vector { return 3.0 * x; };
  quad.smad_L = 3.0;
  const SmadReport r = verify_smad_by_sampling(quad, 1000, 1);
  CHECK(r.passed);
  CHECK(r.worst_ratio <= 1.0 + 1e-9);

  const auto lq = make_univariate(UnivariateKind::LogQuad);
  CHECK(verify_smad_by_sampling(lq, 10000, 2).passed);
  CHECK_FALSE(verify_smad_by_sampling(lq, 10000, 2, Box{-1, 1}, 1.0).passed);
}
