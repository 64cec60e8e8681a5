#include "cocain/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "cocain/prox.hpp"

namespace cocain {

namespace {

Vector euclidean_gradient_step(const Vector& grad_h_y, const Vector& grad_g_y, double tau) {
  return grad_h_y - tau * grad_g_y;
}

}  // namespace

CompositeProblem make_univariate(UnivariateKind kind) {
  CompositeProblem p;
  p.dim = 1;
  p.kernel = Kernel::euclidean();
  p.alpha = 0.0;
  p.psi_lower_bound = 0.0;
  p.operating_box = {-15.0, 15.0};
  p.f_value = [](const Vector&) { return 0.0; };
  p.f_prox_step = euclidean_gradient_step;

  switch (kind) {
    case UnivariateKind::LogQuad:
      p.name = "logquad";
      p.g_value = [](const Vector& x) { return std::log1p(x[0] * x[0]); };
      p.g_grad = [](const Vector& x) {
        return Vector::Constant(1, 2.0 * x[0] / (1.0 + x[0] * x[0]));
      };
      p.smad_L = 2.0;  // g'' = 2(1 - x^2)/(1 + x^2)^2 in [-1/4, 2]
      p.known_min = 0.0;
      break;
    case UnivariateKind::Sigmoid:
      p.name = "sigmoid";
      p.g_value = [](const Vector& x) { return 1.0 / (1.0 + std::exp(x[0])); };
      p.g_grad = [](const Vector& x) {
        // -e^x / (1 + e^x)^2 written to stay finite for large |x|.
        const double e = std::exp(-std::abs(x[0]));
        return Vector::Constant(1, -e / ((1.0 + e) * (1.0 + e)));
      };
      p.smad_L = 0.1;  // sup |g''| = 1/(6 sqrt 3)
      break;
    case UnivariateKind::AbsSinCos:
      p.name = "abssincos";
      p.f_value = [](const Vector& x) { return std::abs(x[0]); };
      p.f_prox_step = [](const Vector& grad_h_y, const Vector& grad_g_y, double tau) {
        return Vector::Constant(1, prox_abs_shrink_step(grad_h_y[0], grad_g_y[0], tau));
      };
      p.g_value = [](const Vector& x) { return std::sin(x[0]) + std::cos(x[0]); };
      p.g_grad = [](const Vector& x) {
        return Vector::Constant(1, std::cos(x[0]) - std::sin(x[0]));
      };
      p.smad_L = std::numbers::sqrt2;
      p.psi_lower_bound = -std::numbers::sqrt2;
      p.known_min = std::numbers::pi / 2.0 - 1.0;
      break;
  }
  return p;
}

CompositeProblem make_spurious2d(double lambda, double rho, const Vector& b) {
  if (!(lambda > 0.0) || !(rho > 0.0)) {
    throw std::invalid_argument("spurious2d: lambda and rho must be > 0");
  }
  if (b.size() != 2) throw std::invalid_argument("spurious2d: b must have dimension 2");
  CompositeProblem p;
  p.name = "spurious2d";
  p.dim = 2;
  p.kernel = Kernel::euclidean();
  p.alpha = -1.0;
  p.psi_lower_bound = 0.0;
  p.operating_box = {-3.0, 3.0};
  // sup |d^2/dt^2 lambda log(1 + rho t^2)| = 2 lambda rho, attained at t = 0.
  p.smad_L = 2.0 * lambda * rho;

  p.f_value = [](const Vector& x) {
    double s = 0.0;
    for (double xi : x) s += std::log1p(std::abs(xi));
    return s;
  };
  p.f_prox_step = [](const Vector& grad_h_y, const Vector& grad_g_y, double tau) {
    Vector out(grad_h_y.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      out[i] = prox_log1abs(grad_h_y[i] - tau * grad_g_y[i], tau, 0.0);
    }
    return out;
  };
  p.g_value = [lambda, rho, b](const Vector& x) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double r = x[i] - b[i];
      s += std::log1p(rho * r * r);
    }
    return lambda * s;
  };
  p.g_grad = [lambda, rho, b](const Vector& x) {
    Vector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double r = x[i] - b[i];
      g[i] = 2.0 * lambda * rho * r / (1.0 + rho * r * r);
    }
    return g;
  };
  return p;
}

double phase_retrieval_smad_constant(const PhaseRetrievalData& data) {
  double L = 0.0;
  for (Eigen::Index i = 0; i < data.A.rows(); ++i) {
    const double nrm = data.A.row(i).squaredNorm();  // spectral norm of a a^T
    L += 3.0 * nrm * nrm + nrm * data.b[i] * data.b[i];
  }
  return L;
}

CompositeProblem make_phase_retrieval(const PhaseRetrievalData& data, Regularizer reg,
                                      double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("phase retrieval: lambda must be >= 0");
  if (data.A.rows() < 1 || data.A.rows() != data.b.size()) {
    throw std::invalid_argument("phase retrieval: need m >= 1 rows matching b");
  }
  if ((data.b.array() <= 0.0).any()) {
    throw std::invalid_argument("phase retrieval: measurements must be > 0");
  }
  CompositeProblem p;
  p.dim = static_cast<int>(data.A.cols());
  p.kernel = Kernel::quartic();
  p.alpha = 0.0;
  p.psi_lower_bound = 0.0;
  p.operating_box = {-2.0, 2.0};
  p.smad_L = phase_retrieval_smad_constant(data);

  const Eigen::MatrixXd A = data.A;
  const Vector b2 = data.b.array().square().matrix();
  p.g_value = [A, b2](const Vector& x) {
    const Vector r = (A * x).array().square().matrix() - b2;
    return 0.25 * r.squaredNorm();
  };
  p.g_grad = [A, b2](const Vector& x) {
    const Vector ax = A * x;
    const Vector w = ((ax.array().square() - b2.array()) * ax.array()).matrix();
    return Vector(A.transpose() * w);
  };

  if (reg == Regularizer::L1) {
    p.name = "phase_l1";
    p.f_value = [lambda](const Vector& x) { return lambda * x.lpNorm<1>(); };
    p.f_prox_step = [lambda](const Vector& grad_h_y, const Vector& grad_g_y, double tau) {
      return bpg_step_l1_quartic(grad_h_y, grad_g_y, tau, lambda);
    };
  } else {
    p.name = "phase_sql2";
    p.f_value = [lambda](const Vector& x) { return lambda * x.squaredNorm(); };
    p.f_prox_step = [lambda](const Vector& grad_h_y, const Vector& grad_g_y, double tau) {
      return bpg_step_sql2_quartic(grad_h_y, grad_g_y, tau, lambda);
    };
  }
  return p;
}

PhaseRetrievalData generate_phase_retrieval(int d, int m, std::uint64_t seed,
                                            double noise_std) {
  if (d < 1 || m < 1) throw std::invalid_argument("phase retrieval: need d, m >= 1");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("phase retrieval: noise_std < 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  PhaseRetrievalData data;
  data.A.resize(m, d);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < d; ++j) data.A(i, j) = normal(rng);
  }
  data.x_true.resize(d);
  for (int j = 0; j < d; ++j) data.x_true[j] = normal(rng);
  data.x_true /= data.x_true.norm();

  data.b = (data.A * data.x_true).cwiseAbs();
  if (noise_std > 0.0) {
    for (int i = 0; i < m; ++i) data.b[i] += noise_std * normal(rng);
  }
  data.b = data.b.cwiseMax(1e-6);
  return data;
}

CompositeProblem make_robust_denoising(const ImageGrid& image, double lambda, double rho,
                                       DataTerm data_term) {
  if (!(lambda > 0.0) || !(rho > 0.0)) {
    throw std::invalid_argument("denoising: lambda and rho must be > 0");
  }
  const int rows = image.rows();
  const int cols = image.cols();
  if (rows < 2 || cols < 2) throw std::invalid_argument("denoising: image must be >= 2x2");

  CompositeProblem p;
  p.dim = rows * cols;
  p.kernel = Kernel::euclidean();
  p.psi_lower_bound = 0.0;
  p.smad_L = 16.0 * lambda * rho;
  p.operating_box = {-1.0, 2.0 * std::max(1.0, image.pixels.maxCoeff())};

  const Vector b = image.flatten();
  p.g_value = [lambda, rho, rows, cols](const Vector& x) {
    const auto [d1, d2] = finite_difference(Eigen::Map<const Grid>(x.data(), rows, cols));
    return lambda * (rho * (d1.array().square() + d2.array().square())).log1p().sum();
  };
  p.g_grad = [lambda, rho, rows, cols](const Vector& x) {
    const auto [d1, d2] = finite_difference(Eigen::Map<const Grid>(x.data(), rows, cols));
    const Grid w =
        (2.0 * lambda * rho) / (1.0 + rho * (d1.array().square() + d2.array().square()));
    const Grid grad = finite_difference_adjoint(w.cwiseProduct(d1), w.cwiseProduct(d2));
    return Vector(Eigen::Map<const Vector>(grad.data(), grad.size()));
  };

  switch (data_term) {
    case DataTerm::LogRobust:
      p.name = "denoise";
      p.alpha = -1.0;
      p.f_value = [b](const Vector& x) { return (x - b).cwiseAbs().array().log1p().sum(); };
      p.f_prox_step = [b](const Vector& grad_h_y, const Vector& grad_g_y, double tau) {
        Vector out(b.size());
        for (Eigen::Index i = 0; i < out.size(); ++i) {
          out[i] = prox_log1abs(grad_h_y[i] - tau * grad_g_y[i], tau, b[i]);
        }
        return out;
      };
      break;
    case DataTerm::L1:
      p.name = "denoise_l1";
      p.alpha = 0.0;
      p.f_value = [b](const Vector& x) { return (x - b).lpNorm<1>(); };
      p.f_prox_step = [b](const Vector& grad_h_y, const Vector& grad_g_y, double tau) {
        return Vector(b + soft_threshold(grad_h_y - tau * grad_g_y - b, tau));
      };
      break;
    case DataTerm::SqL2:
      p.name = "denoise_sql2";
      p.alpha = 1.0;
      p.f_value = [b](const Vector& x) { return 0.5 * (x - b).squaredNorm(); };
      p.f_prox_step = [b](const Vector& grad_h_y, const Vector& grad_g_y, double tau) {
        return Vector((grad_h_y - tau * grad_g_y + tau * b) / (1.0 + tau));
      };
      break;
  }
  return p;
}

SmadReport verify_smad_by_sampling(const CompositeProblem& problem, int n_segments,
                                   std::uint64_t seed, std::optional<Box> box,
                                   std::optional<double> L_override) {
  if (n_segments < 1) throw std::invalid_argument("smad check: n_segments < 1");
  const Box region = box.value_or(problem.operating_box);
  const double L = L_override.value_or(problem.smad_L);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(region.lo, region.hi);
  // Half the segments are short so that local curvature is probed too.
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double width = region.hi - region.lo;

  SmadReport report;
  Vector x(problem.dim);
  Vector y(problem.dim);
  for (int s = 0; s < n_segments; ++s) {
    for (int i = 0; i < problem.dim; ++i) y[i] = coord(rng);
    const double radius = (s % 2 == 0) ? width : width * 1e-2;
    for (int i = 0; i < problem.dim; ++i) {
      x[i] = std::clamp(y[i] + radius * unit(rng), region.lo, region.hi);
    }
    const double gap =
        problem.g_value(x) - problem.g_value(y) - problem.g_grad(y).dot(x - y);
    const double bound = L * problem.kernel.distance(x, y);
    ++report.n_checked;
    if (bound > 0.0) report.worst_ratio = std::max(report.worst_ratio, std::abs(gap) / bound);
    if (std::abs(gap) > bound + 1e-9) report.passed = false;
  }
  return report;
}

}  // namespace cocain
