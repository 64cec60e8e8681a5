#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "cocain/bregman.hpp"
#include "cocain/image.hpp"

namespace cocain {

/// Axis-aligned box used by the sampling checks, the same bounds in every
/// coordinate.
struct Box {
  double lo = -1.0;
  double hi = 1.0;
};

/// Solves argmin_u f(u) + <grad g(y), u - y> + D_h(u, y) / tau given
/// grad h(y) and grad g(y).
using ProxStep = std::function<Vector(const Vector& grad_h_y, const Vector& grad_g_y, double tau)>;
using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;

/// Additive composite problem min f(x) + g(x) with f prox-friendly, g smooth
/// adaptable relative to the kernel. Immutable once built.
struct CompositeProblem {
  std::string name;
  int dim = 0;
  Kernel kernel = Kernel::euclidean();
  ScalarField f_value;
  ProxStep f_prox_step;
  ScalarField g_value;
  VectorField g_grad;
  double smad_L = 1.0;           // L h - g and L h + g convex
  double alpha = 0.0;            // f - alpha/2 |.|^2 convex
  double psi_lower_bound = 0.0;  // finite lower bound on f + g
  Box operating_box;
  std::optional<double> known_min;  // global minimum value, when known

  double psi(const Vector& x) const { return f_value(x) + g_value(x); }
};

enum class UnivariateKind { LogQuad, Sigmoid, AbsSinCos };

CompositeProblem make_univariate(UnivariateKind kind);

/// lambda sum log(1 + rho (x_i - b_i)^2) + sum log(1 + |x_i|) in two variables.
CompositeProblem make_spurious2d(double lambda, double rho, const Vector& b);

struct PhaseRetrievalData {
  Eigen::MatrixXd A;  // m x d, rows are the sampling vectors
  Vector b;           // measurements, all > 0
  Vector x_true;
};

enum class Regularizer { L1, SqL2 };

/// g(x) = 1/4 sum (<a_i,x>^2 - b_i^2)^2 under the quartic kernel with
/// f = lambda |x|_1 (L1) or f = lambda |x|^2 (SqL2).
CompositeProblem make_phase_retrieval(const PhaseRetrievalData& data, Regularizer reg,
                                      double lambda);

/// Gaussian sampling vectors, unit-norm Gaussian ground truth,
/// b_i = max(|<a_i, x_true>| + noise, 1e-6). Deterministic in seed.
PhaseRetrievalData generate_phase_retrieval(int d, int m, std::uint64_t seed,
                                            double noise_std);

/// Sum of 3 |a_i a_i^T|^2 + |a_i a_i^T| b_i^2 with the spectral norm.
double phase_retrieval_smad_constant(const PhaseRetrievalData& data);

enum class DataTerm { LogRobust, L1, SqL2 };

/// g(x) = lambda sum log(1 + rho |(Dx)_ij|^2) with the forward-difference
/// operator D; f is the data term against the observed image:
///   LogRobust: sum log(1 + |x_ij - b_ij|)
///   L1:        sum |x_ij - b_ij|
///   SqL2:      1/2 sum (x_ij - b_ij)^2
CompositeProblem make_robust_denoising(const ImageGrid& image, double lambda, double rho,
                                       DataTerm data_term = DataTerm::LogRobust);

struct SmadReport {
  bool passed = true;
  double worst_ratio = 0.0;  // max |g(x)-g(y)-<grad g(y),x-y>| / (L D_h(x,y))
  int n_checked = 0;
};

/// Samples segments in the problem's operating box (or the given one) and
/// checks |g(x) - g(y) - <grad g(y), x - y>| <= L D_h(x, y) + 1e-9.
SmadReport verify_smad_by_sampling(const CompositeProblem& problem, int n_segments,
                                   std::uint64_t seed, std::optional<Box> box = std::nullopt,
                                   std::optional<double> L_override = std::nullopt);

}  // namespace cocain
