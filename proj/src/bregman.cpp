#include "cocain/bregman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cocain {

void require_finite(const Vector& x, const char* what) {
  if (!x.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

namespace {

void require_same_dim(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()));
  }
}

}  // namespace

const char* Kernel::name() const {
  return kind_ == KernelKind::Euclidean ? "euclidean" : "quartic";
}

double Kernel::value(const Vector& x) const {
  const double sq = x.squaredNorm();
  if (kind_ == KernelKind::Euclidean) return 0.5 * sq;
  return 0.25 * sq * sq + 0.5 * sq;
}

Vector Kernel::grad(const Vector& x) const {
  if (kind_ == KernelKind::Euclidean) return x;
  return (x.squaredNorm() + 1.0) * x;
}

double Kernel::hess_quadratic_form(const Vector& x, const Vector& a) const {
  require_same_dim(x, a);
  const double aa = a.squaredNorm();
  if (kind_ == KernelKind::Euclidean) return aa;
  const double ax = a.dot(x);
  return (x.squaredNorm() + 1.0) * aa + 2.0 * ax * ax;
}

Vector Kernel::hess_vector(const Vector& x, const Vector& a) const {
  require_same_dim(x, a);
  if (kind_ == KernelKind::Euclidean) return a;
  return (x.squaredNorm() + 1.0) * a + (2.0 * x.dot(a)) * x;
}

double Kernel::second_order_term(const Vector& x, const Vector& a) const {
  return 0.5 * hess_quadratic_form(x, a);
}

double Kernel::distance(const Vector& x, const Vector& y) const {
  require_same_dim(x, y);
  const Vector diff = x - y;
  const double dd = diff.squaredNorm();
  if (kind_ == KernelKind::Euclidean) return 0.5 * dd;
  // 1/4 |x|^4 part rearranged into a sum of non-negative terms:
  //   1/4 (|x|^2 - |y|^2)^2 + 1/2 |y|^2 |x - y|^2
  const double norm_gap = diff.dot(x + y);
  return 0.25 * norm_gap * norm_gap + 0.5 * y.squaredNorm() * dd + 0.5 * dd;
}

double h_value(const Kernel& kernel, const Vector& x) { return kernel.value(x); }

Vector h_grad(const Kernel& kernel, const Vector& x) { return kernel.grad(x); }

double hess_quadratic_form(const Kernel& kernel, const Vector& x, const Vector& a) {
  return kernel.hess_quadratic_form(x, a);
}

double bregman_distance(const Kernel& kernel, const Vector& x, const Vector& y) {
  return kernel.distance(x, y);
}

double three_points_gap(const Kernel& kernel, const Vector& x, const Vector& y,
                        const Vector& z) {
  require_same_dim(x, y);
  require_same_dim(y, z);
  return kernel.distance(x, z) - kernel.distance(x, y) - kernel.distance(y, z) -
         (kernel.grad(y) - kernel.grad(z)).dot(x - y);
}

double symmetry_coefficient_estimate(const Kernel& kernel,
                                     std::span<const PointPair> samples) {
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (const auto& [x, y] : samples) {
    require_same_dim(x, y);
    if (x == y) continue;
    const double forward = kernel.distance(x, y);
    const double backward = kernel.distance(y, x);
    if (!(forward > 0.0) || !(backward > 0.0)) continue;  // underflow
    any = true;
    // The infimum runs over ordered pairs, so both orientations count.
    // Euclidean distances are symmetric bit for bit, giving exactly 1.
    best = std::min({best, forward / backward, backward / forward});
  }
  if (!any) {
    throw std::invalid_argument("symmetry estimate: every sampled pair is degenerate");
  }
  return best;
}

double symmetry_coefficient_estimate(const Kernel& kernel,
                                     const std::function<PointPair()>& sampler,
                                     int n_samples) {
  if (n_samples < 1) throw std::invalid_argument("symmetry estimate: n_samples < 1");
  std::vector<PointPair> pairs;
  pairs.reserve(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) pairs.push_back(sampler());
  return symmetry_coefficient_estimate(kernel, pairs);
}

}  // namespace cocain
