#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>

#include <Eigen/Core>

namespace cocain {

using Vector = Eigen::VectorXd;

/// Throws std::invalid_argument unless every entry of x is finite.
void require_finite(const Vector& x, const char* what);

enum class KernelKind { Euclidean, QuarticPlusQuadratic };

/// Kernel generating distance h with full domain.
///
///   Euclidean:             h(x) = 1/2 |x|^2
///   QuarticPlusQuadratic:  h(x) = 1/4 |x|^4 + 1/2 |x|^2
///
/// Both kernels are 1-strongly convex. Every member is a pure function of its
/// arguments, so a Kernel may be shared freely between threads.
class Kernel {
 public:
  static Kernel euclidean() { return Kernel(KernelKind::Euclidean); }
  static Kernel quartic() { return Kernel(KernelKind::QuarticPlusQuadratic); }

  KernelKind kind() const { return kind_; }
  double sigma() const { return 1.0; }
  const char* name() const;

  double value(const Vector& x) const;
  Vector grad(const Vector& x) const;

  /// <a, Hess h(x) a>.
  double hess_quadratic_form(const Vector& x, const Vector& a) const;

  /// Hess h(x) a, without forming the matrix. The quartic Hessian is
  /// (|x|^2 + 1) I + 2 x x^T.
  Vector hess_vector(const Vector& x, const Vector& a) const;

  /// Second-order Taylor coefficient 1/2 <a, Hess h(x) a>. For the quartic
  /// kernel this is <a,x>^2 + 1/2 |x|^2 |a|^2 + 1/2 |a|^2 and obeys
  ///   second_order_term(x, a) <= 3/2 |x|^2 |a|^2 + 1/2 |a|^2.
  double second_order_term(const Vector& x, const Vector& a) const;

  /// D_h(x, y) = h(x) - h(y) - <grad h(y), x - y>.
  double distance(const Vector& x, const Vector& y) const;

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  explicit Kernel(KernelKind kind) : kind_(kind) {}
  KernelKind kind_;
};

double h_value(const Kernel& kernel, const Vector& x);
Vector h_grad(const Kernel& kernel, const Vector& x);
double hess_quadratic_form(const Kernel& kernel, const Vector& x, const Vector& a);
double bregman_distance(const Kernel& kernel, const Vector& x, const Vector& y);

/// D_h(x,z) - D_h(x,y) - D_h(y,z) - <grad h(y) - grad h(z), x - y>.
/// Identically zero; exists so tests can probe rounding behaviour.
double three_points_gap(const Kernel& kernel, const Vector& x, const Vector& y,
                        const Vector& z);

using PointPair = std::pair<Vector, Vector>;

/// Min over the sampled pairs of D_h(x,y) / D_h(y,x). Pairs with x == y are
/// skipped; throws std::invalid_argument if nothing is left.
double symmetry_coefficient_estimate(const Kernel& kernel,
                                     std::span<const PointPair> samples);

/// Same, drawing n_samples pairs from a generator.
double symmetry_coefficient_estimate(const Kernel& kernel,
                                     const std::function<PointPair()>& sampler,
                                     int n_samples);

}  // namespace cocain
