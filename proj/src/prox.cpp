#include "cocain/prox.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cocain {

double solve_monotone_cubic(const CubicProblem& problem) {
  const double s = problem.s;
  const double b = problem.linear_coeff;
  const double c = problem.constant;
  if (!(s >= 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("cubic: cubic coefficient must be finite and >= 0");
  }
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw std::invalid_argument("cubic: linear coefficient must be finite and > 0");
  }
  if (!std::isfinite(c)) throw std::invalid_argument("cubic: constant must be finite");
  if (c == 0.0) return 0.0;
  if (s == 0.0) return -c / b;

  auto p = [&](double t) { return (s * t * t + b) * t + c; };
  auto dp = [&](double t) { return 3.0 * s * t * t + b; };

  // p(0) = c, and each of the two increasing terms alone reaches |c| at
  // |c|/b and cbrt(|c|/s), so the root lies between 0 and the nearer of them.
  const double reach = std::min(std::abs(c) / b, std::cbrt(std::abs(c) / s));
  double lo = c < 0.0 ? 0.0 : -reach;
  double hi = c < 0.0 ? reach : 0.0;

  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double value = p(t);
    if (value == 0.0) return t;
    if (value < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    double next = t - value / dp(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == t || hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * std::abs(t)) {
      break;
    }
    t = next;
  }
  // Return whichever of the final candidates has the smaller residual.
  double best = t;
  for (double cand : {lo, hi}) {
    if (std::abs(p(cand)) < std::abs(p(best))) best = cand;
  }
  return best;
}

Vector soft_threshold(const Vector& y, double theta) {
  if (!(theta >= 0.0)) throw std::invalid_argument("soft_threshold: theta must be >= 0");
  Vector out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double mag = std::max(std::abs(y[i]) - theta, 0.0);
    out[i] = y[i] < 0.0 ? -mag : mag;
  }
  return out;
}

double prox_log1abs(double y, double tau, double center) {
  if (!(tau > 0.0)) throw std::invalid_argument("prox_log1abs: tau must be > 0");
  const double z = y - center;
  const double a = std::abs(z);
  const double disc = (a - 1.0) * (a - 1.0) - 4.0 * (tau - a);
  if (disc < 0.0) return center;

  const double root = std::sqrt(disc);
  const std::array<double, 3> candidates = {0.0, std::max(0.0, 0.5 * (a - 1.0 + root)),
                                            std::max(0.0, 0.5 * (a - 1.0 - root))};
  auto objective = [&](double x) { return std::log1p(x) + (x - a) * (x - a) / (2.0 * tau); };

  double best_x = candidates[0];
  double best_val = objective(best_x);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double x = candidates[i];
    const double val = objective(x);
    if (val < best_val - 1e-12 || (std::abs(val - best_val) <= 1e-12 && x < best_x)) {
      best_x = x;
      best_val = val;
    }
  }
  return center + (z < 0.0 ? -best_x : best_x);
}

double prox_abs_shrink_step(double y, double grad_g_y, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("prox_abs_shrink_step: tau must be > 0");
  const double v = y - tau * grad_g_y;
  const double mag = std::max(0.0, std::abs(v) - tau);
  return v < 0.0 ? -mag : mag;
}

Vector bpg_step_l1_quartic(const Vector& grad_h_y, const Vector& grad_g_y, double tau,
                           double lambda) {
  if (!(tau > 0.0) || !(lambda >= 0.0)) {
    throw std::invalid_argument("bpg_step_l1_quartic: need tau > 0 and lambda >= 0");
  }
  const Vector v = soft_threshold(grad_h_y - tau * grad_g_y, lambda * tau);
  const double t = solve_monotone_cubic({v.squaredNorm(), 1.0, -1.0});
  return t * v;
}

Vector bpg_step_sql2_quartic(const Vector& grad_h_y, const Vector& grad_g_y, double tau,
                             double lambda) {
  if (!(tau > 0.0) || !(lambda >= 0.0)) {
    throw std::invalid_argument("bpg_step_sql2_quartic: need tau > 0 and lambda >= 0");
  }
  const Vector v = tau * grad_g_y - grad_h_y;
  const double t = solve_monotone_cubic({v.squaredNorm(), 2.0 * lambda * tau + 1.0, 1.0});
  return t * v;
}

}  // namespace cocain
