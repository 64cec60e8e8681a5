#pragma once

#include "cocain/bregman.hpp"

namespace cocain {

/// s t^3 + linear_coeff t + constant = 0 with s >= 0 and linear_coeff > 0,
/// so the left side is strictly increasing in t and the real root is unique.
struct CubicProblem {
  double s = 0.0;
  double linear_coeff = 1.0;
  double constant = -1.0;
};

/// Unique real root of a monotone cubic. Bracketing plus safeguarded Newton;
/// throws std::invalid_argument when s < 0 or linear_coeff <= 0.
double solve_monotone_cubic(const CubicProblem& problem);

/// Coordinatewise max(|y_i| - theta, 0) sgn(y_i).
Vector soft_threshold(const Vector& y, double theta);

/// argmin_x log(1 + |x - center|) + (x - y)^2 / (2 tau).
///
/// The centred problem is solved in closed form: with a = |y - center| the
/// stationarity condition on x > 0 is x^2 + (1 - a) x + (tau - a) = 0, so the
/// candidates are 0 and the clipped roots of that quadratic. Ties go to the
/// candidate nearest the center.
double prox_log1abs(double y, double tau, double center = 0.0);

/// Euclidean prox of |.| after a gradient step:
///   max(0, |y - tau g| - tau) sgn(y - tau g).
double prox_abs_shrink_step(double y, double grad_g_y, double tau);

/// Bregman prox-gradient step for f = lambda |x|_1 under the quartic kernel:
/// v = S_{lambda tau}(grad_h_y - tau grad_g_y), x = t v where t > 0 solves
/// t^3 |v|^2 + t - 1 = 0.
Vector bpg_step_l1_quartic(const Vector& grad_h_y, const Vector& grad_g_y, double tau,
                           double lambda);

/// Bregman prox-gradient step for f = lambda |x|^2 under the quartic kernel:
/// x = t (tau grad_g_y - grad_h_y) where t solves
/// t^3 |tau grad_g_y - grad_h_y|^2 + (2 lambda tau + 1) t + 1 = 0 (t < 0).
Vector bpg_step_sql2_quartic(const Vector& grad_h_y, const Vector& grad_g_y, double tau,
                             double lambda);

}  // namespace cocain
