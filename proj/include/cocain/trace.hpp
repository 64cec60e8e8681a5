#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cocain/bregman.hpp"

namespace cocain {

/// One row per iteration k. The iterate x^k enters, the parameters chosen at
/// iteration k are recorded; psi and the distances refer to x^k, x^{k-1} and
/// y^k. The final row of a run describes the last iterate and carries no
/// extrapolation (gamma = 0, y = x).
struct TraceRecord {
  int k = 0;
  double psi = 0.0;           // Psi(x^k)
  double tau = 0.0;           // tau_k
  double tau_prev = 0.0;      // tau_{k-1}
  double gamma = 0.0;         // gamma_k
  double L_bar = 0.0;         // majorant parameter of iteration k
  double L_lower = 0.0;       // minorant parameter of iteration k
  double dh_prev_curr = 0.0;  // D_h(x^{k-1}, x^k)
  double dh_curr_y = 0.0;     // D_h(x^k, y^k)
  double step_norm = 0.0;     // |x^k - x^{k-1}|
  int lower_trials = 0;
  int upper_trials = 0;
  std::int64_t wall_time_ns = 0;

  /// Field-wise equality ignoring wall time.
  bool same_numbers(const TraceRecord& other) const;
};

enum class Termination { MaxIters, StepTol, BacktrackFailure, NonFinite };

const char* to_string(Termination t);

struct SolverResult {
  std::string solver;
  Vector final_point;
  std::vector<TraceRecord> trace;
  Termination termination = Termination::MaxIters;
  std::string message;
  /// x^0, x^1, ..., x^N when iterate storage is on (x^0 == x^1).
  std::vector<Vector> iterates;
  /// y^k aligned with trace rows when iterate storage is on.
  std::vector<Vector> extrapolated;

  bool failed() const {
    return termination == Termination::BacktrackFailure || termination == Termination::NonFinite;
  }
  const Vector& iterate(int k) const { return iterates.at(static_cast<std::size_t>(k)); }
};

}  // namespace cocain
