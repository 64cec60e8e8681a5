#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "cocain/trace.hpp"

namespace cocain {

inline constexpr const char* kTraceHeader =
    "k,psi,suboptimality,tau,gamma,L_bar,L_lower,dh_prev_curr,dh_curr_y,step_norm,"
    "lower_trials,upper_trials,wall_time_ns";

/// 17 significant digits, so parsing gives back the same double.
std::string format_double(double v);

/// One row per trace record. `suboptimality` aligns with the trace; wall
/// times are written as 0 when `stable` is set.
std::string trace_csv(const SolverResult& result, const std::vector<double>& suboptimality,
                      bool stable = false);

/// Writes to a sibling temporary file and renames it into place. Throws
/// std::runtime_error when the directory is not writable.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace cocain
