#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace cocain {

/// One invariant of a property suite. Negative controls are marked
/// expected_fail; for them `passed` means the check failed as designed.
struct SuiteCheck {
  std::string suite;
  std::string name;
  bool passed = false;
  bool expected_fail = false;
  std::string detail;
};

enum class VerifyScope { Kernels, Prox, Problems, Solvers, All };

/// Parses kernels|prox|problems|solvers|all; throws std::invalid_argument.
VerifyScope parse_verify_scope(const std::string& s);

std::vector<SuiteCheck> verify_kernels(std::uint64_t seed = 1);
std::vector<SuiteCheck> verify_prox(std::uint64_t seed = 1);
std::vector<SuiteCheck> verify_problems(std::uint64_t seed = 1);
std::vector<SuiteCheck> verify_solvers(std::uint64_t seed = 1);

std::vector<SuiteCheck> run_verification(VerifyScope scope, std::uint64_t seed = 1);

bool all_passed(const std::vector<SuiteCheck>& checks);

/// "PASS suite/name: detail" lines, with "(expected fail)" on negative controls.
std::string format_checks(const std::vector<SuiteCheck>& checks);

// Independent oracles, shared with the tests.

/// Root of a continuous function that changes sign on [lo, hi], by bisection
/// until the bracket stops shrinking.
double bisect_root(const std::function<double(double)>& fn, double lo, double hi);

/// Smallest objective value of log(1 + |x - center|) + (x - y)^2 / (2 tau) on
/// the grid center +- (|y - center| + 2) with the given step.
double log1abs_grid_min(double y, double tau, double center, double step = 1e-5);

}  // namespace cocain
