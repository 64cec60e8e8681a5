#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cocain/solvers.hpp"

namespace cocain {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat sections of key = value lines. '#' and ';' start comments; keys
/// outside any section land in "".
///
///   [problem]
///   name = phase_retrieval
///   [solver.bpg_wb]
///   L_bar_init = 4
class IniConfig {
 public:
  static IniConfig parse(std::istream& in, const std::string& origin = "<input>");
  static IniConfig load(const std::filesystem::path& path);

  /// "section.key=value"; the section is everything before the last dot.
  void apply_override(const std::string& assignment);
  void set(const std::string& section, const std::string& key, const std::string& value);

  bool has(const std::string& section, const std::string& key) const;
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long get_int(const std::string& section, const std::string& key, long fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  /// Comma-separated list with surrounding blanks trimmed.
  std::vector<std::string> get_list(const std::string& section, const std::string& key,
                                    const std::vector<std::string>& fallback) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// Applies [solver] and then [solver.<name>] on top of `base`. Unknown keys in
/// those sections are a ConfigError.
SolverConfig solver_config_from(const IniConfig& ini, const std::string& solver_name,
                                SolverConfig base);

/// Comma-separated reals, e.g. "1, -2.5".
std::vector<double> parse_real_list(const std::string& s);

}  // namespace cocain
