#include "cocain/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace cocain {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, const std::string& what) {
  double out = 0.0;
  const char* first = v.data();
  const char* last = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ConfigError(what + ": not a number: '" + v + "'");
  return out;
}

}  // namespace

IniConfig IniConfig::parse(std::istream& in, const std::string& origin) {
  IniConfig cfg;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section");
      }
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.sections_[section][key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

IniConfig IniConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return parse(in, path.string());
}

void IniConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--set expects section.key=value: " + assignment);
  const std::string lhs = trim(assignment.substr(0, eq));
  const auto dot = lhs.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == lhs.size()) {
    throw ConfigError("--set expects section.key=value: " + assignment);
  }
  set(lhs.substr(0, dot), lhs.substr(dot + 1), trim(assignment.substr(eq + 1)));
}

void IniConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = value;
}

bool IniConfig::has(const std::string& section, const std::string& key) const {
  return get(section, key).has_value();
}

std::optional<std::string> IniConfig::get(const std::string& section,
                                          const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

std::string IniConfig::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
  return get(section, key).value_or(fallback);
}

double IniConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
  const auto v = get(section, key);
  return v ? to_double(*v, section + "." + key) : fallback;
}

long IniConfig::get_int(const std::string& section, const std::string& key, long fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  long out = 0;
  auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size()) {
    throw ConfigError(section + "." + key + ": not an integer: '" + *v + "'");
  }
  return out;
}

bool IniConfig::get_bool(const std::string& section, const std::string& key,
                         bool fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw ConfigError(section + "." + key + ": not a boolean: '" + *v + "'");
}

std::vector<std::string> IniConfig::get_list(const std::string& section, const std::string& key,
                                             const std::vector<std::string>& fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  std::vector<std::string> out;
  std::stringstream ss(*v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(item, "list"));
  }
  return out;
}

SolverConfig solver_config_from(const IniConfig& ini, const std::string& solver_name,
                                SolverConfig base) {
  static const std::set<std::string> known{
      "delta",         "epsilon",        "nu_lower",         "nu_upper",    "L_bar_init",
      "lower_seed",    "lower_seed_value", "lower_seed_decay", "lower_floor", "gamma_cap",
      "max_backtracks", "max_iters",     "stop_tol",         "freeze_after", "beta"};
  for (const std::string& section : {std::string("solver"), "solver." + solver_name}) {
    const auto it = ini.sections().find(section);
    if (it == ini.sections().end()) continue;
    for (const auto& [key, value] : it->second) {
      if (!known.count(key)) throw ConfigError("unknown key " + section + "." + key);
    }
    base.delta = ini.get_double(section, "delta", base.delta);
    base.epsilon = ini.get_double(section, "epsilon", base.epsilon);
    base.nu_lower = ini.get_double(section, "nu_lower", base.nu_lower);
    base.nu_upper = ini.get_double(section, "nu_upper", base.nu_upper);
    base.L_bar_init = ini.get_double(section, "L_bar_init", base.L_bar_init);
    base.lower_floor = ini.get_double(section, "lower_floor", base.lower_floor);
    base.gamma_cap = ini.get_double(section, "gamma_cap", base.gamma_cap);
    base.max_backtracks =
        static_cast<int>(ini.get_int(section, "max_backtracks", base.max_backtracks));
    base.max_iters = static_cast<int>(ini.get_int(section, "max_iters", base.max_iters));
    base.stop_tol = ini.get_double(section, "stop_tol", base.stop_tol);
    if (ini.has(section, "freeze_after")) {
      base.freeze_after = static_cast<int>(ini.get_int(section, "freeze_after", 0));
    }
    base.lower_seed.value = ini.get_double(section, "lower_seed_value", base.lower_seed.value);
    base.lower_seed.decay = ini.get_double(section, "lower_seed_decay", base.lower_seed.decay);
    if (const auto pol = ini.get(section, "lower_seed")) {
      if (*pol == "constant") {
        base.lower_seed.policy = LowerSeed::Policy::Constant;
      } else if (*pol == "previous") {
        base.lower_seed.policy = LowerSeed::Policy::PreviousIterate;
      } else if (*pol == "fraction") {
        base.lower_seed.policy = LowerSeed::Policy::FractionOfUpper;
      } else {
        throw ConfigError(section + ".lower_seed: expected constant|previous|fraction");
      }
    }
  }
  return base;
}

}  // namespace cocain
