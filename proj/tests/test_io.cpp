#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cocain/config.hpp"
#include "cocain/csv.hpp"
#include "cocain/experiment.hpp"
#include "doctest.h"

using namespace cocain;

namespace {

IniConfig parse(const std::string& text) {
  std::istringstream in(text);
  return IniConfig::parse(in);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TEST_CASE("ini parsing") {
  const auto ini = parse(
      "top = 1\n"
      "[problem]\n"
      "name = phase_retrieval   # trailing comment\n"
      "; full comment\n"
      "lambda=0.1\n"
      "[run]\n"
      "solvers = cocain, bpg_wb ,ipiano\n"
      "fail_on_backtrack = yes\n");
  CHECK(ini.get_string("", "top", "") == "1");
  CHECK(ini.get_string("problem", "name", "") == "phase_retrieval");
  CHECK(ini.get_double("problem", "lambda", 0) == 0.1);
  CHECK(ini.get_double("problem", "missing", 7.5) == 7.5);
  CHECK(ini.get_list("run", "solvers", {}) == std::vector<std::string>{"cocain", "bpg_wb", "ipiano"});
  CHECK(ini.get_bool("run", "fail_on_backtrack", false));
  CHECK_FALSE(ini.has("run", "seed"));

  CHECK_THROWS_AS(parse("[open\n"), ConfigError);
  CHECK_THROWS_AS(parse("[a]\nnovalue\n"), ConfigError);
  CHECK_THROWS_AS(parse("[a]\n= 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[a]\nx = abc\n").get_double("a", "x", 0), ConfigError);
  CHECK_THROWS_AS(parse("[a]\nx = 1.5\n").get_int("a", "x", 0), ConfigError);
  CHECK_THROWS_AS(parse("[a]\nx = maybe\n").get_bool("a", "x", false), ConfigError);
  CHECK_THROWS_AS(IniConfig::load("/nonexistent/cocain.ini"), ConfigError);
}

TEST_CASE("overrides") {
  auto ini = parse("[solver.bpg_wb]\nL_bar_init = 4\n");
  ini.apply_override("solver.bpg_wb.L_bar_init=8");
  ini.apply_override("run.seed = 3");
  CHECK(ini.get_double("solver.bpg_wb", "L_bar_init", 0) == 8.0);
  CHECK(ini.get_int("run", "seed", 0) == 3);
  CHECK_THROWS_AS(ini.apply_override("noequals"), ConfigError);
  CHECK_THROWS_AS(ini.apply_override("nodot=1"), ConfigError);
  CHECK_THROWS_AS(ini.apply_override(".key=1"), ConfigError);
  CHECK(parse_real_list(" 1, -2.5 ,3e2") == std::vector<double>{1.0, -2.5, 300.0});
  CHECK_THROWS_AS(parse_real_list("1,x"), ConfigError);
}

TEST_CASE("solver config from sections") {
  const auto ini = parse(
      "[solver]\n"
      "max_iters = 50\n"
      "lower_seed = constant\n"
      "lower_seed_value = 0.1\n"
      "[solver.bpg_wb]\n"
      "L_bar_init = 4\n"
      "max_iters = 70\n");
  const auto wb = solver_config_from(ini, "bpg_wb", SolverConfig{});
  CHECK(wb.max_iters == 70);
  CHECK(wb.L_bar_init == 4.0);
  CHECK(wb.lower_seed.policy == LowerSeed::Policy::Constant);
  const auto co = solver_config_from(ini, "cocain", SolverConfig{});
  CHECK(co.max_iters == 50);
  CHECK(co.L_bar_init == 1.0);
  CHECK_FALSE(co.freeze_after.has_value());

  CHECK_THROWS_AS(solver_config_from(parse("[solver]\nbogus = 1\n"), "cocain", {}), ConfigError);
  CHECK_THROWS_AS(solver_config_from(parse("[solver]\nlower_seed = often\n"), "cocain", {}),
                  ConfigError);
  CHECK(solver_config_from(parse("[solver]\nfreeze_after = 4\n"), "cocain", {}).freeze_after == 4);
}

TEST_CASE("solver names") {
  for (const char* n : {"cocain", "cocain_nobt", "cocain_cfi", "bpg_wb", "bpg_fixed", "ipiano"}) {
    CHECK(std::string(solver_name(parse_solver(n))) == n);
  }
  CHECK_THROWS(parse_solver("nope"));
}

TEST_CASE("trace csv") {
  CHECK(std::stod(format_double(0.1)) == 0.1);
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);

  const auto lq = make_univariate(UnivariateKind::LogQuad);
  const auto r = cocain_bpg(lq, SolverConfig{}, Vector::Constant(1, 2.0));
  const auto s = summarize(r, 0.0);
  const std::string text = trace_csv(r, s.suboptimality, true);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == kTraceHeader);
  const std::size_t columns = split(line).size();
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    REQUIRE(cells.size() == columns);
    CHECK(std::stoi(cells[0]) == r.trace[row].k);
    CHECK(std::stod(cells[1]) == r.trace[row].psi);
    CHECK(std::stod(cells[3]) == r.trace[row].tau);
    CHECK(cells.back() == "0");
    ++row;
  }
  CHECK(row == r.trace.size());
  CHECK_THROWS_AS(trace_csv(r, {}, true), std::invalid_argument);
}

TEST_CASE("atomic write") {
  const auto dir = std::filesystem::temp_directory_path() / "cocain_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "second\n");
  CHECK_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  CHECK_THROWS_AS(write_file_atomic(dir / "no" / "such" / "dir.txt", "x"), std::runtime_error);
}

TEST_CASE("bundles are deterministic across thread counts") {
  const PhaseSetup ps;
  const auto p = make_phase_retrieval(generate_phase_retrieval(ps.d, ps.m, ps.seed, 0), Regularizer::L1, ps.lambda);
  SolverConfig c = phase_config();
  c.max_iters = 100;
  const auto specs = phase_solvers(c);
  const Bundle one = run_bundle(p, specs, phase_start(ps), 1);
  const Bundle four = run_bundle(p, specs, phase_start(ps), 4);
  REQUIRE(one.runs.size() == specs.size());
  CHECK(one.reference == four.reference);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CHECK(one.runs[i].name == four.runs[i].name);
    CHECK(one.runs[i].result.final_point == four.runs[i].result.final_point);
    CHECK(one.runs[i].summary.final_psi == four.runs[i].summary.final_psi);
  }
  CHECK(one.at("cocain").result.solver == "cocain");
  CHECK_THROWS(one.at("missing"));
}
