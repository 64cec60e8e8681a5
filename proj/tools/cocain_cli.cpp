// cocain: experiment runner and verification entry point.
//
//   cocain run --config exp.ini --out results
//   cocain sweep --solvers cocain,ipiano,bpg_wb
//   cocain spurious
//   cocain denoise --synthetic
//   cocain verify --scope prox
//
// Exit codes: 0 success, 2 configuration or I/O error, 3 solver failure,
// 4 verification failure.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cocain/config.hpp"
#include "cocain/csv.hpp"
#include "cocain/diagnostics.hpp"
#include "cocain/experiment.hpp"
#include "cocain/verification.hpp"

namespace fs = std::filesystem;
using namespace cocain;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;
constexpr int kVerifyFailure = 4;

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> iters;
  std::string out = "cocain_out";
  std::vector<std::string> sets;
  int jobs = 1;
  bool compare = false;
};

IniConfig load_config(const Common& c) {
  IniConfig ini;
  if (!c.config_path.empty()) ini = IniConfig::load(c.config_path);
  for (const auto& s : c.sets) ini.apply_override(s);
  return ini;
}

fs::path output_dir(const Common& c, const IniConfig& ini) {
  fs::path dir = c.out;
  if (c.out == "cocain_out") dir = ini.get_string("run", "out", c.out);
  if (const char* env = std::getenv("COCAIN_OUT"); env && *env) dir = env;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
  return dir;
}

std::uint64_t seed_of(const Common& c, const IniConfig& ini, const std::string& section) {
  if (c.seed) return *c.seed;
  return static_cast<std::uint64_t>(ini.get_int(section, "seed", ini.get_int("run", "seed", 1)));
}

std::string metadata_line(const Common& c) {
  if (c.compare) return "";
  const std::time_t now = std::time(nullptr);
  char buf[64];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string("# generated ") + buf + "\n";
}

std::vector<SolverSpec> build_specs(const IniConfig& ini, const Common& c,
                                    const std::vector<std::string>& names,
                                    const SolverConfig& base) {
  std::vector<SolverSpec> specs;
  for (const auto& n : names) {
    SolverSpec s;
    try {
      s.kind = parse_solver(n);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    s.config = solver_config_from(ini, n, base);
    if (c.iters) s.config.max_iters = *c.iters;
    s.ipiano_beta = ini.get_double("solver." + n, "beta", ini.get_double("run", "ipiano_beta", 0.7));
    if (ini.has("run", "fixed_L")) s.fixed_L = ini.get_double("run", "fixed_L", 0.0);
    specs.push_back(s);
  }
  return specs;
}

Vector vector_from(const std::string& text, int dim, const std::string& what) {
  const auto v = parse_real_list(text);
  if (static_cast<int>(v.size()) != dim) {
    throw ConfigError(what + ": expected " + std::to_string(dim) + " values");
  }
  return Eigen::Map<const Vector>(v.data(), dim);
}

DataTerm parse_data_term(const std::string& s) {
  if (s == "log") return DataTerm::LogRobust;
  if (s == "l1") return DataTerm::L1;
  if (s == "sql2") return DataTerm::SqL2;
  throw ConfigError("data_term: expected log|l1|sql2");
}

DenoiseSetup denoise_setup(const IniConfig& ini, const Common& c) {
  DenoiseSetup d;
  d.rows = static_cast<int>(ini.get_int("denoise", "rows", d.rows));
  d.cols = static_cast<int>(ini.get_int("denoise", "cols", d.cols));
  if (const auto img = ini.get("denoise", "image")) d.image = *img;
  d.magnitude = ini.get_double("denoise", "magnitude", d.magnitude);
  d.fraction = ini.get_double("denoise", "fraction", d.fraction);
  d.background_std = ini.get_double("denoise", "background_std", d.background_std);
  d.lambda = ini.get_double("denoise", "lambda", d.lambda);
  d.rho = ini.get_double("denoise", "rho", d.rho);
  d.data_term = parse_data_term(ini.get_string("denoise", "data_term", "log"));
  d.seed = seed_of(c, ini, "denoise");
  return d;
}

PhaseSetup phase_setup(const IniConfig& ini, const Common& c) {
  PhaseSetup p;
  p.d = static_cast<int>(ini.get_int("problem", "d", p.d));
  p.m = static_cast<int>(ini.get_int("problem", "m", p.m));
  p.noise = ini.get_double("problem", "noise", p.noise);
  p.lambda = ini.get_double("problem", "lambda", p.lambda);
  p.x0_scale = ini.get_double("problem", "x0_scale", p.x0_scale);
  const std::string reg = ini.get_string("problem", "reg", "l1");
  if (reg == "l1") {
    p.reg = Regularizer::L1;
  } else if (reg == "sql2") {
    p.reg = Regularizer::SqL2;
  } else {
    throw ConfigError("problem.reg: expected l1|sql2");
  }
  p.seed = seed_of(c, ini, "problem");
  return p;
}

std::string summary_text(const Bundle& b, const Common& c, const CompositeProblem& problem,
                         const std::vector<SolverSpec>& specs) {
  std::ostringstream os;
  os << metadata_line(c);
  os << "problem = " << b.problem << '\n';
  os << "reference = " << format_double(b.reference) << '\n';
  for (std::size_t i = 0; i < b.runs.size(); ++i) {
    const auto& r = b.runs[i];
    const auto& s = r.summary;
    os << "\n[" << r.name << "]\n";
    os << "termination = " << s.termination << '\n';
    os << "iterations = " << s.iterations << '\n';
    os << "final_psi = " << format_double(s.final_psi) << '\n';
    os << "best_psi = " << format_double(s.best_psi) << '\n';
    os << "final_suboptimality = " << format_double(s.final_suboptimality) << '\n';
    os << "total_backtracks = " << s.total_backtracks << '\n';
    const bool certified = specs[i].kind == SolverKind::CoCaIn ||
                           specs[i].kind == SolverKind::CoCaInCfi ||
                           specs[i].kind == SolverKind::CoCaInNoBacktracking;
    if (certified && !r.result.iterates.empty()) {
      const auto lp = lyapunov_params(specs[i].config, problem, r.result);
      const auto lyap = check_lyapunov_descent(r.result, problem, lp);
      os << "lyapunov_descent = " << (lyap.descent.passed ? "pass" : "fail") << '\n';
      os << "prefix_bound = " << (lyap.prefix.passed ? "pass" : "fail") << '\n';
    }
  }
  return os.str();
}

int write_bundle(const fs::path& dir, const std::string& stem, const Bundle& b, const Common& c,
                 const CompositeProblem& problem, const std::vector<SolverSpec>& specs,
                 bool fail_on_backtrack) {
  int code = kOk;
  for (const auto& r : b.runs) {
    write_file_atomic(dir / (stem + "_" + r.name + ".csv"),
                      trace_csv(r.result, r.summary.suboptimality, c.compare));
    std::cout << r.name << ": final psi " << format_double(r.summary.final_psi)
              << ", suboptimality " << format_double(r.summary.final_suboptimality) << " ("
              << r.summary.termination << ")\n";
    if (r.result.failed() && fail_on_backtrack) {
      std::cerr << r.name << ": " << r.result.message << '\n';
      code = kSolverFailure;
    }
  }
  write_file_atomic(dir / (stem + "_summary.txt"), summary_text(b, c, problem, specs));
  return code;
}

int cmd_run(const Common& c) {
  const IniConfig ini = load_config(c);
  const fs::path dir = output_dir(c, ini);
  const std::string name = ini.get_string("problem", "name", "");
  if (name.empty()) throw ConfigError("problem.name is required");
  const bool fail_on_backtrack = ini.get_bool("run", "fail_on_backtrack", true);
  const int jobs = static_cast<int>(ini.get_int("run", "jobs", c.jobs));

  CompositeProblem problem;
  Vector x0;
  SolverConfig base;
  std::vector<std::string> solvers = ini.get_list("run", "solvers", {"cocain"});
  if (name == "logquad" || name == "sigmoid" || name == "abssincos") {
    problem = make_univariate(name == "logquad"   ? UnivariateKind::LogQuad
                              : name == "sigmoid" ? UnivariateKind::Sigmoid
                                                  : UnivariateKind::AbsSinCos);
    x0 = vector_from(ini.get_string("problem", "x0", "1"), 1, "problem.x0");
    base = single_start_config();
  } else if (name == "spurious2d") {
    const Vector b = vector_from(ini.get_string("problem", "b", "1,1"), 2, "problem.b");
    problem = make_spurious2d(ini.get_double("problem", "lambda", 0.5),
                              ini.get_double("problem", "rho", 100.0), b);
    x0 = vector_from(ini.get_string("problem", "x0", "2,2"), 2, "problem.x0");
    base = spurious_config();
  } else if (name == "phase_retrieval") {
    const PhaseSetup ps = phase_setup(ini, c);
    problem = make_phase_retrieval(generate_phase_retrieval(ps.d, ps.m, ps.seed, ps.noise), ps.reg,
                                   ps.lambda);
    x0 = phase_start(ps);
    base = phase_config();
    if (!ini.has("run", "solvers")) solvers = {"cocain", "cocain_cfi", "bpg_wb", "bpg_fixed"};
  } else if (name == "denoise") {
    const DenoiseSetup ds = denoise_setup(ini, c);
    const ImageGrid clean = ds.image ? read_pgm(*ds.image) : make_synthetic_image(ds.rows, ds.cols);
    const ImageGrid noisy = add_outlier_noise(clean, ds.magnitude, ds.fraction, ds.seed, ds.background_std);
    problem = make_robust_denoising(noisy, ds.lambda, ds.rho, ds.data_term);
    x0 = noisy.flatten().cwiseMax(0.0).cwiseMin(1.0);
    base = denoise_config();
  } else {
    throw ConfigError("unknown problem: " + name);
  }

  const auto specs = build_specs(ini, c, solvers, base);
  Bundle b;
  try {
    b = run_bundle(problem, specs, x0, jobs);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return write_bundle(dir, problem.name, b, c, problem, specs, fail_on_backtrack);
}

int cmd_sweep(const Common& c, const std::string& kind_name, int n, double lo, double hi,
              const std::vector<std::string>& solver_names) {
  const IniConfig ini = load_config(c);
  const fs::path dir = output_dir(c, ini);
  const std::string kname = ini.get_string("sweep", "kind", kind_name);
  UnivariateKind kind;
  if (kname == "logquad") {
    kind = UnivariateKind::LogQuad;
  } else if (kname == "sigmoid") {
    kind = UnivariateKind::Sigmoid;
  } else if (kname == "abssincos") {
    kind = UnivariateKind::AbsSinCos;
  } else {
    throw ConfigError("sweep.kind: expected logquad|sigmoid|abssincos");
  }
  n = static_cast<int>(ini.get_int("sweep", "n_starts", n));
  lo = ini.get_double("sweep", "lo", lo);
  hi = ini.get_double("sweep", "hi", hi);
  if (n < 2) throw ConfigError("sweep needs at least 2 starts");
  const auto names = ini.get_list("sweep", "solvers", solver_names);
  const auto specs = build_specs(ini, c, names, sweep_config());
  const auto rows = sweep_univariate(kind, n, lo, hi, specs);

  std::ostringstream csv, summary;
  csv << "solver,start,final_psi\n";
  summary << metadata_line(c) << "kind = " << kname << "\nn_starts = " << n << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.starts.size(); ++i) {
      csv << r.solver << ',' << format_double(r.starts[i]) << ',' << format_double(r.finals[i]) << '\n';
    }
    summary << "\n[" << r.solver << "]\naverage_final_psi = " << format_double(r.average)
            << "\nglobal_min_count = " << r.global_count << '\n';
    std::cout << r.solver << ": average final psi " << r.average << ", reached global minimum from "
              << r.global_count << " of " << n << " starts\n";
  }
  write_file_atomic(dir / "sweep.csv", csv.str());
  write_file_atomic(dir / "sweep_summary.txt", summary.str());
  return kOk;
}

int cmd_spurious(const Common& c, const std::vector<std::string>& start_args) {
  const IniConfig ini = load_config(c);
  const fs::path dir = output_dir(c, ini);
  const double lambda = ini.get_double("spurious", "lambda", 0.5);
  const double rho = ini.get_double("spurious", "rho", 100.0);
  const Vector b = vector_from(ini.get_string("spurious", "b", "1,1"), 2, "spurious.b");
  std::vector<Vector> starts;
  std::vector<std::string> texts = start_args;
  if (texts.empty()) {
    if (const auto s = ini.get("spurious", "starts")) {
      std::stringstream ss(*s);
      std::string item;
      while (std::getline(ss, item, ';')) texts.push_back(item);
    }
  }
  for (const auto& t : texts) starts.push_back(vector_from(t, 2, "start"));
  if (starts.empty()) starts = default_spurious_starts();

  SolverConfig cfg = solver_config_from(ini, "cocain", spurious_config());
  if (c.iters) cfg.max_iters = *c.iters;
  const auto outcomes = run_spurious(lambda, rho, b, starts, cfg);
  const Vector xstar = spurious_minimizer(lambda, rho, b);

  std::ostringstream summary;
  summary << metadata_line(c) << "lambda = " << format_double(lambda) << "\nrho = "
          << format_double(rho) << "\nminimizer = " << format_double(xstar[0]) << ','
          << format_double(xstar[1]) << '\n';
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    const auto& x = o.result.final_point;
    const auto s = summarize(o.result, o.result.trace.empty() ? 0.0 : o.result.trace.back().psi);
    write_file_atomic(dir / ("spurious_" + std::to_string(i) + ".csv"),
                      trace_csv(o.result, s.suboptimality, c.compare));
    summary << "\n[start " << i << "]\nstart = " << format_double(o.start[0]) << ','
            << format_double(o.start[1]) << "\nfinal = " << format_double(x[0]) << ','
            << format_double(x[1]) << "\ndistance_to_b = " << format_double(o.distance_to_b)
            << "\ndistance_to_minimizer = " << format_double(o.distance_to_minimizer) << '\n';
    std::cout << "start (" << o.start[0] << ", " << o.start[1] << ") -> (" << x[0] << ", " << x[1]
              << "), |x - b| = " << o.distance_to_b << ", |x - x*| = " << o.distance_to_minimizer
              << '\n';
  }
  write_file_atomic(dir / "spurious_summary.txt", summary.str());
  return kOk;
}

int cmd_denoise(const Common& c, const std::string& image, const std::vector<std::string>& names) {
  IniConfig ini = load_config(c);
  if (!image.empty()) ini.set("denoise", "image", image);
  const fs::path dir = output_dir(c, ini);
  const DenoiseSetup ds = denoise_setup(ini, c);
  const auto solvers = ini.get_list("denoise", "solvers", names);
  const auto specs = build_specs(ini, c, solvers, denoise_config());
  DenoiseOutcome out;
  try {
    out = run_denoise(ds, specs, c.jobs);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  write_pgm(dir / "clean.pgm", out.clean);
  write_pgm(dir / "noisy.pgm", out.noisy);
  const CompositeProblem problem = make_robust_denoising(out.noisy, ds.lambda, ds.rho, ds.data_term);
  for (const auto& r : out.bundle.runs) {
    write_pgm(dir / ("denoise_" + r.name + ".pgm"),
              ImageGrid::from_flat(r.result.final_point, out.clean.rows(), out.clean.cols()));
  }
  return write_bundle(dir, "denoise", out.bundle, c, problem, specs, true);
}

int cmd_verify(const std::string& scope) {
  VerifyScope s;
  try {
    s = parse_verify_scope(scope);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto checks = run_verification(s);
  std::cout << format_checks(checks);
  const bool ok = all_passed(checks);
  std::cout << (ok ? "all checks passed\n" : "verification FAILED\n");
  return ok ? kOk : kVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inertial Bregman proximal gradient experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  std::uint64_t seed = 0;
  int iters = 0;
  app.add_option("--config", common.config_path, "Configuration file (INI sections)");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");
  auto* iters_opt = app.add_option("--iters", iters, "Iteration budget for every solver");
  app.add_option("--out", common.out, "Output directory (COCAIN_OUT overrides)");
  app.add_option("--set", common.sets, "Override section.key=value (repeatable)");
  app.add_option("--jobs", common.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
  app.add_flag("--compare", common.compare, "Byte-stable output (no timings, no timestamps)");

  auto* run = app.add_subcommand("run", "Run the configured problem with each solver");

  auto* sweep = app.add_subcommand("sweep", "Univariate sweep over equidistant starts");
  std::string kind = "abssincos";
  int n_starts = 100;
  double lo = -15.0, hi = 15.0;
  std::vector<std::string> sweep_solvers{"cocain", "ipiano", "bpg_wb"};
  sweep->add_option("--kind", kind, "logquad|sigmoid|abssincos");
  sweep->add_option("--starts", n_starts, "Number of starts");
  sweep->add_option("--lo", lo);
  sweep->add_option("--hi", hi);
  sweep->add_option("--solvers", sweep_solvers)->delimiter(',');

  auto* spurious = app.add_subcommand("spurious", "Two-variable problem with spurious points");
  std::vector<std::string> starts;
  spurious->add_option("--start", starts, "Start point \"x,y\" (repeatable)");

  auto* denoise = app.add_subcommand("denoise", "Robust denoising of a corrupted image");
  std::string image;
  bool synthetic = false;
  std::vector<std::string> denoise_names{"cocain", "bpg_wb", "bpg_fixed"};
  denoise->add_option("--image", image, "Portable graymap to corrupt and restore");
  denoise->add_flag("--synthetic", synthetic, "Use the built-in synthetic image");
  denoise->add_option("--solvers", denoise_names)->delimiter(',');

  auto* verify = app.add_subcommand("verify", "Run the property suites");
  std::string scope = "all";
  verify->add_option("--scope", scope, "kernels|prox|problems|solvers|all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  if (*seed_opt) common.seed = seed;
  if (*iters_opt) common.iters = iters;

  try {
    if (*run) return cmd_run(common);
    if (*sweep) return cmd_sweep(common, kind, n_starts, lo, hi, sweep_solvers);
    if (*spurious) return cmd_spurious(common, starts);
    if (*denoise) return cmd_denoise(common, synthetic ? "" : image, denoise_names);
    if (*verify) return cmd_verify(scope);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kOk;
}
