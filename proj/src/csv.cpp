#include "cocain/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace cocain {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_csv(const SolverResult& result, const std::vector<double>& suboptimality,
                      bool stable) {
  if (suboptimality.size() != result.trace.size()) {
    throw std::invalid_argument("trace_csv: suboptimality column has the wrong length");
  }
  std::ostringstream out;
  out << kTraceHeader << '\n';
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    const TraceRecord& t = result.trace[i];
    out << t.k << ',' << format_double(t.psi) << ',' << format_double(suboptimality[i]) << ','
        << format_double(t.tau) << ',' << format_double(t.gamma) << ',' << format_double(t.L_bar)
        << ',' << format_double(t.L_lower) << ',' << format_double(t.dh_prev_curr) << ','
        << format_double(t.dh_curr_y) << ',' << format_double(t.step_norm) << ','
        << t.lower_trials << ',' << t.upper_trials << ',' << (stable ? 0 : t.wall_time_ns)
        << '\n';
  }
  return out.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename into " + path.string());
  }
}

}  // namespace cocain
