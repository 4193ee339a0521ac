#include "subfw/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace subfw {

const char* const kTraceCsvHeader =
    "iter,step_kind,gamma,gamma_max,partial_gap,away_gap,full_gap,objective,"
    "support_size,grad_coords_cum";

std::string format_double17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trace_to_csv(const std::vector<TraceRecord>& trace) {
  std::ostringstream out;
  out << kTraceCsvHeader << '\n';
  for (const TraceRecord& r : trace) {
    out << r.iter << ',' << step_kind_name(r.step) << ','
        << format_double17(r.gamma) << ',' << format_double17(r.gamma_max)
        << ',' << format_double17(r.partial_gap) << ','
        << format_double17(r.away_gap) << ',';
    if (r.full_gap) out << format_double17(*r.full_gap);
    out << ',' << format_double17(r.objective) << ',' << r.support_size << ','
        << r.grad_coords_cum << '\n';
  }
  return out.str();
}

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open trace file: " + path);
  out << trace_to_csv(trace);
  if (!out) throw std::runtime_error("failed writing trace file: " + path);
}

}  // namespace subfw
