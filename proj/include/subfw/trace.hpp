#ifndef SUBFW_TRACE_HPP
#define SUBFW_TRACE_HPP

#include <optional>
#include <string>
#include <vector>

#include "subfw/active_set.hpp"

namespace subfw {

// Per-iteration telemetry. Gaps and the objective are measured at x_t, the
// iterate the recorded step starts from; grad_coords_cum counts every
// gradient coordinate evaluated up to and including iteration t.
struct TraceRecord {
  long iter = 0;
  StepKind step = StepKind::FW;
  double gamma = 0.0;
  double gamma_max = 1.0;
  double partial_gap = 0.0;
  double away_gap = 0.0;
  std::optional<double> full_gap;
  double objective = 0.0;
  int support_size = 1;
  long long grad_coords_cum = 0;

  // Diagnostics kept in memory only, not part of the CSV contract.
  double dir_dot = 0.0;          // <-grad f, d_t>
  double gamma_unclipped = 0.0;  // variant-2 ratio before clipping
  std::string atom_key;          // atom the step moved toward or away from
};

// CSV header is part of the external contract, floats use 17 significant
// digits, full_gap is empty except at checkpoint rows.
extern const char* const kTraceCsvHeader;

std::string format_double17(double v);
void write_trace_csv(const std::string& path,
                     const std::vector<TraceRecord>& trace);
std::string trace_to_csv(const std::vector<TraceRecord>& trace);

}  // namespace subfw

#endif
