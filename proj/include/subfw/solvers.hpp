#ifndef SUBFW_SOLVERS_HPP
#define SUBFW_SOLVERS_HPP

#include <optional>
#include <string>
#include <vector>

#include "subfw/active_set.hpp"
#include "subfw/domains.hpp"
#include "subfw/objectives.hpp"
#include "subfw/trace.hpp"

namespace subfw {

enum class Algorithm { FW, RFW_V1, RFW_V2, AFW, RAFW };

const char* algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(const std::string& name);

struct SolverConfig {
  Algorithm algorithm = Algorithm::FW;
  SubsampleSpec subsample = SubsampleSpec::rate(1.0);
  long max_iters = 1000;
  // Stop once the full FW gap at a checkpoint is <= tolerance; <= 0 runs to
  // max_iters.
  double tolerance = 0.0;
  int checkpoint_k = 2;
  std::optional<double> curvature;  // required by RFW_V2
  std::uint64_t seed = 0;
};

struct GapReport {
  double partial_gap = 0.0;              // <-grad, s_t - v_t>
  double away_gap = 0.0;                 // <-grad, x_t - v_t>
  std::optional<double> pairwise_gap;    // <-grad, full_atom - v_t>
  std::optional<double> full_fw_gap;     // <-grad, full_atom - x_t>
};

GapReport compute_gaps(const std::vector<double>& gradient, const Atom& s_t,
                       const Atom& v_t, const std::vector<double>& x_t,
                       const Atom* full_atom = nullptr);

struct SolveResult {
  ActiveSet final_set;
  std::vector<TraceRecord> trace;
  bool converged = false;
  long iterations = 0;
};

// Default start: the single atom returned by one full LMO at x = 0, charged
// at full gradient cost.
ActiveSet default_x0(ObjectiveModel& obj, const DomainOracle& domain,
                     long long* grad_coords_charged = nullptr);

// Full checkpoint period: k * floor(1/eta) iterations.
long checkpoint_period(const SolverConfig& config, const DomainOracle& domain);

SolveResult run_solver(ObjectiveModel& obj, const DomainOracle& domain,
                       const SolverConfig& config, const ActiveSet& x0,
                       long long initial_grad_coords = 0);

// True iff every iteration of a RAFW trace satisfied the descent-direction
// guarantee <-grad, d_t> >= g_t / 2 >= 0 (within eps).
bool max_step_progress_check(const std::vector<TraceRecord>& trace,
                             double eps = 1e-12);

// One RAFW iteration evaluated at a frozen state without mutating it; used
// by the probabilistic verification.
struct RafwProbe {
  Atom s_t;
  Atom v_t;
  double partial_gap = 0.0;
  double away_gap = 0.0;
  bool fw_step = false;
  double gamma_max = 0.0;
  double gamma = 0.0;
  int z = 1;
};

RafwProbe rafw_probe(ObjectiveModel& obj, const DomainOracle& domain,
                     const ActiveSet& state, long p, Rng& rng);

}  // namespace subfw

#endif
