#ifndef SUBFW_VERIFY_HPP
#define SUBFW_VERIFY_HPP

#include <functional>
#include <optional>
#include <vector>

#include "subfw/solvers.hpp"

namespace subfw {

// Inputs for the convergence-rate bounds. The geometric constants have no
// general computation procedure; when needed they are supplied by the
// caller (measured fits are labeled as such, never treated as ground truth).
struct ConvergenceBoundInputs {
  double curvature = 0.0;      // upper bound on C_f or C_f^A
  double eta = 1.0;            // subsampling rate in (0, 1]
  double initial_gap = 0.0;    // f(x_0) - f(x*)
  std::optional<double> geometric_ratio;  // rho in (0,1)
  int initial_support = 1;     // s = |S_0|
};

// 2 (C + eps_0) / (eta T + 2)
double theorem1_bound(const ConvergenceBoundInputs& inputs, long T);
// (1 - eta^2 rho)^max{0, floor((T - s)/2)}, normalized by h_0.
double theorem2_bound(const ConvergenceBoundInputs& inputs, long T);

struct MonteCarloResult {
  long trials = 0;
  long successes = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double lower_bound_claimed = 0.0;
  std::optional<double> exact;  // present when enumeration was feasible
  bool inconclusive = false;
};

// Probability that the max over a uniform p-subset of `values` equals the
// global max; enumeration runs when C(m, p) <= enumeration_limit.
MonteCarloResult subset_max_probability(const std::vector<double>& values,
                                        int p, long trials,
                                        std::uint64_t seed,
                                        double enumeration_limit = 4e6);

// Conditional probability that the partial pairwise gap matches the full
// one given z_t = 1, estimated by resampling the iteration-t subsampling
// from a frozen (x_t, S_t). Claimed lower bound: (p / |A|)^2.
MonteCarloResult conditional_match_probability(ObjectiveModel& obj,
                                               const DomainOracle& domain,
                                               const ActiveSet& state, long p,
                                               long trials,
                                               std::uint64_t seed);

struct RateViolation {
  long T = 0;
  double mean_gap = 0.0;
  double bound = 0.0;
};

struct RateCheckReport {
  long checked_iterations = 0;
  std::vector<RateViolation> violations;
  bool pass() const { return violations.empty(); }
};

// Compares mean h_T across seed traces against bound_fn(T) for every T up
// to the shortest trace. Objectives in the traces must share a known f(x*).
RateCheckReport empirical_rate_check(
    const std::vector<std::vector<TraceRecord>>& traces, double f_star,
    const std::function<double(long)>& bound_fn);

struct LogDecayFit {
  double slope = 0.0;
  double r_squared = 0.0;
  int points = 0;
};

// Least-squares fit of log(gap) against the x-axis over the final fraction
// of the positive-gap points.
LogDecayFit fit_log_decay(const std::vector<std::pair<double, double>>& series,
                          double final_fraction = 2.0 / 3.0);

}  // namespace subfw

#endif
