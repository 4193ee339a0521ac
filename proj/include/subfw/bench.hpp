#ifndef SUBFW_BENCH_HPP
#define SUBFW_BENCH_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "subfw/objectives.hpp"
#include "subfw/solvers.hpp"

namespace subfw {

// Synthetic lasso setup: Gaussian design, sparse +-1 ground truth, unit
// Gaussian noise, l1 radius chosen so the unconstrained optimum lies
// outside the ball.
struct LassoScenario {
  int n = 200;
  int d = 500;
  double nonzero_fraction = 0.10;
  double noise_sigma = 1.0;
  double radius = 40.0;
  double eta_rfw = 0.05;
  double eta_rafw = 0.25;
};

// Latent group lasso setup; the ground truth is scaled into the ball when
// the generated vector falls outside (factor recorded).
struct LglScenario {
  int n = 200;
  int d = 10000;
  int group_size = 10;
  int overlap = 3;
  double nonzero_fraction = 0.01;
  double noise_sigma = 1.0;
  double radius = 14.0;
  double eta = 0.1;
  int chunk_cols = 500;
};

struct LassoInstance {
  std::unique_ptr<LeastSquaresObjective> objective;
  std::vector<double> ground_truth;
  double truth_l1_norm = 0.0;
  bool truth_inside_ball = false;
};

struct LglInstance {
  std::unique_ptr<LeastSquaresObjective> objective;
  std::vector<double> ground_truth;
  double truth_scale_factor = 1.0;  // 1 when no projection was needed
  GroupStructure groups;
};

LassoInstance generate_lasso(const LassoScenario& scenario,
                             std::uint64_t seed);
LglInstance generate_lgl(const LglScenario& scenario, std::uint64_t seed);

// Fraction of ground-truth support recovered by x (|x_i| > 1e-8).
double recovered_support_fraction(const std::vector<double>& x,
                                  const std::vector<double>& truth);

// FWMAT1 + FWVEC1 emission for the streaming path; returns the two paths.
std::pair<std::string, std::string> write_matrix_files(
    const LeastSquaresObjective& obj, const std::string& path_prefix);

struct ExperimentSpec {
  std::string name = "lasso";  // "lasso" or "lgl"
  LassoScenario lasso;
  LglScenario lgl;
  std::vector<Algorithm> algorithms;
  std::vector<std::uint64_t> seeds;
  long max_iters = 3000;
  double tolerance = 1e-6;
  int checkpoint_k = 2;
  int threads = 0;  // 0: decide from SUBFW_THREADS / hardware
};

struct RunSummary {
  Algorithm algorithm;
  std::uint64_t seed = 0;
  bool converged = false;
  long iterations = 0;
  double final_objective = 0.0;
  double recovered_support = 0.0;
  std::string trace_path;
  // Checkpoint series: (iter, grad_coords_cum, full_gap).
  std::vector<std::tuple<long, long long, double>> checkpoints;
  std::vector<std::pair<long, int>> support_sizes;  // at checkpoints
};

struct ExperimentResult {
  std::vector<RunSummary> runs;
  std::string summary_path;
  std::string scenario_path;
};

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::string& out_dir);

int bench_thread_cap(int requested);

}  // namespace subfw

#endif
