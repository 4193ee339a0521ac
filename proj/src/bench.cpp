#include "subfw/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

#include <json.hpp>

#include "subfw/matio.hpp"
#include "subfw/verify.hpp"

namespace subfw {

namespace {

std::vector<double> gaussian_matrix(int rows, int cols, Rng& rng) {
  std::vector<double> m(static_cast<std::size_t>(rows) * cols);
  for (double& v : m) v = rng.normal();
  return m;
}

std::vector<double> multiply(const std::vector<double>& column_major, int rows,
                             int cols, const std::vector<double>& x) {
  std::vector<double> y(static_cast<std::size_t>(rows), 0.0);
  for (int j = 0; j < cols; ++j) {
    const double xj = x[static_cast<std::size_t>(j)];
    if (xj == 0.0) continue;
    const double* col = column_major.data() + static_cast<std::size_t>(j) * rows;
    for (int i = 0; i < rows; ++i) y[static_cast<std::size_t>(i)] += xj * col[i];
  }
  return y;
}

}  // namespace

LassoInstance generate_lasso(const LassoScenario& scenario,
                             std::uint64_t seed) {
  Rng rng(seed);
  LassoInstance inst;

  inst.ground_truth.assign(static_cast<std::size_t>(scenario.d), 0.0);
  const int nnz = static_cast<int>(std::floor(scenario.nonzero_fraction *
                                              static_cast<double>(scenario.d)));
  const std::vector<int> support =
      rng.sample_without_replacement(scenario.d, nnz);
  for (int i : support)
    inst.ground_truth[static_cast<std::size_t>(i)] =
        rng.uniform01() < 0.5 ? -1.0 : 1.0;

  std::vector<double> X = gaussian_matrix(scenario.n, scenario.d, rng);
  std::vector<double> y =
      multiply(X, scenario.n, scenario.d, inst.ground_truth);
  for (double& v : y) v += scenario.noise_sigma * rng.normal();

  inst.truth_l1_norm = 0.0;
  for (double v : inst.ground_truth) inst.truth_l1_norm += std::abs(v);
  inst.truth_inside_ball = inst.truth_l1_norm <= scenario.radius;

  inst.objective = std::make_unique<LeastSquaresObjective>(
      std::make_unique<DenseColumns>(scenario.n, scenario.d, std::move(X)),
      std::move(y));
  return inst;
}

LglInstance generate_lgl(const LglScenario& scenario, std::uint64_t seed) {
  Rng rng(seed);
  LglInstance inst;
  inst.groups =
      make_overlapping_groups(scenario.d, scenario.group_size, scenario.overlap);

  // Disjoint active groups, Gaussian-filled, until the nonzero budget is
  // reached; disjointness makes sum of group norms an upper bound on the
  // latent group norm, so scaling by it certifies feasibility.
  const int target_nnz = static_cast<int>(std::floor(
      scenario.nonzero_fraction * static_cast<double>(scenario.d)));
  inst.ground_truth.assign(static_cast<std::size_t>(scenario.d), 0.0);
  std::vector<char> used(static_cast<std::size_t>(scenario.d), 0);
  std::vector<int> chosen_groups;
  int filled = 0;
  long guard = 0;
  while (filled < target_nnz &&
         guard++ < 50L * inst.groups.group_count()) {
    const int gid = static_cast<int>(
        rng.below(static_cast<std::uint64_t>(inst.groups.group_count())));
    const auto& g = inst.groups.groups[static_cast<std::size_t>(gid)];
    bool overlaps = false;
    for (int c : g)
      if (used[static_cast<std::size_t>(c)]) overlaps = true;
    if (overlaps) continue;
    for (int c : g) {
      used[static_cast<std::size_t>(c)] = 1;
      inst.ground_truth[static_cast<std::size_t>(c)] = rng.normal();
      ++filled;
    }
    chosen_groups.push_back(gid);
  }

  double norm_bound = 0.0;
  for (int gid : chosen_groups) {
    double n2 = 0.0;
    for (int c : inst.groups.groups[static_cast<std::size_t>(gid)]) {
      const double v = inst.ground_truth[static_cast<std::size_t>(c)];
      n2 += v * v;
    }
    norm_bound += std::sqrt(n2);
  }
  if (norm_bound > scenario.radius) {
    inst.truth_scale_factor = scenario.radius / norm_bound;
    for (double& v : inst.ground_truth) v *= inst.truth_scale_factor;
  }

  std::vector<double> X = gaussian_matrix(scenario.n, scenario.d, rng);
  std::vector<double> y =
      multiply(X, scenario.n, scenario.d, inst.ground_truth);
  for (double& v : y) v += scenario.noise_sigma * rng.normal();

  inst.objective = std::make_unique<LeastSquaresObjective>(
      std::make_unique<DenseColumns>(scenario.n, scenario.d, std::move(X)),
      std::move(y));
  return inst;
}

double recovered_support_fraction(const std::vector<double>& x,
                                  const std::vector<double>& truth) {
  long truth_nnz = 0, hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 0.0) continue;
    ++truth_nnz;
    if (std::abs(x[i]) > 1e-8) ++hit;
  }
  if (truth_nnz == 0) return 1.0;
  return static_cast<double>(hit) / static_cast<double>(truth_nnz);
}

std::pair<std::string, std::string> write_matrix_files(
    const LeastSquaresObjective& obj, const std::string& path_prefix) {
  const ColumnSource& cols = obj.columns();
  std::vector<double> column_major;
  column_major.reserve(static_cast<std::size_t>(cols.rows()) * cols.cols());
  for (int j = 0; j < cols.cols(); ++j) {
    const double* c = cols.column(j);
    column_major.insert(column_major.end(), c, c + cols.rows());
  }
  const std::string mat_path = path_prefix + ".fwmat";
  const std::string vec_path = path_prefix + ".fwvec";
  write_matrix_file(mat_path, cols.rows(), cols.cols(), column_major);
  write_vector_file(vec_path, obj.targets());
  return {mat_path, vec_path};
}

int bench_thread_cap(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SUBFW_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

SubsampleSpec spec_for(const ExperimentSpec& spec, Algorithm algo) {
  if (spec.name == "lgl") return SubsampleSpec::rate(spec.lgl.eta);
  const double eta = (algo == Algorithm::AFW || algo == Algorithm::RAFW)
                         ? spec.lasso.eta_rafw
                         : spec.lasso.eta_rfw;
  return SubsampleSpec::rate(eta);
}

RunSummary one_run(const ExperimentSpec& spec, Algorithm algo,
                   std::uint64_t seed, const std::string& out_dir) {
  RunSummary summary;
  summary.algorithm = algo;
  summary.seed = seed;

  std::unique_ptr<LeastSquaresObjective> obj;
  std::unique_ptr<DomainOracle> domain;
  std::vector<double> truth;
  if (spec.name == "lgl") {
    LglInstance inst = generate_lgl(spec.lgl, seed);
    obj = std::move(inst.objective);
    domain = std::make_unique<LatentGroupBall>(inst.groups, spec.lgl.radius);
    truth = std::move(inst.ground_truth);
  } else {
    LassoInstance inst = generate_lasso(spec.lasso, seed);
    obj = std::move(inst.objective);
    domain = std::make_unique<L1Ball>(spec.lasso.d, spec.lasso.radius);
    truth = std::move(inst.ground_truth);
  }

  SolverConfig config;
  config.algorithm = algo;
  config.subsample = spec_for(spec, algo);
  config.max_iters = spec.max_iters;
  config.tolerance = spec.tolerance;
  config.checkpoint_k = spec.checkpoint_k;
  config.seed = splitmix64(seed ^ (static_cast<std::uint64_t>(algo) + 1));

  long long init_coords = 0;
  const ActiveSet x0 = default_x0(*obj, *domain, &init_coords);
  const SolveResult result =
      run_solver(*obj, *domain, config, x0, init_coords);

  summary.converged = result.converged;
  summary.iterations = result.iterations;
  summary.final_objective = result.trace.empty()
                                ? obj->value()
                                : result.trace.back().objective;
  summary.recovered_support =
      recovered_support_fraction(result.final_set.iterate(), truth);
  for (const TraceRecord& r : result.trace) {
    if (r.full_gap) {
      summary.checkpoints.emplace_back(r.iter, r.grad_coords_cum, *r.full_gap);
      summary.support_sizes.emplace_back(r.iter, r.support_size);
    }
  }

  summary.trace_path = out_dir + "/traces/" + algorithm_name(algo) + "_" +
                       std::to_string(seed) + ".csv";
  write_trace_csv(summary.trace_path, result.trace);
  return summary;
}

nlohmann::json median_series(
    const std::vector<const RunSummary*>& runs,
    const std::function<std::pair<double, double>(const RunSummary&, std::size_t)>&
        pick,
    std::size_t series_len) {
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t k = 0; k < series_len; ++k) {
    std::vector<double> xs, ys;
    for (const RunSummary* r : runs) {
      const auto [x, y] = pick(*r, k);
      xs.push_back(x);
      ys.push_back(y);
    }
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    arr.push_back({xs[xs.size() / 2], ys[ys.size() / 2]});
  }
  return arr;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::string& out_dir) {
  if (spec.algorithms.empty() || spec.seeds.empty())
    throw ContractViolation("experiment needs algorithms and seeds");

  std::filesystem::create_directories(out_dir + "/traces");

  struct Job {
    Algorithm algo;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (Algorithm a : spec.algorithms)
    for (std::uint64_t s : spec.seeds) jobs.push_back({a, s});

  ExperimentResult result;
  result.runs.resize(jobs.size());

  const int threads =
      std::min<int>(bench_thread_cap(spec.threads), static_cast<int>(jobs.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) break;
      result.runs[i] = one_run(spec, jobs[i].algo, jobs[i].seed, out_dir);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  // Summary: per-algorithm median trajectories over the common checkpoint
  // prefix, plus recovered-support medians.
  nlohmann::json algos = nlohmann::json::array();
  for (Algorithm a : spec.algorithms) {
    std::vector<const RunSummary*> runs;
    for (const RunSummary& r : result.runs)
      if (r.algorithm == a) runs.push_back(&r);
    std::size_t series_len = runs.empty() ? 0 : runs[0]->checkpoints.size();
    for (const RunSummary* r : runs)
      series_len = std::min(series_len, r->checkpoints.size());

    std::vector<double> rec;
    long converged = 0;
    for (const RunSummary* r : runs) {
      rec.push_back(r->recovered_support);
      if (r->converged) ++converged;
    }
    std::sort(rec.begin(), rec.end());

    nlohmann::json entry;
    entry["name"] = algorithm_name(a);
    entry["seeds"] = runs.size();
    entry["converged"] = converged;
    entry["median_recovered_support"] = rec.empty() ? 0.0 : rec[rec.size() / 2];
    entry["median_gap_vs_iter"] = median_series(
        runs,
        [](const RunSummary& r, std::size_t k) {
          return std::pair<double, double>(
              static_cast<double>(std::get<0>(r.checkpoints[k])),
              std::get<2>(r.checkpoints[k]));
        },
        series_len);
    entry["median_gap_vs_grad_coords"] = median_series(
        runs,
        [](const RunSummary& r, std::size_t k) {
          return std::pair<double, double>(
              static_cast<double>(std::get<1>(r.checkpoints[k])),
              std::get<2>(r.checkpoints[k]));
        },
        series_len);
    entry["median_support_vs_iter"] = median_series(
        runs,
        [](const RunSummary& r, std::size_t k) {
          return std::pair<double, double>(
              static_cast<double>(r.support_sizes[k].first),
              static_cast<double>(r.support_sizes[k].second));
        },
        series_len);
    algos.push_back(entry);
  }

  nlohmann::json scenario;
  scenario["name"] = spec.name;
  if (spec.name == "lgl") {
    scenario["n"] = spec.lgl.n;
    scenario["d"] = spec.lgl.d;
    scenario["radius"] = spec.lgl.radius;
    scenario["eta"] = spec.lgl.eta;
    scenario["group_size"] = spec.lgl.group_size;
    scenario["overlap"] = spec.lgl.overlap;
    scenario["chunk_cols"] = spec.lgl.chunk_cols;
    scenario["noise_sigma"] = spec.lgl.noise_sigma;
  } else {
    scenario["n"] = spec.lasso.n;
    scenario["d"] = spec.lasso.d;
    scenario["radius"] = spec.lasso.radius;
    scenario["eta_rfw"] = spec.lasso.eta_rfw;
    scenario["eta_rafw"] = spec.lasso.eta_rafw;
    scenario["noise_sigma"] = spec.lasso.noise_sigma;
  }
  nlohmann::json salgos = nlohmann::json::array();
  for (Algorithm a : spec.algorithms) salgos.push_back(algorithm_name(a));
  scenario["algorithms"] = salgos;
  scenario["seeds"] = spec.seeds;
  scenario["max_iters"] = spec.max_iters;
  scenario["tolerance"] = spec.tolerance;

  nlohmann::json summary;
  summary["scenario"] = spec.name;
  summary["algorithms"] = algos;

  result.scenario_path = out_dir + "/scenario.json";
  result.summary_path = out_dir + "/summary.json";
  std::ofstream(result.scenario_path) << scenario.dump(2) << '\n';
  std::ofstream(result.summary_path) << summary.dump(2) << '\n';
  return result;
}

}  // namespace subfw
