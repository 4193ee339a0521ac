#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "subfw/bench.hpp"
#include "subfw/matio.hpp"

using namespace subfw;

namespace {

std::string temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p.string();
}

}  // namespace

TEST_CASE("lasso generation") {
  LassoScenario scenario;

  SUBCASE("same seed reproduces the data bit for bit") {
    LassoInstance a = generate_lasso(scenario, 42);
    LassoInstance b = generate_lasso(scenario, 42);
    CHECK(a.objective->targets() == b.objective->targets());
    CHECK(a.ground_truth == b.ground_truth);
    const auto& ca = dynamic_cast<const DenseColumns&>(a.objective->columns());
    const auto& cb = dynamic_cast<const DenseColumns&>(b.objective->columns());
    CHECK(ca.storage() == cb.storage());
  }
  SUBCASE("ground truth has the configured sparsity and signs") {
    LassoInstance inst = generate_lasso(scenario, 7);
    long nnz = 0;
    for (double v : inst.ground_truth) {
      if (v == 0.0) continue;
      ++nnz;
      CHECK((v == 1.0 || v == -1.0));
    }
    CHECK(nnz == 50);
    // |x*|_1 = 50 > beta = 40: the unconstrained optimum sits outside.
    CHECK(inst.truth_l1_norm == doctest::Approx(50.0));
    CHECK_FALSE(inst.truth_inside_ball);
  }
}

TEST_CASE("lgl generation stays in the ball") {
  LglScenario scenario;
  scenario.n = 20;
  scenario.d = 300;
  LglInstance inst = generate_lgl(scenario, 3);
  CHECK(inst.groups.dimension == 300);
  CHECK(inst.truth_scale_factor <= 1.0);
  CHECK(inst.truth_scale_factor > 0.0);

  // Sum of per-group norms over disjoint active groups bounds the latent
  // group norm from above; after scaling it fits the radius.
  double bound = 0.0;
  std::vector<char> seen(300, 0);
  for (const auto& g : inst.groups.groups) {
    double n2 = 0.0;
    bool active = false;
    for (int c : g)
      if (inst.ground_truth[static_cast<std::size_t>(c)] != 0.0 &&
          !seen[static_cast<std::size_t>(c)])
        active = true;
    if (!active) continue;
    for (int c : g) {
      const double v = inst.ground_truth[static_cast<std::size_t>(c)];
      n2 += v * v;
      seen[static_cast<std::size_t>(c)] = 1;
    }
    bound += std::sqrt(n2);
  }
  CHECK(bound <= scenario.radius + 1e-9);
}

TEST_CASE("recovered support fraction") {
  const std::vector<double> truth = {1.0, 0.0, -1.0, 0.0};
  CHECK(recovered_support_fraction({1.0, 0.0, -1.0, 0.0}, truth) ==
        doctest::Approx(1.0));
  CHECK(recovered_support_fraction({1.0, 0.0, 0.0, 0.0}, truth) ==
        doctest::Approx(0.5));
  CHECK(recovered_support_fraction({0.0, 5.0, 0.0, 5.0}, truth) ==
        doctest::Approx(0.0));
  CHECK(recovered_support_fraction({1e-9, 0.0, 1e-9, 0.0}, truth) ==
        doctest::Approx(0.0));  // below the 1e-8 threshold
}

TEST_CASE("matrix file emission and read-back parity") {
  LassoScenario scenario;
  scenario.n = 30;
  scenario.d = 20;
  LassoInstance inst = generate_lasso(scenario, 9);

  const std::string prefix =
      (std::filesystem::temp_directory_path() / "subfw_bench_files").string();
  const auto [mat, vec] = write_matrix_files(*inst.objective, prefix);
  CHECK(std::filesystem::file_size(mat) ==
        kMatHeaderBytes + 30ull * 20ull * 8ull);

  LeastSquaresObjective chunked = read_chunked_matrix(mat, vec, 7);
  std::vector<double> x(20);
  Rng rng(1);
  for (double& v : x) v = 0.1 * rng.normal();
  inst.objective->reset(x);
  chunked.reset(x);
  const std::vector<double> g1 = inst.objective->full_gradient();
  const std::vector<double> g2 = chunked.full_gradient();
  for (std::size_t j = 0; j < g1.size(); ++j)
    CHECK(g2[j] == doctest::Approx(g1[j]).epsilon(1e-12));
}

TEST_CASE("experiment runner") {
  const std::string out = temp_dir("subfw_bench_out");
  ExperimentSpec spec;
  spec.name = "lasso";
  spec.lasso.n = 30;
  spec.lasso.d = 40;
  spec.lasso.radius = 4.0;
  spec.lasso.eta_rfw = 0.5;
  spec.lasso.eta_rafw = 0.5;
  spec.algorithms = {Algorithm::FW, Algorithm::RFW_V1};
  spec.seeds = {1, 2, 3};
  spec.max_iters = 100;
  spec.tolerance = 1e-6;
  spec.threads = 2;

  const ExperimentResult result = run_experiment(spec, out);
  CHECK(result.runs.size() == 6);
  for (const RunSummary& r : result.runs) {
    CHECK(std::filesystem::exists(r.trace_path));
    CHECK(r.recovered_support >= 0.0);
    CHECK(r.recovered_support <= 1.0);
  }
  REQUIRE(std::filesystem::exists(result.summary_path));
  nlohmann::json summary;
  std::ifstream(result.summary_path) >> summary;
  CHECK(summary["algorithms"].size() == 2);

  SUBCASE("single run aggregation is the run itself") {
    const std::string out1 = temp_dir("subfw_bench_single");
    ExperimentSpec one = spec;
    one.algorithms = {Algorithm::FW};
    one.seeds = {1};
    const ExperimentResult r1 = run_experiment(one, out1);
    REQUIRE(r1.runs.size() == 1);
    nlohmann::json s1;
    std::ifstream(r1.summary_path) >> s1;
    const auto& entry = s1["algorithms"][0];
    CHECK(entry["median_recovered_support"].get<double>() ==
          doctest::Approx(r1.runs[0].recovered_support));
  }

  SUBCASE("deterministic rerun produces identical traces") {
    const std::string out2 = temp_dir("subfw_bench_out2");
    const ExperimentResult again = run_experiment(spec, out2);
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
      std::ifstream a(result.runs[i].trace_path), b(again.runs[i].trace_path);
      std::stringstream sa, sb;
      sa << a.rdbuf();
      sb << b.rdbuf();
      CHECK(sa.str() == sb.str());
    }
  }
}

TEST_CASE("thread cap resolution") {
  CHECK(bench_thread_cap(3) == 3);
  CHECK(bench_thread_cap(0) >= 1);
  setenv("SUBFW_THREADS", "2", 1);
  CHECK(bench_thread_cap(0) == 2);
  unsetenv("SUBFW_THREADS");
}
