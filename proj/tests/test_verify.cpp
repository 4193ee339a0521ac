#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "subfw/verify.hpp"

using namespace subfw;

TEST_CASE("theorem 1 bound formula") {
  ConvergenceBoundInputs in;
  in.curvature = 4.0;
  in.eta = 1.0;
  in.initial_gap = 1.0;
  CHECK(theorem1_bound(in, 8) == doctest::Approx(1.0));
  CHECK(theorem1_bound(in, 0) == doctest::Approx(5.0));

  SUBCASE("monotone decreasing in T and eta") {
    double prev = theorem1_bound(in, 0);
    for (long T = 1; T <= 50; ++T) {
      const double b = theorem1_bound(in, T);
      CHECK(b <= prev);
      prev = b;
    }
    ConvergenceBoundInputs half = in;
    half.eta = 0.5;
    for (long T = 1; T <= 50; ++T)
      CHECK(theorem1_bound(in, T) <= theorem1_bound(half, T));
  }
  SUBCASE("halving eta halves the denominator growth") {
    ConvergenceBoundInputs half = in;
    half.eta = 0.5;
    for (long T : {1L, 5L, 40L})
      CHECK(theorem1_bound(half, T) ==
            doctest::Approx(2.0 * (4.0 + 1.0) / (0.5 * T + 2.0)));
  }
}

TEST_CASE("theorem 2 bound formula") {
  ConvergenceBoundInputs in;
  in.eta = 1.0;
  in.geometric_ratio = 0.1;
  in.initial_support = 1;

  CHECK(theorem2_bound(in, 0) == doctest::Approx(1.0));
  CHECK(theorem2_bound(in, 1) == doctest::Approx(1.0));
  CHECK(theorem2_bound(in, 5) == doctest::Approx(0.81));

  ConvergenceBoundInputs half = in;
  half.eta = 0.5;
  CHECK(theorem2_bound(half, 5) == doctest::Approx(0.950625));

  SUBCASE("missing ratio is rejected") {
    ConvergenceBoundInputs none;
    CHECK_THROWS_AS(theorem2_bound(none, 5), ContractViolation);
  }
  SUBCASE("monotone decreasing in T, eta, rho past the support") {
    double prev = 1.0;
    for (long T = 2; T < 60; ++T) {
      const double b = theorem2_bound(in, T);
      CHECK(b <= prev + 1e-15);
      prev = b;
    }
    ConvergenceBoundInputs bigger_rho = in;
    bigger_rho.geometric_ratio = 0.2;
    CHECK(theorem2_bound(bigger_rho, 21) < theorem2_bound(in, 21));
    CHECK(theorem2_bound(half, 21) > theorem2_bound(in, 21));
  }
}

TEST_CASE("subset max probability") {
  SUBCASE("all-equal values always attain the max") {
    const MonteCarloResult r =
        subset_max_probability(std::vector<double>(5, 2.0), 1, 1000, 1);
    REQUIRE(r.exact.has_value());
    CHECK(*r.exact == doctest::Approx(1.0));
    CHECK(r.estimate == doctest::Approx(1.0));
  }
  SUBCASE("three distinct values, pairs") {
    const MonteCarloResult r =
        subset_max_probability({0.1, 0.7, 0.3}, 2, 10000, 2);
    REQUIRE(r.exact.has_value());
    CHECK(*r.exact == doctest::Approx(2.0 / 3.0));
    CHECK(r.lower_bound_claimed == doctest::Approx(2.0 / 3.0));
    CHECK(std::abs(r.estimate - *r.exact) <= 3.0 * r.std_error);
  }
  SUBCASE("ten distinct values, triples") {
    std::vector<double> values(10);
    for (int i = 0; i < 10; ++i) values[static_cast<std::size_t>(i)] = i * 1.7;
    const MonteCarloResult r = subset_max_probability(values, 3, 100000, 3);
    REQUIRE(r.exact.has_value());
    CHECK(*r.exact == doctest::Approx(0.3));
    CHECK(std::abs(r.estimate - 0.3) <= 3.0 * r.std_error);
  }
  SUBCASE("estimates agree with enumeration across (m, p)") {
    Rng rng(11);
    for (const auto& [m, p] : std::vector<std::pair<int, int>>{
             {6, 2}, {8, 3}, {12, 4}, {9, 1}}) {
      std::vector<double> values(static_cast<std::size_t>(m));
      for (double& v : values) v = rng.normal();
      const MonteCarloResult r = subset_max_probability(values, p, 40000, 7);
      REQUIRE(r.exact.has_value());
      CHECK(std::abs(r.estimate - *r.exact) <= 3.0 * std::max(r.std_error, 1e-4));
      CHECK(*r.exact >= r.lower_bound_claimed - 1e-12);
    }
  }
}

TEST_CASE("conditional match probability") {
  FiniteAtomSet simplex = FiniteAtomSet::simplex(5, 1.0);
  QuadraticObjective obj(std::vector<double>{0.6, 0.25, 0.1, 0.03, 0.02});
  ActiveSet state = ActiveSet::single(5, simplex.atom_at(3));
  state.apply_fw_step(simplex.atom_at(4), 0.5);

  SUBCASE("sampling the whole complement always matches") {
    QuadraticObjective o2 = obj;
    const MonteCarloResult r =
        conditional_match_probability(o2, simplex, state, 3, 2000, 5);
    CHECK_FALSE(r.inconclusive);
    CHECK(r.estimate == doctest::Approx(1.0));
  }
  SUBCASE("p = 1 stays above the squared-rate bound") {
    QuadraticObjective o2 = obj;
    const MonteCarloResult r =
        conditional_match_probability(o2, simplex, state, 1, 20000, 6);
    CHECK_FALSE(r.inconclusive);
    CHECK(r.lower_bound_claimed == doctest::Approx(0.04));
    CHECK(r.estimate >= r.lower_bound_claimed - 3.0 * r.std_error);
  }
}

TEST_CASE("empirical rate check") {
  const int d = 12;
  Rng crng(5);
  std::vector<double> center(d);
  double l1 = 0.0;
  for (double& v : center) {
    v = crng.normal();
    l1 += std::abs(v);
  }
  for (double& v : center) v *= 0.85 / l1;
  L1Ball ball(d, 1.0);

  std::vector<std::vector<TraceRecord>> traces;
  double eps0 = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    QuadraticObjective obj(center);
    SolverConfig config;
    config.algorithm = Algorithm::RFW_V1;
    config.subsample = SubsampleSpec::rate(0.5);
    config.max_iters = 60;
    config.seed = seed;
    const ActiveSet x0 = default_x0(obj, ball);
    const SolveResult r = run_solver(obj, ball, config, x0);
    eps0 = r.trace[0].objective;
    traces.push_back(r.trace);
  }

  QuadraticObjective probe(center);
  ConvergenceBoundInputs in;
  in.curvature = probe.curvature_upper_bound(2.0);
  in.eta = 0.5;
  in.initial_gap = eps0;

  SUBCASE("true bound has no violations") {
    const RateCheckReport rep = empirical_rate_check(
        traces, 0.0, [&](long T) { return theorem1_bound(in, T); });
    CHECK(rep.pass());
  }
  SUBCASE("a falsified bound must trip the checker") {
    ConvergenceBoundInputs bad = in;
    bad.curvature = in.curvature / 100.0;
    bad.initial_gap = 0.0;  // removes the eps0 floor entirely
    const RateCheckReport rep = empirical_rate_check(
        traces, 0.0, [&](long T) { return theorem1_bound(bad, T) / 50.0; });
    CHECK_FALSE(rep.pass());
  }
}

TEST_CASE("log decay fit") {
  SUBCASE("clean geometric series fits a line") {
    std::vector<std::pair<double, double>> series;
    for (int t = 0; t < 100; ++t)
      series.emplace_back(t, 10.0 * std::pow(0.9, t));
    const LogDecayFit fit = fit_log_decay(series);
    CHECK(fit.slope == doctest::Approx(std::log(0.9)).epsilon(1e-9));
    CHECK(fit.r_squared > 0.999);
  }
  SUBCASE("non-positive gaps are dropped") {
    std::vector<std::pair<double, double>> series;
    for (int t = 0; t < 50; ++t)
      series.emplace_back(t, t % 7 == 0 ? 0.0 : std::pow(0.8, t));
    const LogDecayFit fit = fit_log_decay(series);
    CHECK(fit.slope < 0.0);
  }
}
