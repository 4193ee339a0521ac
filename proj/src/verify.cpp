#include "subfw/verify.hpp"

#include <algorithm>
#include <cmath>

namespace subfw {

double theorem1_bound(const ConvergenceBoundInputs& inputs, long T) {
  if (!(inputs.eta > 0.0 && inputs.eta <= 1.0))
    throw ContractViolation("eta must be in (0, 1]");
  if (T < 0) throw ContractViolation("T must be >= 0");
  return 2.0 * (inputs.curvature + inputs.initial_gap) /
         (inputs.eta * static_cast<double>(T) + 2.0);
}

double theorem2_bound(const ConvergenceBoundInputs& inputs, long T) {
  if (!inputs.geometric_ratio)
    throw ContractViolation("theorem2_bound needs a geometric ratio");
  const double rho = *inputs.geometric_ratio;
  if (!(rho > 0.0 && rho < 1.0))
    throw ContractViolation("geometric ratio must be in (0, 1)");
  const long exponent =
      std::max(0L, (T - static_cast<long>(inputs.initial_support)) / 2);
  return std::pow(1.0 - inputs.eta * inputs.eta * rho,
                  static_cast<double>(exponent));
}

namespace {

double binomial_std_error(double estimate, long trials) {
  return std::sqrt(std::max(0.0, estimate * (1.0 - estimate)) /
                   static_cast<double>(trials));
}

double choose_approx(int m, int p) {
  double c = 1.0;
  for (int i = 0; i < p; ++i) {
    c *= static_cast<double>(m - i) / static_cast<double>(i + 1);
    if (c > 1e18) return c;
  }
  return c;
}

}  // namespace

MonteCarloResult subset_max_probability(const std::vector<double>& values,
                                        int p, long trials,
                                        std::uint64_t seed,
                                        double enumeration_limit) {
  const int m = static_cast<int>(values.size());
  if (p < 1 || p > m) throw ContractViolation("need 1 <= p <= m");
  if (trials < 1) throw ContractViolation("trials must be >= 1");

  const double global_max = *std::max_element(values.begin(), values.end());

  MonteCarloResult result;
  result.trials = trials;
  result.lower_bound_claimed = static_cast<double>(p) / m;

  Rng rng(seed);
  long hits = 0;
  for (long t = 0; t < trials; ++t) {
    const std::vector<int> subset = rng.sample_without_replacement(m, p);
    double sub_max = values[static_cast<std::size_t>(subset[0])];
    for (int i : subset)
      sub_max = std::max(sub_max, values[static_cast<std::size_t>(i)]);
    if (sub_max == global_max) ++hits;
  }
  result.successes = hits;
  result.estimate = static_cast<double>(hits) / static_cast<double>(trials);
  result.std_error = binomial_std_error(result.estimate, trials);

  if (choose_approx(m, p) <= enumeration_limit) {
    // Exact probability over all p-subsets in colex order.
    long long total = 0, good = 0;
    std::vector<int> idx(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
      double sub_max = values[static_cast<std::size_t>(idx[0])];
      for (int i : idx)
        sub_max = std::max(sub_max, values[static_cast<std::size_t>(i)]);
      ++total;
      if (sub_max == global_max) ++good;

      int k = p - 1;
      while (k >= 0 && idx[static_cast<std::size_t>(k)] == m - p + k) --k;
      if (k < 0) break;
      ++idx[static_cast<std::size_t>(k)];
      for (int j = k + 1; j < p; ++j)
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    result.exact = static_cast<double>(good) / static_cast<double>(total);
  }
  return result;
}

MonteCarloResult conditional_match_probability(ObjectiveModel& obj,
                                               const DomainOracle& domain,
                                               const ActiveSet& state, long p,
                                               long trials,
                                               std::uint64_t seed) {
  if (trials < 1) throw ContractViolation("trials must be >= 1");
  const long atom_count = domain.finite_atom_count();
  if (atom_count <= 0)
    throw ContractViolation("needs a finite atom family");

  // Full LMO at the frozen state.
  obj.reset(state.iterate());
  const std::vector<double> grad = obj.full_gradient();
  double best = 0.0;
  bool first = true;
  for (long i = 0; i < atom_count; ++i) {
    const double d = domain.atom_at(i).dot(grad);
    if (first || d < best) {
      best = d;
      first = false;
    }
  }
  double a_v = 0.0;
  bool vfirst = true;
  for (const auto& [key, wa] : state.support()) {
    const double d = wa.atom.dot(grad);
    if (vfirst || d > a_v) {
      a_v = d;
      vfirst = false;
    }
  }
  const double pairwise_full = a_v - best;  // g~_t

  Rng rng(seed);
  long z1 = 0, matches = 0;
  for (long t = 0; t < trials; ++t) {
    const RafwProbe probe = rafw_probe(obj, domain, state, p, rng);
    if (probe.z != 1) continue;
    ++z1;
    const double tol = 1e-12 * std::max(1.0, std::abs(pairwise_full));
    if (std::abs(probe.partial_gap - pairwise_full) <= tol) ++matches;
  }

  MonteCarloResult result;
  result.trials = trials;
  result.lower_bound_claimed =
      std::pow(static_cast<double>(p) / static_cast<double>(atom_count), 2);
  if (z1 == 0) {
    result.inconclusive = true;
    return result;
  }
  result.successes = matches;
  result.estimate = static_cast<double>(matches) / static_cast<double>(z1);
  result.std_error = binomial_std_error(result.estimate, z1);
  return result;
}

RateCheckReport empirical_rate_check(
    const std::vector<std::vector<TraceRecord>>& traces, double f_star,
    const std::function<double(long)>& bound_fn) {
  if (traces.empty()) throw ContractViolation("no traces");
  std::size_t horizon = traces[0].size();
  for (const auto& t : traces) horizon = std::min(horizon, t.size());

  RateCheckReport report;
  report.checked_iterations = static_cast<long>(horizon);
  for (std::size_t T = 0; T < horizon; ++T) {
    double mean = 0.0;
    for (const auto& t : traces) mean += t[T].objective - f_star;
    mean /= static_cast<double>(traces.size());
    const double bound = bound_fn(static_cast<long>(T));
    if (mean > bound)
      report.violations.push_back({static_cast<long>(T), mean, bound});
  }
  return report;
}

LogDecayFit fit_log_decay(const std::vector<std::pair<double, double>>& series,
                          double final_fraction) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [x, gap] : series)
    if (gap > 0.0) pts.emplace_back(x, std::log(gap));
  LogDecayFit fit;
  const std::size_t skip = static_cast<std::size_t>(
      std::floor(static_cast<double>(pts.size()) * (1.0 - final_fraction)));
  if (pts.size() - skip < 3) return fit;

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = static_cast<double>(pts.size() - skip);
  for (std::size_t i = skip; i < pts.size(); ++i) {
    sx += pts[i].first;
    sy += pts[i].second;
    sxx += pts[i].first * pts[i].first;
    sxy += pts[i].first * pts[i].second;
    syy += pts[i].second * pts[i].second;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return fit;
  fit.slope = (n * sxy - sx * sy) / den;
  const double ss_tot = syy - sy * sy / n;
  const double intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0;
  for (std::size_t i = skip; i < pts.size(); ++i) {
    const double e = pts[i].second - (fit.slope * pts[i].first + intercept);
    ss_res += e * e;
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  fit.points = static_cast<int>(pts.size() - skip);
  return fit;
}

}  // namespace subfw
