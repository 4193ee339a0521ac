#include "subfw/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace subfw {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::FW: return "fw";
    case Algorithm::RFW_V1: return "rfw-v1";
    case Algorithm::RFW_V2: return "rfw-v2";
    case Algorithm::AFW: return "afw";
    case Algorithm::RAFW: return "rafw";
  }
  return "?";
}

std::optional<Algorithm> algorithm_from_name(const std::string& name) {
  if (name == "fw") return Algorithm::FW;
  if (name == "rfw-v1") return Algorithm::RFW_V1;
  if (name == "rfw-v2") return Algorithm::RFW_V2;
  if (name == "afw") return Algorithm::AFW;
  if (name == "rafw") return Algorithm::RAFW;
  return std::nullopt;
}

GapReport compute_gaps(const std::vector<double>& gradient, const Atom& s_t,
                       const Atom& v_t, const std::vector<double>& x_t,
                       const Atom* full_atom) {
  double gx = 0.0;
  for (std::size_t i = 0; i < x_t.size(); ++i) gx += gradient[i] * x_t[i];
  const double a_s = s_t.dot(gradient);
  const double a_v = v_t.dot(gradient);

  GapReport r;
  r.partial_gap = a_v - a_s;  // <-grad, s - v>
  r.away_gap = a_v - gx;      // <-grad, x - v>
  if (full_atom) {
    const double a_f = full_atom->dot(gradient);
    r.pairwise_gap = a_v - a_f;
    r.full_fw_gap = gx - a_f;
  }
  return r;
}

namespace {

// Per-iteration gradient cache: coordinates are evaluated once and charged
// once, repeated requests are served from the cache.
class CachedGradient {
 public:
  CachedGradient(ObjectiveModel& obj, long long* counter)
      : obj_(obj), counter_(counter) {}

  std::vector<double> fetch(const std::vector<int>& coords) {
    std::vector<int> missing;
    for (int c : coords)
      if (!cache_.count(c)) missing.push_back(c);
    if (!missing.empty()) {
      const std::vector<double> vals = obj_.partial_gradient(missing);
      for (std::size_t k = 0; k < missing.size(); ++k)
        cache_.emplace(missing[k], vals[k]);
      *counter_ += static_cast<long long>(missing.size());
    }
    std::vector<double> out(coords.size());
    for (std::size_t k = 0; k < coords.size(); ++k)
      out[k] = cache_.at(coords[k]);
    return out;
  }

  double dot_atom(const Atom& a) const {
    double acc = 0.0;
    for (const auto& [c, v] : a.entries()) acc += v * cache_.at(c);
    return acc;
  }

  PartialGradFn fn() {
    return [this](const std::vector<int>& coords) { return fetch(coords); };
  }

 private:
  ObjectiveModel& obj_;
  long long* counter_;
  std::map<int, double> cache_;
};

std::vector<int> atom_coord_union(const std::vector<const Atom*>& atoms) {
  std::vector<int> coords;
  for (const Atom* a : atoms)
    for (const auto& [c, v] : a->entries()) coords.push_back(c);
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  return coords;
}

long derive_period(int k, double eta) {
  const long inv = static_cast<long>(std::floor(1.0 / eta));
  return std::max(1L, k * std::max(1L, inv));
}

SolveResult run_rfw_loop(ObjectiveModel& obj, const DomainOracle& domain,
                         const SolverConfig& config, const ActiveSet& x0,
                         long long initial_coords) {
  if (config.max_iters < 1) throw ContractViolation("max_iters must be >= 1");
  const bool deterministic = config.algorithm == Algorithm::FW;
  const bool variant2 = config.algorithm == Algorithm::RFW_V2;
  if (variant2 && !(config.curvature && *config.curvature > 0.0))
    throw ContractViolation("rfw-v2 requires a positive curvature bound");

  const long units = domain.sample_unit_count();
  const long m = config.subsample.sample_size(units);
  const double eta =
      deterministic ? 1.0 : config.subsample.effective_rate(units);
  const long period = derive_period(config.checkpoint_k, eta);

  SolveResult result{x0, {}, false, 0};
  ActiveSet& active = result.final_set;
  obj.reset(active.iterate());
  Rng rng(config.seed);
  long long coords_cum = initial_coords;

  for (long t = 0; t < config.max_iters; ++t) {
    CachedGradient cg(obj, &coords_cum);
    const bool at_period = t > 0 && t % period == 0;
    // The deterministic algorithm pays for a full LMO every iteration, so
    // the gap is recorded for free; the stop rule still fires only on the
    // checkpoint schedule, keeping the eta = 1 reduction step-for-step.
    const bool evaluate_full = deterministic || at_period;

    std::optional<double> full_gap;
    std::optional<Atom> full_atom;
    if (evaluate_full) {
      full_atom = domain.full_lmo(cg.fn()).atom;
      full_gap = obj.grad_dot_iterate() - cg.dot_atom(*full_atom);
    }

    Atom s_t = deterministic ? *full_atom
                             : domain.subsampled_lmo(cg.fn(), m, rng).atom;
    const double partial_gap = obj.grad_dot_iterate() - cg.dot_atom(s_t);

    TraceRecord rec;
    rec.iter = t;
    rec.gamma_max = 1.0;
    rec.partial_gap = partial_gap;
    rec.away_gap = 0.0;
    rec.full_gap = full_gap;
    rec.objective = obj.value();
    rec.support_size = active.support_size();
    rec.dir_dot = partial_gap;
    rec.atom_key = s_t.key();

    if (at_period && config.tolerance > 0.0 &&
        *full_gap <= config.tolerance) {
      rec.step = StepKind::FW;
      rec.gamma = 0.0;
      rec.grad_coords_cum = coords_cum;
      result.trace.push_back(rec);
      result.converged = true;
      result.iterations = t;
      return result;
    }

    double gamma;
    if (variant2) {
      rec.gamma_unclipped = partial_gap / *config.curvature;
      gamma = std::min(1.0, std::max(0.0, rec.gamma_unclipped));
    } else {
      gamma = obj.line_search_toward(s_t, false, 1.0);
    }
    rec.gamma = gamma;
    rec.step = gamma == 1.0 ? StepKind::FW_FULL : StepKind::FW;
    rec.grad_coords_cum = coords_cum;
    result.trace.push_back(rec);

    active.apply_fw_step(s_t, gamma);
    obj.apply_step(s_t, 1.0 - gamma, gamma);
    result.iterations = t + 1;
  }
  return result;
}

SolveResult run_rafw_loop(ObjectiveModel& obj, const DomainOracle& domain,
                          const SolverConfig& config, const ActiveSet& x0,
                          long long initial_coords) {
  if (config.max_iters < 1) throw ContractViolation("max_iters must be >= 1");
  const long atom_count = domain.finite_atom_count();
  if (atom_count <= 0)
    throw ContractViolation(
        "away-step solvers require a finite set of extreme atoms");

  const bool deterministic = config.algorithm == Algorithm::AFW;
  long p;
  if (deterministic) {
    p = atom_count;
  } else if (config.subsample.mode == SubsampleSpec::Mode::COUNT) {
    p = std::min(config.subsample.count, atom_count);
  } else {
    p = std::max(1L, static_cast<long>(std::floor(
                         config.subsample.eta * static_cast<double>(atom_count))));
  }
  const double eta = static_cast<double>(p) / static_cast<double>(atom_count);
  const long period = derive_period(config.checkpoint_k, eta);

  SolveResult result{x0, {}, false, 0};
  ActiveSet& active = result.final_set;
  obj.reset(active.iterate());
  Rng rng(config.seed);
  long long coords_cum = initial_coords;

  for (long t = 0; t < config.max_iters; ++t) {
    CachedGradient cg(obj, &coords_cum);
    const bool checkpoint = t > 0 && t % period == 0;

    std::optional<Atom> full_atom;
    if (checkpoint) full_atom = domain.full_lmo(cg.fn()).atom;

    std::vector<std::string> support_keys;
    std::vector<const Atom*> support_atoms;
    support_keys.reserve(active.support().size());
    for (const auto& [key, wa] : active.support()) {
      support_keys.push_back(key);
      support_atoms.push_back(&wa.atom);
    }

    const std::vector<Atom> sampled =
        domain.sample_complement(support_keys, p, rng);

    std::vector<const Atom*> candidates = support_atoms;
    for (const Atom& a : sampled) candidates.push_back(&a);
    std::vector<int> coords = atom_coord_union(candidates);
    cg.fetch(coords);

    // Per-atom gradient alignments; candidates in atom-index order so ties
    // resolve identically with and without subsampling.
    std::sort(candidates.begin(), candidates.end(),
              [&](const Atom* a, const Atom* b) {
                return domain.index_of_atom(*a) < domain.index_of_atom(*b);
              });
    const Atom* s_t = candidates[0];
    double a_s = std::numeric_limits<double>::infinity();
    for (const Atom* a : candidates) {
      const double d = cg.dot_atom(*a);
      if (d < a_s) {
        a_s = d;
        s_t = a;
      }
    }

    const Atom* v_t = support_atoms[0];
    double a_v = -std::numeric_limits<double>::infinity();
    double a_x = 0.0;
    for (const auto& [key, wa] : active.support()) {
      const double d = cg.dot_atom(wa.atom);
      a_x += wa.weight * d;
      if (d > a_v) {
        a_v = d;
        v_t = &wa.atom;
      }
    }

    const double partial_gap = a_v - a_s;  // g_t >= 0 by construction
    const double away_gap = a_v - a_x;     // g_t^A
    const double fw_align = a_x - a_s;     // <-grad, d^FW>

    TraceRecord rec;
    rec.iter = t;
    rec.partial_gap = partial_gap;
    rec.away_gap = away_gap;
    rec.objective = obj.value();
    rec.support_size = active.support_size();

    if (checkpoint) {
      const double full_gap = a_x - cg.dot_atom(*full_atom);
      rec.full_gap = full_gap;
      if (config.tolerance > 0.0 && full_gap <= config.tolerance) {
        // Terminal row: no step is applied; dir_dot carries the alignment
        // of the direction the iteration would have chosen.
        rec.step = StepKind::FW;
        rec.gamma = 0.0;
        rec.gamma_max = 1.0;
        rec.dir_dot = std::max(fw_align, away_gap);
        rec.atom_key = fw_align >= away_gap ? s_t->key() : v_t->key();
        rec.grad_coords_cum = coords_cum;
        result.trace.push_back(rec);
        result.converged = true;
        result.iterations = t;
        return result;
      }
    }

    // Ties pick the FW step: it never caps gamma_max below 1.
    if (fw_align >= away_gap) {
      const double gamma = obj.line_search_toward(*s_t, false, 1.0);
      rec.gamma = gamma;
      rec.gamma_max = 1.0;
      rec.step = gamma == 1.0 ? StepKind::FW_FULL : StepKind::FW;
      rec.dir_dot = fw_align;
      rec.atom_key = s_t->key();
      rec.grad_coords_cum = coords_cum;
      result.trace.push_back(rec);
      const Atom s_copy = *s_t;  // step mutates the support it points into
      active.apply_fw_step(s_copy, gamma);
      obj.apply_step(s_copy, 1.0 - gamma, gamma);
    } else {
      const double alpha = active.weight_of(v_t->key());
      const double gamma_max = gamma_max_for(alpha);
      const double gamma = obj.line_search_toward(*v_t, true, gamma_max);
      rec.gamma = gamma;
      rec.gamma_max = gamma_max;
      rec.dir_dot = away_gap;
      rec.atom_key = v_t->key();
      rec.grad_coords_cum = coords_cum;
      const Atom v_copy = *v_t;
      rec.step = active.apply_away_step(v_copy, gamma, gamma_max);
      result.trace.push_back(rec);
      obj.apply_step(v_copy, 1.0 + gamma, -gamma);
    }
    result.iterations = t + 1;
  }
  return result;
}

}  // namespace

ActiveSet default_x0(ObjectiveModel& obj, const DomainOracle& domain,
                     long long* grad_coords_charged) {
  obj.reset(std::vector<double>(static_cast<std::size_t>(obj.dimension()), 0.0));
  long long charged = 0;
  CachedGradient cg(obj, &charged);
  const Atom a = domain.full_lmo(cg.fn()).atom;
  if (grad_coords_charged) *grad_coords_charged = charged;
  return ActiveSet::single(domain.dimension(), a);
}

long checkpoint_period(const SolverConfig& config, const DomainOracle& domain) {
  double eta;
  if (config.algorithm == Algorithm::FW) {
    eta = 1.0;
  } else if (config.algorithm == Algorithm::AFW ||
             config.algorithm == Algorithm::RAFW) {
    const long n = domain.finite_atom_count();
    long p;
    if (config.algorithm == Algorithm::AFW) {
      p = n;
    } else if (config.subsample.mode == SubsampleSpec::Mode::COUNT) {
      p = std::min(config.subsample.count, n);
    } else {
      p = std::max(1L, static_cast<long>(std::floor(
                           config.subsample.eta * static_cast<double>(n))));
    }
    eta = static_cast<double>(p) / static_cast<double>(n);
  } else {
    eta = config.subsample.effective_rate(domain.sample_unit_count());
  }
  return derive_period(config.checkpoint_k, eta);
}

SolveResult run_solver(ObjectiveModel& obj, const DomainOracle& domain,
                       const SolverConfig& config, const ActiveSet& x0,
                       long long initial_grad_coords) {
  switch (config.algorithm) {
    case Algorithm::FW:
    case Algorithm::RFW_V1:
    case Algorithm::RFW_V2:
      return run_rfw_loop(obj, domain, config, x0, initial_grad_coords);
    case Algorithm::AFW:
    case Algorithm::RAFW:
      return run_rafw_loop(obj, domain, config, x0, initial_grad_coords);
  }
  throw ContractViolation("unknown algorithm");
}

bool max_step_progress_check(const std::vector<TraceRecord>& trace,
                             double eps) {
  for (const TraceRecord& r : trace) {
    if (r.partial_gap < 0.0) return false;
    if (r.dir_dot < r.partial_gap / 2.0 - eps) return false;
  }
  return true;
}

RafwProbe rafw_probe(ObjectiveModel& obj, const DomainOracle& domain,
                     const ActiveSet& state, long p, Rng& rng) {
  obj.reset(state.iterate());
  long long scratch = 0;
  CachedGradient cg(obj, &scratch);

  std::vector<std::string> support_keys;
  std::vector<const Atom*> support_atoms;
  for (const auto& [key, wa] : state.support()) {
    support_keys.push_back(key);
    support_atoms.push_back(&wa.atom);
  }
  const std::vector<Atom> sampled =
      domain.sample_complement(support_keys, p, rng);

  std::vector<const Atom*> candidates = support_atoms;
  for (const Atom& a : sampled) candidates.push_back(&a);
  cg.fetch(atom_coord_union(candidates));
  std::sort(candidates.begin(), candidates.end(),
            [&](const Atom* a, const Atom* b) {
              return domain.index_of_atom(*a) < domain.index_of_atom(*b);
            });

  const Atom* s_t = candidates[0];
  double a_s = std::numeric_limits<double>::infinity();
  for (const Atom* a : candidates) {
    const double d = cg.dot_atom(*a);
    if (d < a_s) {
      a_s = d;
      s_t = a;
    }
  }
  const Atom* v_t = support_atoms[0];
  double a_v = -std::numeric_limits<double>::infinity();
  double a_x = 0.0;
  for (const auto& [key, wa] : state.support()) {
    const double d = cg.dot_atom(wa.atom);
    a_x += wa.weight * d;
    if (d > a_v) {
      a_v = d;
      v_t = &wa.atom;
    }
  }

  RafwProbe probe;
  probe.s_t = *s_t;
  probe.v_t = *v_t;
  probe.partial_gap = a_v - a_s;
  probe.away_gap = a_v - a_x;
  probe.fw_step = (a_x - a_s) >= probe.away_gap;
  if (probe.fw_step) {
    probe.gamma_max = 1.0;
    probe.gamma = obj.line_search_toward(*s_t, false, 1.0);
    probe.z = 1;
  } else {
    const double alpha = state.weight_of(v_t->key());
    probe.gamma_max = gamma_max_for(alpha);
    probe.gamma = obj.line_search_toward(*v_t, true, probe.gamma_max);
    const bool drop = probe.gamma == probe.gamma_max;
    probe.z = (drop && probe.gamma_max < 1.0) ? 0 : 1;
  }
  return probe;
}

}  // namespace subfw
