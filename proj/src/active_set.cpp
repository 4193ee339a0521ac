#include "subfw/active_set.hpp"

#include <algorithm>
#include <cmath>

namespace subfw {

Atom::Atom(std::vector<Entry> entries, std::string key)
    : entries_(std::move(entries)), key_(std::move(key)) {
  int last = -1;
  for (const auto& [coord, value] : entries_) {
    if (coord <= last)
      throw ContractViolation("atom entries must be strictly ascending");
    if (coord < 0) throw ContractViolation("atom coordinate must be >= 0");
    if (value == 0.0) throw ContractViolation("atom stores no zero values");
    last = coord;
  }
}

Atom Atom::unit(int coord, double value, std::string key) {
  return Atom({{coord, value}}, std::move(key));
}

double Atom::dot(const std::vector<double>& dense) const {
  double acc = 0.0;
  for (const auto& [coord, value] : entries_)
    acc += value * dense[static_cast<std::size_t>(coord)];
  return acc;
}

void Atom::axpy(double coef, std::vector<double>& dense) const {
  for (const auto& [coord, value] : entries_)
    dense[static_cast<std::size_t>(coord)] += coef * value;
}

int Atom::max_coord() const {
  return entries_.empty() ? -1 : entries_.back().first;
}

const char* step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::FW: return "FW";
    case StepKind::FW_FULL: return "FW_FULL";
    case StepKind::AWAY: return "AWAY";
    case StepKind::DROP: return "DROP";
    case StepKind::BAD_DROP: return "BAD_DROP";
  }
  return "?";
}

double gamma_max_for(double away_weight) {
  if (!(away_weight > 0.0) || !(away_weight < 1.0))
    throw ContractViolation("gamma_max_for requires weight in (0, 1)");
  return away_weight / (1.0 - away_weight);
}

ActiveSet::ActiveSet(int dimension) : iterate_(dimension, 0.0) {
  if (dimension <= 0) throw ContractViolation("dimension must be positive");
}

ActiveSet ActiveSet::single(int dimension, const Atom& atom) {
  ActiveSet s(dimension);
  s.weights_.emplace(atom.key(), WeightedAtom{atom, 1.0});
  atom.axpy(1.0, s.iterate_);
  return s;
}

double ActiveSet::weight_of(const std::string& key) const {
  auto it = weights_.find(key);
  return it == weights_.end() ? 0.0 : it->second.weight;
}

double ActiveSet::weight_sum() const {
  double sum = 0.0;
  for (const auto& [key, wa] : weights_) sum += wa.weight;
  return sum;
}

void ActiveSet::apply_fw_step(const Atom& s, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw ContractViolation("fw step requires gamma in [0, 1]");

  if (gamma == 1.0) {
    weights_.clear();
    weights_.emplace(s.key(), WeightedAtom{s, 1.0});
    std::fill(iterate_.begin(), iterate_.end(), 0.0);
    s.axpy(1.0, iterate_);
    finish_step();
    return;
  }

  const double keep = 1.0 - gamma;
  for (auto& [key, wa] : weights_) wa.weight *= keep;
  insert_or_add(s, gamma);

  for (double& v : iterate_) v *= keep;
  s.axpy(gamma, iterate_);

  // Weights scaled to within the drop tolerance are purged.
  for (auto it = weights_.begin(); it != weights_.end();) {
    if (it->second.weight <= kDropTol)
      it = weights_.erase(it);
    else
      ++it;
  }
  finish_step();
}

StepKind ActiveSet::apply_away_step(const Atom& v, double gamma,
                                    double gamma_max) {
  auto it = weights_.find(v.key());
  if (it == weights_.end())
    throw ContractViolation("away atom is not in the support");
  if (!(gamma >= 0.0) || gamma > gamma_max)
    throw ContractViolation("away step requires gamma in [0, gamma_max]");
  if (it->second.weight >= 1.0)
    throw ContractViolation(
        "away step from a singleton support cannot be chosen");

  const double grow = 1.0 + gamma;
  for (auto& [key, wa] : weights_) wa.weight *= grow;
  it->second.weight -= gamma;

  for (double& x : iterate_) x *= grow;
  v.axpy(-gamma, iterate_);

  StepKind kind = StepKind::AWAY;
  if (it->second.weight <= kDropTol) {
    weights_.erase(it);
    kind = gamma_max >= 1.0 ? StepKind::DROP : StepKind::BAD_DROP;
  }
  finish_step();
  return kind;
}

std::vector<double> ActiveSet::recompute_iterate() const {
  std::vector<double> x(iterate_.size(), 0.0);
  for (const auto& [key, wa] : weights_) wa.atom.axpy(wa.weight, x);
  return x;
}

void ActiveSet::insert_or_add(const Atom& atom, double weight) {
  auto [it, inserted] = weights_.emplace(atom.key(), WeightedAtom{atom, weight});
  if (!inserted) it->second.weight += weight;
}

void ActiveSet::finish_step() {
  if (weights_.empty())
    throw ContractViolation("support emptied; steps must keep |S| >= 1");

  const double sum = weight_sum();
  if (std::abs(sum - 1.0) > kRenormTol) {
    const double inv = 1.0 / sum;
    for (auto& [key, wa] : weights_) wa.weight *= inv;
    for (double& x : iterate_) x *= inv;
  }

  if (++steps_since_recompute_ >= kRecomputeEvery) {
    iterate_ = recompute_iterate();
    steps_since_recompute_ = 0;
  }
}

}  // namespace subfw
