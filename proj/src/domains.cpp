#include "subfw/domains.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

namespace subfw {

SubsampleSpec SubsampleSpec::rate(double eta) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw ContractViolation("subsample rate must be in (0, 1]");
  SubsampleSpec s;
  s.mode = Mode::RATE;
  s.eta = eta;
  return s;
}

SubsampleSpec SubsampleSpec::of_count(long p) {
  if (p < 1) throw ContractViolation("subsample count must be >= 1");
  SubsampleSpec s;
  s.mode = Mode::COUNT;
  s.count = p;
  return s;
}

long SubsampleSpec::sample_size(long units) const {
  if (mode == Mode::RATE) {
    const long m = static_cast<long>(std::floor(eta * static_cast<double>(units)));
    return std::max(1L, std::min(m, units));
  }
  return std::min(count, units);
}

double SubsampleSpec::effective_rate(long units) const {
  if (mode == Mode::RATE) return eta;
  return static_cast<double>(std::min(count, units)) /
         static_cast<double>(units);
}

GroupStructure make_overlapping_groups(int d, int group_size, int overlap) {
  if (!(0 <= overlap && overlap < group_size && group_size <= d))
    throw ContractViolation("need 0 <= overlap < group_size <= d");

  GroupStructure gs;
  gs.dimension = d;
  const int step = group_size - overlap;
  int start = 0;
  while (true) {
    if (start + group_size >= d) {
      // Final group shifted to end exactly at d - 1.
      std::vector<int> g(group_size);
      for (int i = 0; i < group_size; ++i) g[i] = d - group_size + i;
      gs.groups.push_back(std::move(g));
      break;
    }
    std::vector<int> g(group_size);
    for (int i = 0; i < group_size; ++i) g[i] = start + i;
    gs.groups.push_back(std::move(g));
    start += step;
  }
  return gs;
}

Atom DomainOracle::atom_at(long) const {
  throw ContractViolation("domain has no finite atom enumeration");
}

long DomainOracle::index_of_atom(const Atom&) const {
  throw ContractViolation("domain has no finite atom enumeration");
}

std::vector<Atom> DomainOracle::sample_complement(
    const std::vector<std::string>&, long, Rng&) const {
  throw ContractViolation("domain has no finite atom enumeration");
}

// ---------------------------------------------------------------------------
// l1 ball

L1Ball::L1Ball(int dimension, double radius) : d_(dimension), radius_(radius) {
  if (dimension <= 0) throw ContractViolation("dimension must be positive");
  if (!(radius > 0.0)) throw ContractViolation("radius must be positive");
}

std::string L1Ball::key_for(int coord, bool positive) {
  return std::string("l1:") + (positive ? '+' : '-') + std::to_string(coord);
}

Atom L1Ball::signed_atom(int coord, bool positive) const {
  return Atom::unit(coord, positive ? radius_ : -radius_,
                    key_for(coord, positive));
}

// Winner over a coordinate set: largest |g_i|, ties to the lowest index,
// positive sign preferred when the coordinate is zero. `coords` ascending.
Atom L1Ball::best_over_coords(const std::vector<int>& coords,
                              const std::vector<double>& values) const {
  if (coords.empty()) throw ContractViolation("empty coordinate set");
  int best = 0;
  double best_abs = -1.0;
  for (std::size_t k = 0; k < coords.size(); ++k) {
    const double a = std::abs(values[k]);
    if (a > best_abs) {
      best_abs = a;
      best = static_cast<int>(k);
    }
  }
  const double g = values[best];
  return signed_atom(coords[static_cast<std::size_t>(best)], g <= 0.0);
}

LmoResult L1Ball::full_lmo(const PartialGradFn& grad) const {
  std::vector<int> coords(d_);
  for (int i = 0; i < d_; ++i) coords[i] = i;
  const std::vector<double> values = grad(coords);
  return {best_over_coords(coords, values), d_};
}

LmoResult L1Ball::subsampled_lmo(const PartialGradFn& grad, long m,
                                 Rng& rng) const {
  if (m < 1) throw ContractViolation("sample size must be >= 1");
  const std::vector<int> coords =
      rng.sample_without_replacement(d_, static_cast<int>(std::min<long>(m, d_)));
  const std::vector<double> values = grad(coords);
  return {best_over_coords(coords, values),
          static_cast<long long>(coords.size())};
}

Atom L1Ball::atom_at(long index) const {
  if (index < 0 || index >= 2L * d_)
    throw ContractViolation("atom index out of range");
  const bool positive = index < d_;
  const int coord = static_cast<int>(positive ? index : index - d_);
  return signed_atom(coord, positive);
}

long L1Ball::index_of_atom(const Atom& atom) const {
  if (atom.entries().size() != 1)
    throw ContractViolation("not an l1 atom");
  const auto& [coord, value] = atom.entries()[0];
  return value > 0.0 ? coord : coord + static_cast<long>(d_);
}

std::vector<Atom> L1Ball::sample_complement(
    const std::vector<std::string>& support_keys, long count, Rng& rng) const {
  std::unordered_set<std::string> excluded(support_keys.begin(),
                                           support_keys.end());
  const long total = 2L * d_;
  const long population = total - static_cast<long>(excluded.size());
  const long m = std::min(count, population);

  std::vector<long> picked;
  if (m >= population) {
    for (long i = 0; i < total; ++i) {
      Atom a = atom_at(i);
      if (!excluded.count(a.key())) picked.push_back(i);
    }
  } else {
    std::unordered_set<long> seen;
    while (static_cast<long>(picked.size()) < m) {
      const long i = static_cast<long>(rng.below(static_cast<std::uint64_t>(total)));
      if (seen.count(i)) continue;
      Atom a = atom_at(i);
      if (excluded.count(a.key())) continue;
      seen.insert(i);
      picked.push_back(i);
    }
    std::sort(picked.begin(), picked.end());
  }

  std::vector<Atom> out;
  out.reserve(picked.size());
  for (long i : picked) out.push_back(atom_at(i));
  return out;
}

// ---------------------------------------------------------------------------
// latent group lasso ball

LatentGroupBall::LatentGroupBall(GroupStructure groups, double radius)
    : groups_(std::move(groups)), radius_(radius) {
  if (groups_.groups.empty()) throw ContractViolation("no groups");
  if (!(radius > 0.0)) throw ContractViolation("radius must be positive");
  std::vector<char> covered(groups_.dimension, 0);
  for (const auto& g : groups_.groups) {
    if (g.empty()) throw ContractViolation("empty group");
    for (int i : g) {
      if (i < 0 || i >= groups_.dimension)
        throw ContractViolation("group coordinate out of range");
      covered[static_cast<std::size_t>(i)] = 1;
    }
  }
  for (char c : covered)
    if (!c) throw ContractViolation("groups must cover [0, d)");
}

// Builds the hyper-disk atom for the winning group among `group_ids`:
// -beta grad_(g*) / ||grad_(g*)||, a canonical axis atom on all-zero blocks.
// Group scores tie to the lowest group id. `coords`/`values` hold the
// evaluated gradient on the union of the groups.
Atom LatentGroupBall::best_over_groups(const std::vector<int>& group_ids,
                                       const std::vector<int>& coords,
                                       const std::vector<double>& values) const {
  auto value_at = [&](int coord) {
    const auto it = std::lower_bound(coords.begin(), coords.end(), coord);
    return values[static_cast<std::size_t>(it - coords.begin())];
  };

  int best_gid = group_ids[0];
  double best_norm2 = -1.0;
  for (int gid : group_ids) {
    double n2 = 0.0;
    for (int c : groups_.groups[static_cast<std::size_t>(gid)]) {
      const double v = value_at(c);
      n2 += v * v;
    }
    if (n2 > best_norm2) {
      best_norm2 = n2;
      best_gid = gid;
    }
  }

  const auto& g = groups_.groups[static_cast<std::size_t>(best_gid)];
  const double norm = std::sqrt(best_norm2);

  std::vector<Atom::Entry> entries;
  char qbuf[32];
  std::string key = "g" + std::to_string(best_gid) + ":";
  if (norm == 0.0) {
    // Total oracle on a zero block: canonical axis atom.
    entries.emplace_back(g[0], radius_);
    key += "axis";
    return Atom(std::move(entries), std::move(key));
  }

  std::vector<int> sorted_g(g);
  std::sort(sorted_g.begin(), sorted_g.end());
  entries.reserve(sorted_g.size());
  for (int c : sorted_g) {
    const double dir = -value_at(c) / norm;
    if (dir != 0.0) entries.emplace_back(c, radius_ * dir);
    // Direction quantized to 12 decimals gives atoms from near-identical
    // gradients the same identity.
    std::snprintf(qbuf, sizeof(qbuf), "%.12f,", dir);
    key += qbuf;
  }
  if (entries.empty()) entries.emplace_back(sorted_g[0], radius_);
  return Atom(std::move(entries), std::move(key));
}

LmoResult LatentGroupBall::full_lmo(const PartialGradFn& grad) const {
  std::vector<int> coords(groups_.dimension);
  for (int i = 0; i < groups_.dimension; ++i) coords[i] = i;
  const std::vector<double> values = grad(coords);
  std::vector<int> all(groups_.group_count());
  for (int i = 0; i < groups_.group_count(); ++i) all[i] = i;
  return {best_over_groups(all, coords, values),
          static_cast<long long>(coords.size())};
}

LmoResult LatentGroupBall::subsampled_lmo(const PartialGradFn& grad, long m,
                                          Rng& rng) const {
  if (m < 1) throw ContractViolation("sample size must be >= 1");
  const std::vector<int> gids = rng.sample_without_replacement(
      groups_.group_count(),
      static_cast<int>(std::min<long>(m, groups_.group_count())));

  std::vector<int> coords;
  for (int gid : gids)
    for (int c : groups_.groups[static_cast<std::size_t>(gid)])
      coords.push_back(c);
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());

  const std::vector<double> values = grad(coords);
  return {best_over_groups(gids, coords, values),
          static_cast<long long>(coords.size())};
}

// ---------------------------------------------------------------------------
// explicit finite atom set

FiniteAtomSet::FiniteAtomSet(int dimension, double radius,
                             std::vector<Atom> atoms)
    : d_(dimension), radius_(radius), atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw ContractViolation("atom list must be non-empty");
  for (long i = 0; i < static_cast<long>(atoms_.size()); ++i) {
    if (atoms_[static_cast<std::size_t>(i)].max_coord() >= d_)
      throw ContractViolation("atom coordinate out of range");
    index_by_key_.emplace(atoms_[static_cast<std::size_t>(i)].key(), i);
  }
}

FiniteAtomSet FiniteAtomSet::simplex(int dimension, double radius) {
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(dimension));
  for (int i = 0; i < dimension; ++i)
    atoms.push_back(Atom::unit(i, radius, "f:" + std::to_string(i)));
  return FiniteAtomSet(dimension, radius, std::move(atoms));
}

std::vector<int> FiniteAtomSet::all_coords() const {
  std::vector<int> coords;
  for (const Atom& a : atoms_)
    for (const auto& [c, v] : a.entries()) coords.push_back(c);
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  return coords;
}

LmoResult FiniteAtomSet::full_lmo(const PartialGradFn& grad) const {
  const std::vector<int> coords = all_coords();
  const std::vector<double> values = grad(coords);
  std::vector<double> dense(static_cast<std::size_t>(d_), 0.0);
  for (std::size_t k = 0; k < coords.size(); ++k)
    dense[static_cast<std::size_t>(coords[k])] = values[k];
  return {finite_lmo(dense, atoms_), static_cast<long long>(coords.size())};
}

LmoResult FiniteAtomSet::subsampled_lmo(const PartialGradFn& grad, long m,
                                        Rng& rng) const {
  if (m < 1) throw ContractViolation("sample size must be >= 1");
  const long n = finite_atom_count();
  const std::vector<int> picked =
      rng.sample_without_replacement(static_cast<int>(n),
                                     static_cast<int>(std::min<long>(m, n)));

  std::vector<int> coords;
  for (int i : picked)
    for (const auto& [c, v] : atoms_[static_cast<std::size_t>(i)].entries())
      coords.push_back(c);
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());

  const std::vector<double> values = grad(coords);
  std::vector<double> dense(static_cast<std::size_t>(d_), 0.0);
  for (std::size_t k = 0; k < coords.size(); ++k)
    dense[static_cast<std::size_t>(coords[k])] = values[k];

  std::vector<long> subset(picked.begin(), picked.end());
  return {finite_lmo(dense, atoms_, &subset),
          static_cast<long long>(coords.size())};
}

Atom FiniteAtomSet::atom_at(long index) const {
  if (index < 0 || index >= finite_atom_count())
    throw ContractViolation("atom index out of range");
  return atoms_[static_cast<std::size_t>(index)];
}

long FiniteAtomSet::index_of_atom(const Atom& atom) const {
  auto it = index_by_key_.find(atom.key());
  if (it == index_by_key_.end())
    throw ContractViolation("unknown atom: " + atom.key());
  return it->second;
}

std::vector<Atom> FiniteAtomSet::sample_complement(
    const std::vector<std::string>& support_keys, long count, Rng& rng) const {
  std::unordered_set<std::string> excluded(support_keys.begin(),
                                           support_keys.end());
  const long total = finite_atom_count();
  const long population = total - static_cast<long>(excluded.size());
  const long m = std::min(count, population);

  std::vector<long> picked;
  if (m >= population) {
    for (long i = 0; i < total; ++i)
      if (!excluded.count(atoms_[static_cast<std::size_t>(i)].key()))
        picked.push_back(i);
  } else {
    std::unordered_set<long> seen;
    while (static_cast<long>(picked.size()) < m) {
      const long i = static_cast<long>(rng.below(static_cast<std::uint64_t>(total)));
      if (seen.count(i)) continue;
      if (excluded.count(atoms_[static_cast<std::size_t>(i)].key())) continue;
      seen.insert(i);
      picked.push_back(i);
    }
    std::sort(picked.begin(), picked.end());
  }

  std::vector<Atom> out;
  out.reserve(picked.size());
  for (long i : picked) out.push_back(atoms_[static_cast<std::size_t>(i)]);
  return out;
}

// ---------------------------------------------------------------------------
// free functions

Atom l1_full_lmo(const std::vector<double>& gradient, double radius) {
  if (gradient.empty()) throw ContractViolation("empty gradient");
  L1Ball ball(static_cast<int>(gradient.size()), radius);
  auto grad = [&](const std::vector<int>& coords) {
    std::vector<double> out(coords.size());
    for (std::size_t k = 0; k < coords.size(); ++k)
      out[k] = gradient[static_cast<std::size_t>(coords[k])];
    return out;
  };
  return ball.full_lmo(grad).atom;
}

LmoResult l1_subsampled_lmo(const PartialGradFn& grad, int dimension,
                            double radius, const SubsampleSpec& spec,
                            Rng& rng) {
  L1Ball ball(dimension, radius);
  return ball.subsampled_lmo(grad, spec.sample_size(dimension), rng);
}

Atom lgl_full_lmo(const PartialGradFn& grad, const GroupStructure& groups,
                  double radius) {
  LatentGroupBall ball(groups, radius);
  return ball.full_lmo(grad).atom;
}

LmoResult lgl_subsampled_lmo(const PartialGradFn& grad,
                             const GroupStructure& groups, double radius,
                             const SubsampleSpec& spec, Rng& rng) {
  LatentGroupBall ball(groups, radius);
  return ball.subsampled_lmo(grad, spec.sample_size(ball.sample_unit_count()),
                             rng);
}

Atom finite_lmo(const std::vector<double>& gradient,
                const std::vector<Atom>& atoms,
                const std::vector<long>* subset) {
  if (atoms.empty()) throw ContractViolation("empty atom set");
  if (subset && subset->empty()) throw ContractViolation("empty subset");

  long best = -1;
  double best_dot = 0.0;
  auto consider = [&](long i) {
    const double d = atoms[static_cast<std::size_t>(i)].dot(gradient);
    if (best < 0 || d < best_dot) {
      best = i;
      best_dot = d;
    }
  };
  if (subset)
    for (long i : *subset) consider(i);
  else
    for (long i = 0; i < static_cast<long>(atoms.size()); ++i) consider(i);
  return atoms[static_cast<std::size_t>(best)];
}

}  // namespace subfw
