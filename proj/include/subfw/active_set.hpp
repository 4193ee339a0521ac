#ifndef SUBFW_ACTIVE_SET_HPP
#define SUBFW_ACTIVE_SET_HPP

#include <map>
#include <string>
#include <vector>

#include "subfw/atom.hpp"

namespace subfw {

enum class StepKind { FW, FW_FULL, AWAY, DROP, BAD_DROP };

const char* step_kind_name(StepKind k);
// z_t indicator: 0 exactly for bad drop steps, 1 otherwise.
inline int step_z(StepKind k) { return k == StepKind::BAD_DROP ? 0 : 1; }

// gamma_max = alpha / (1 - alpha) for an away step on an atom with weight
// alpha; requires 0 < alpha < 1.
double gamma_max_for(double away_weight);

// Convex-combination state of a solver iterate: atom -> weight map plus the
// cached dense vector x = sum_v alpha_v v. Weights stay positive, sum to one
// and the cache is maintained incrementally with a periodic full recompute.
class ActiveSet {
 public:
  struct WeightedAtom {
    Atom atom;
    double weight;
  };

  static constexpr double kDropTol = 1e-12;
  static constexpr double kRenormTol = 1e-12;
  static constexpr int kRecomputeEvery = 1000;

  explicit ActiveSet(int dimension);
  static ActiveSet single(int dimension, const Atom& atom);

  int dimension() const { return static_cast<int>(iterate_.size()); }
  int support_size() const { return static_cast<int>(weights_.size()); }
  const std::map<std::string, WeightedAtom>& support() const {
    return weights_;
  }
  const std::vector<double>& iterate() const { return iterate_; }
  bool contains(const std::string& key) const {
    return weights_.count(key) != 0;
  }
  double weight_of(const std::string& key) const;
  double weight_sum() const;

  // x <- (1-gamma) x + gamma s; gamma == 1 collapses the support to {s}.
  void apply_fw_step(const Atom& s, double gamma);

  // Away update along v (must be in the support): weights scale by (1+gamma)
  // and v loses gamma; gamma == gamma_max removes v (DROP when
  // gamma_max >= 1, BAD_DROP otherwise).
  StepKind apply_away_step(const Atom& v, double gamma, double gamma_max);

  // Fresh sum over atoms, ignoring the cache.
  std::vector<double> recompute_iterate() const;

 private:
  void insert_or_add(const Atom& atom, double weight);
  void finish_step();

  std::map<std::string, WeightedAtom> weights_;
  std::vector<double> iterate_;
  long steps_since_recompute_ = 0;
};

}  // namespace subfw

#endif
