#ifndef SUBFW_DOMAINS_HPP
#define SUBFW_DOMAINS_HPP

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "subfw/atom.hpp"
#include "subfw/rng.hpp"

namespace subfw {

// Evaluates the requested gradient coordinates (ascending, no duplicates)
// and returns values aligned with the request.
using PartialGradFn =
    std::function<std::vector<double>(const std::vector<int>&)>;

// How the linear oracle is subsampled: a rate eta in (0,1] over the domain's
// sampling units, or a fixed count p of units per draw.
struct SubsampleSpec {
  enum class Mode { RATE, COUNT };
  Mode mode = Mode::RATE;
  double eta = 1.0;
  long count = 1;

  static SubsampleSpec rate(double eta);
  static SubsampleSpec of_count(long p);
  // Effective sample size for a domain with `units` sampling units:
  // max(1, floor(eta * units)) in RATE mode, min(count, units) otherwise.
  long sample_size(long units) const;
  // eta used by the checkpoint schedule: the rate itself, or count/units.
  double effective_rate(long units) const;
};

// Overlapping coordinate groups covering [0, d).
struct GroupStructure {
  std::vector<std::vector<int>> groups;
  int dimension = 0;

  int group_count() const { return static_cast<int>(groups.size()); }
};

// Chains of size `group_size` stepping by group_size - overlap; the final
// group is shifted to end exactly at d - 1 so the union is all of [0, d).
GroupStructure make_overlapping_groups(int d, int group_size, int overlap);

struct LmoResult {
  Atom atom;
  long long coords_evaluated = 0;
};

// Contract for the atomic set A with conv(A) = M: full and subsampled linear
// minimization, plus atom enumeration for finite families.
class DomainOracle {
 public:
  virtual ~DomainOracle() = default;

  virtual int dimension() const = 0;
  virtual double radius() const = 0;
  // Number of atoms in a finite family, 0 for continuous families.
  virtual long finite_atom_count() const = 0;
  // Denominator for RATE-mode sampling (d for l1 coordinates, |G| for the
  // group ball, atom count for explicit sets).
  virtual long sample_unit_count() const = 0;

  virtual LmoResult full_lmo(const PartialGradFn& grad) const = 0;
  virtual LmoResult subsampled_lmo(const PartialGradFn& grad, long m,
                                   Rng& rng) const = 0;

  // Finite families only: enumeration and uniform sampling from the
  // complement of a support set.
  virtual Atom atom_at(long index) const;
  virtual long index_of_atom(const Atom& atom) const;
  virtual std::vector<Atom> sample_complement(
      const std::vector<std::string>& support_keys, long count,
      Rng& rng) const;
};

// l1 ball of a given radius: atoms are the 2d signed scaled basis vectors.
// Subsampling draws coordinate indices, each carrying both signs.
class L1Ball : public DomainOracle {
 public:
  L1Ball(int dimension, double radius);

  int dimension() const override { return d_; }
  double radius() const override { return radius_; }
  long finite_atom_count() const override { return 2L * d_; }
  long sample_unit_count() const override { return d_; }

  LmoResult full_lmo(const PartialGradFn& grad) const override;
  LmoResult subsampled_lmo(const PartialGradFn& grad, long m,
                           Rng& rng) const override;

  Atom atom_at(long index) const override;
  long index_of_atom(const Atom& atom) const override;
  std::vector<Atom> sample_complement(
      const std::vector<std::string>& support_keys, long count,
      Rng& rng) const override;

  static std::string key_for(int coord, bool positive);

 private:
  Atom signed_atom(int coord, bool positive) const;
  Atom best_over_coords(const std::vector<int>& coords,
                        const std::vector<double>& values) const;

  int d_;
  double radius_;
};

// Latent group lasso ball: the convex hull of per-group hyper-disks of
// radius beta. A continuous family; subsampling draws whole groups.
class LatentGroupBall : public DomainOracle {
 public:
  LatentGroupBall(GroupStructure groups, double radius);

  int dimension() const override { return groups_.dimension; }
  double radius() const override { return radius_; }
  long finite_atom_count() const override { return 0; }
  long sample_unit_count() const override { return groups_.group_count(); }

  LmoResult full_lmo(const PartialGradFn& grad) const override;
  LmoResult subsampled_lmo(const PartialGradFn& grad, long m,
                           Rng& rng) const override;

  const GroupStructure& groups() const { return groups_; }

 private:
  Atom best_over_groups(const std::vector<int>& group_ids,
                        const std::vector<int>& coords,
                        const std::vector<double>& values) const;

  GroupStructure groups_;
  double radius_;
};

// Explicit finite atom list; LMO by enumeration, ties by list position.
class FiniteAtomSet : public DomainOracle {
 public:
  FiniteAtomSet(int dimension, double radius, std::vector<Atom> atoms);

  // Scaled standard simplex: atoms radius * e_i for i in [0, d).
  static FiniteAtomSet simplex(int dimension, double radius);

  int dimension() const override { return d_; }
  double radius() const override { return radius_; }
  long finite_atom_count() const override {
    return static_cast<long>(atoms_.size());
  }
  long sample_unit_count() const override {
    return static_cast<long>(atoms_.size());
  }

  LmoResult full_lmo(const PartialGradFn& grad) const override;
  LmoResult subsampled_lmo(const PartialGradFn& grad, long m,
                           Rng& rng) const override;

  Atom atom_at(long index) const override;
  long index_of_atom(const Atom& atom) const override;
  std::vector<Atom> sample_complement(
      const std::vector<std::string>& support_keys, long count,
      Rng& rng) const override;

  const std::vector<Atom>& atoms() const { return atoms_; }

 private:
  std::vector<int> all_coords() const;

  int d_;
  double radius_;
  std::vector<Atom> atoms_;
  std::map<std::string, long> index_by_key_;
};

// Free-function forms of the oracle operations.
Atom l1_full_lmo(const std::vector<double>& gradient, double radius);
LmoResult l1_subsampled_lmo(const PartialGradFn& grad, int dimension,
                            double radius, const SubsampleSpec& spec,
                            Rng& rng);
Atom lgl_full_lmo(const PartialGradFn& grad, const GroupStructure& groups,
                  double radius);
LmoResult lgl_subsampled_lmo(const PartialGradFn& grad,
                             const GroupStructure& groups, double radius,
                             const SubsampleSpec& spec, Rng& rng);
Atom finite_lmo(const std::vector<double>& gradient,
                const std::vector<Atom>& atoms,
                const std::vector<long>* subset = nullptr);

}  // namespace subfw

#endif
