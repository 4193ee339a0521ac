#ifndef SUBFW_ATOM_HPP
#define SUBFW_ATOM_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace subfw {

// Precondition or invariant breach inside the library.
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what)
      : std::logic_error(what) {}
};

// Sparse extreme point of an atomic domain. Entries are (coordinate, value)
// pairs sorted strictly ascending by coordinate with no stored zeros. The
// key is a canonical identity string: atoms with equal keys compare equal.
class Atom {
 public:
  using Entry = std::pair<int, double>;

  Atom() = default;
  Atom(std::vector<Entry> entries, std::string key);

  static Atom unit(int coord, double value, std::string key);

  const std::vector<Entry>& entries() const { return entries_; }
  const std::string& key() const { return key_; }

  double dot(const std::vector<double>& dense) const;
  // dense += coef * atom
  void axpy(double coef, std::vector<double>& dense) const;
  int max_coord() const;

  bool operator==(const Atom& other) const { return key_ == other.key_; }
  bool operator!=(const Atom& other) const { return key_ != other.key_; }

 private:
  std::vector<Entry> entries_;
  std::string key_;
};

}  // namespace subfw

#endif
