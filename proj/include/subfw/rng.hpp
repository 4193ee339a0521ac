#ifndef SUBFW_RNG_HPP
#define SUBFW_RNG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <unordered_set>
#include <vector>

namespace subfw {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic generator with an explicit 64-bit seed. All sampling and
// data generation in the library flows through this class; none of the
// distribution adapters from <random> are used since their output is
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Unbiased uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = eng_();
    while (v >= limit) v = eng_();
    return v % n;
  }

  // Standard normal via Box-Muller; two uniforms per draw, no cached spare.
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // m distinct values from [0, n), returned sorted ascending.
  std::vector<int> sample_without_replacement(int n, int m) {
    std::vector<int> out;
    if (m >= n) {
      out.resize(n);
      for (int i = 0; i < n; ++i) out[i] = i;
      return out;
    }
    std::unordered_set<int> seen;
    out.reserve(m);
    while (static_cast<int>(out.size()) < m) {
      const int v = static_cast<int>(below(static_cast<std::uint64_t>(n)));
      if (seen.insert(v).second) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace subfw

#endif
