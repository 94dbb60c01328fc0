#ifndef MNPCA_RNG_HPP
#define MNPCA_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace mnpca {

// Deterministic counter-based RNG (splitmix64). All randomness in the
// library flows through this class so that a given seed reproduces the
// same output everywhere; std:: distributions are avoided on purpose
// because their output is implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

// Hash-combines seed components into the seed of an independent sub-stream
// (per replicate, per observation slot, ...).
std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts);

// First k entries of a Fisher-Yates shuffle of {0, ..., n-1}.
std::vector<int> sample_indices(int n, int k, RngStream& rng);

}  // namespace mnpca

#endif  // MNPCA_RNG_HPP
