#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace rbmlab {

/// One splitmix64 step. Used only to spread seeds, not as the main generator.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Seed for sub-stream `index` of a master seed. Tasks that may run in
/// parallel (training restarts, construction trials) each derive their own
/// stream from (master, index), so results do not depend on scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master + 0x9e3779b97f4a7c15ull * (index + 1);
  std::uint64_t z = splitmix64(s);
  return z ^ splitmix64(s);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b) {
  return derive_seed(derive_seed(master, a), b);
}

/// mt19937_64 wrapper that maps engine output to doubles by explicit bit
/// manipulation. The standard pins down the engine but not the library
/// distributions, so this keeps value streams reproducible per seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t bits() { return engine_(); }

  /// Unbiased integer in [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t cut = max - max % bound;  // multiple of bound
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= cut);
    return x % bound;
  }

  /// Sample from the flat Dirichlet on the k-simplex (normalized Exp(1) draws).
  std::vector<double> dirichlet_flat(std::size_t k) {
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& wi : w) {
      wi = -std::log1p(-uniform());
      total += wi;
    }
    for (auto& wi : w) wi /= total;
    return w;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rbmlab
