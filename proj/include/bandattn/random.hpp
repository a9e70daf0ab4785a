#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace bandattn {

// Seeded generator with platform-independent draws. std::mt19937_64 output is
// fully specified by the standard; the std distributions are not, so the
// conversions to doubles and bounded integers live here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);
  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);
  bool bernoulli(double p) { return uniform01() < p; }
  // Standard normal via Box-Muller.
  double normal();

  // `k` distinct values from [0, range), in ascending order.
  std::vector<std::size_t> sample_sorted(std::size_t range, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

}  // namespace bandattn
