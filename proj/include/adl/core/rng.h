#ifndef ADL_CORE_RNG_H_
#define ADL_CORE_RNG_H_

#include <cstdint>

namespace adl {

// SplitMix64 stream. Each draw advances a Weyl counter and hashes it, so the
// sequence is fully defined by the 64-bit seed on every platform. Uniform
// doubles use the top 53 bits; normals use Box-Muller without caching, so one
// normal draw consumes exactly two raw draws.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const;

  std::uint64_t next_u64();
  // Uniform in [0, 1).
  double next_unit();
  // Uniform in [lo, hi). Throws std::invalid_argument when lo > hi.
  double uniform(double lo, double hi);
  double normal(double mean = 0.0, double stddev = 1.0);
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return next_unit() < p; }

  // Independent stream derived from this seed and a stream index.
  SeededRng fork(std::uint64_t stream) const;

  bool operator==(const SeededRng&) const = default;

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
};

inline double sample_uniform(SeededRng& rng, double lo, double hi) { return rng.uniform(lo, hi); }

// Stateless SplitMix64 finalizer; used for deriving seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace adl

#endif  // ADL_CORE_RNG_H_
