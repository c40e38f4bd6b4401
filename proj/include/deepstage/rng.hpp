#ifndef DEEPSTAGE_RNG_HPP_
#define DEEPSTAGE_RNG_HPP_

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "deepstage/util.hpp"

namespace deepstage {

// All randomness in the project flows through this generator (xoshiro256**
// seeded via splitmix64). The standard-library engines are avoided so that
// every draw is bit-reproducible regardless of the standard library in use.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();
  // Uniform in [a, b).
  double uniform(double a, double b);
  // Uniform integer in [0, n); n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n);
  // Knuth-style Poisson sampler; mean split into chunks to avoid underflow.
  int poisson(double mean);
  // Samples an index proportional to the (non-negative) weights.
  std::size_t categorical(const std::vector<double>& weights);

 private:
  std::array<std::uint64_t, 4> s_{};
};

// Stream derivation: every component draws from an independent stream keyed
// by name (and optional index), so adding a consumer never perturbs others.
std::uint64_t derive_seed(std::uint64_t master, std::string_view component);
std::uint64_t derive_seed(std::uint64_t master, std::string_view component,
                          std::uint64_t index);
Rng derive_rng(std::uint64_t master, std::string_view component);
Rng derive_rng(std::uint64_t master, std::string_view component,
               std::uint64_t index);

}  // namespace deepstage

#endif  // DEEPSTAGE_RNG_HPP_
