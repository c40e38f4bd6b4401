#include "deepstage/rng.hpp"

#include <cmath>

namespace deepstage {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

std::uint64_t Rng::uniform_int(std::uint64_t n) {
  if (n == 0) fail("uniform_int: n must be > 0");
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

int Rng::poisson(double mean) {
  if (mean < 0) fail("poisson: mean must be >= 0, got ", mean);
  int total = 0;
  // exp(-mean) underflows for large means; sample in chunks of <= 32.
  while (mean > 0) {
    const double chunk = mean > 32.0 ? 32.0 : mean;
    mean -= chunk;
    const double limit = std::exp(-chunk);
    double p = 1.0;
    int k = 0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    total += k - 1;
  }
  return total;
}

std::size_t Rng::categorical(const std::vector<double>& weights) {
  if (weights.empty()) fail("categorical: empty weight vector");
  double total = 0;
  for (double w : weights) {
    if (w < 0) fail("categorical: negative weight");
    total += w;
  }
  if (total <= 0) fail("categorical: all weights zero");
  double u = uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    u -= weights[i];
    if (u < 0) return i;
  }
  return weights.size() - 1;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view component) {
  std::uint64_t x = master ^ fnv1a64(component);
  return splitmix64(x);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view component,
                          std::uint64_t index) {
  std::uint64_t x = derive_seed(master, component) ^ (index * 0x9E3779B97F4A7C15ull);
  return splitmix64(x);
}

Rng derive_rng(std::uint64_t master, std::string_view component) {
  return Rng(derive_seed(master, component));
}

Rng derive_rng(std::uint64_t master, std::string_view component,
               std::uint64_t index) {
  return Rng(derive_seed(master, component, index));
}

}  // namespace deepstage
