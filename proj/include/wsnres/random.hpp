#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace wsnres {

using Rng = std::mt19937_64;

// Tiny generator for per-node streams, where a full Mersenne Twister state
// per node would dominate memory.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Folds a list of tags into a seed. Distinct tag lists give unrelated seeds,
// so each concern (topology, traffic, ...) draws from its own stream.
constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t t : tags) h = mix64(h ^ mix64(t));
  return h;
}

enum class Stream : std::uint64_t {
  Topology = 0x746f706f,
  Placement = 0x706c6163,
  Traffic = 0x74726166,
  Phase = 0x70686173,
  Protocol = 0x70726f74,
  Adversary = 0x61647672,
  Identity = 0x69647479,
};

constexpr std::uint64_t tag(Stream s) { return static_cast<std::uint64_t>(s); }

// The helpers below avoid std:: distributions, whose output is
// implementation-defined; results stay identical across standard libraries.

// Uniform on [0, 1).
template <class G>
double uniform01(G& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform on the open interval (0, 1).
template <class G>
double uniform_open01(G& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

template <class G>
double uniform_real(G& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// Uniform on {0, ..., n-1}; n must be positive.
template <class G>
std::size_t uniform_index(G& rng, std::size_t n) {
  const std::uint64_t bound = n;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return static_cast<std::size_t>(v % bound);
}

template <class G>
bool bernoulli(G& rng, double p) { return uniform01(rng) < p; }

}  // namespace wsnres
