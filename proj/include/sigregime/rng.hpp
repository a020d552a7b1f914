#pragma once

#include <cstdint>
#include <limits>

namespace sigregime {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Mix a seed with a stream index (path, draw, segment ...).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(seed ^ splitmix64(a + 0x632BE59BD9B4E019ULL)) ^ (b * 0xD1B54A32D192ED03ULL));
}

// Counter-based generator: output n depends only on (key, n). Satisfies
// UniformRandomBitGenerator so it plugs into <random> distributions.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(splitmix64(key)) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub = 0)
      : key_(derive_seed(seed, stream, sub)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return splitmix64(key_ ^ (counter_++ * 0x9E3779B97F4A7C15ULL)); }

  // uniform in (0, 1)
  double uniform() { return ((*this)() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

  void seek(std::uint64_t counter) { counter_ = counter; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Standard normal by Box-Muller, one draw per pair of uniforms (no caching so
// the stream position stays a pure function of the number of draws).
double normal(CounterRng& rng);

}  // namespace sigregime

#include <vector>

namespace sigregime {

// k distinct indices from [0, n), in draw order.
std::vector<std::size_t> draw_without_replacement(CounterRng& rng, std::size_t n, std::size_t k);

}  // namespace sigregime
