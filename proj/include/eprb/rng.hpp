#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace eprb {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seedable random stream. Draws are produced from raw mt19937_64 output so
// that shot files are byte-identical across platforms; std::* distributions
// are implementation-defined and never used here.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // index of the first cumulative bin exceeding the draw; cumulative must be
  // nondecreasing with back() ~ 1
  std::size_t pick_category(std::span<const double> cumulative) {
    if (cumulative.empty()) throw std::invalid_argument("pick_category: empty cumulative");
    const double u = uniform();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - cumulative.begin());
    return std::min(i, cumulative.size() - 1);
  }

 private:
  std::mt19937_64 engine_;
};

// Stream k is seeded with the k-th splitmix64 output derived from the master
// seed, so adding or removing one stream never perturbs another.
inline RngStream derive_stream(std::uint64_t seed, std::uint64_t stream_index) {
  std::uint64_t state = seed;
  std::uint64_t sub = 0;
  for (std::uint64_t i = 0; i <= stream_index; ++i) sub = splitmix64_next(state);
  return RngStream(sub);
}

}  // namespace eprb
