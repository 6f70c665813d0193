#pragma once

#include <cmath>
#include <cstdint>

namespace gcnet {

// splitmix64 finalizer; full-period bijection on uint64.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-keyed pseudo-random stream (splitmix64). Child streams are derived
// from the parent's key and a child index, never from generator state, so a
// stream tree is fully determined by the root seed regardless of how many
// draws each node has consumed or on which thread it runs.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key), counter_(0) {}

  // Deterministic child derivation: child(i) depends on (key, i) only.
  [[nodiscard]] RngStream child(std::uint64_t index) const {
    return RngStream(mix64(key_ ^ mix64(index ^ 0xd1b54a32d192ed03ULL)));
  }

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller, no cached second value: every call
  // consumes exactly two uniforms, keeping stream offsets predictable.
  double normal() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace gcnet
