#pragma once

#include <cstdint>

#include "flowcert/types.hpp"

namespace flowcert {

/// Deterministic splittable generator. All randomness in the project flows
/// from one 64-bit master seed; independent work items (trials, samples,
/// per-step draws) obtain their own stream via `child`, so results do not
/// depend on thread count or execution order.
///
/// The generator is splitmix64: the state is a counter and each output is a
/// fixed bijective mix of it. Child streams offset the counter by a
/// stream-indexed mix, which keeps streams disjoint for practical purposes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed)) {}

  static Rng child(std::uint64_t master_seed, std::uint64_t stream) {
    Rng r(0);
    r.state_ = mix(mix(master_seed) + (stream + 1) * kGamma);
    return r;
  }

  Rng child(std::uint64_t stream) const {
    Rng r(0);
    r.state_ = mix(state_ + (stream + 1) * kGamma);
    return r;
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (single value per call).
  double normal();

  Vector normal_vector(int n);

  /// Uniform in the closed ball of the given center and radius.
  Vector in_ball(const Vector& center, double radius);

  Vector in_region(const Region& region);

  /// Pure function of (seed, stream, index): one uniform draw in [0,1).
  /// Used for step-size sequences that must be replayable by index.
  static double indexed_uniform(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t index) {
    Rng r = child(seed, stream);
    r.state_ = mix(r.state_ + (index + 1) * kGamma);
    return r.uniform();
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t mix(std::uint64_t z) {
    z += kGamma;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace flowcert
