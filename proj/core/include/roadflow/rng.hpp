#pragma once

#include <cstdint>
#include <string_view>

namespace roadflow {

/// Deterministic random source built on splitmix64. Every stage of the
/// pipeline derives its own stream from one root seed with
/// Rng::for_stream(root, name, index), so adding or reordering stages never
/// perturbs another stage's draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Derives an independent stream from a root seed, a stream label and a
  /// counter (e.g. per observation point or per vehicle).
  static Rng for_stream(std::uint64_t root_seed, std::string_view label,
                        std::uint64_t index = 0);

  std::uint64_t next_u64();

  /// Uniform in [0, 1).
  double uniform();

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);

  /// Inclusive integer range.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Standard normal via Box-Muller (implementation-defined std distributions
  /// would break cross-build determinism).
  double normal();
  double normal(double mean, double stddev);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace roadflow
