#pragma once

#include <cstdint>
#include <random>

namespace cylint {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic child seed for (parent, index). Distinct indices give
/// statistically independent mt19937_64 streams.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index);

/// Stream purposes keep the draws of different generators apart even when
/// they share a scenario and coordinate.
enum class StreamPurpose : std::uint64_t {
  Brownian = 1,
  JumpTimes = 2,
  JumpSizes = 3,
  Partition = 4,
  EmeryTrial = 5,
  Auxiliary = 6,
};

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t scenario,
                          std::uint64_t coordinate, StreamPurpose purpose);

/// Portable sampler on top of mt19937_64. The standard distributions are
/// implementation-defined, so the transforms are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double exponential(double rate);
  /// Fair ±1.
  int sign();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cylint
