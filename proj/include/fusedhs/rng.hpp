#pragma once

#include <cstdint>
#include <random>

namespace fusedhs {

/// Seeded pseudo-random stream owned by exactly one chain.
///
/// Built on std::mt19937_64, whose output sequence is fixed by the C++
/// standard, with uniform and normal variates generated here rather than by
/// the implementation-defined std:: distributions. A given seed therefore
/// yields a bit-identical sequence on every conforming toolchain.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  /// Independent stream keyed by (this stream's seed, key). Does not touch
  /// this stream's state, so derivation order is irrelevant.
  RngStream derive(std::uint64_t key) const;
  RngStream derive(std::uint64_t key1, std::uint64_t key2) const;

  /// Raw 64-bit output.
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform();

  /// Standard normal (Marsaglia polar method).
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// SplitMix64 finalizer; used to decorrelate derived seeds.
std::uint64_t mix_seed(std::uint64_t x);

}  // namespace fusedhs
