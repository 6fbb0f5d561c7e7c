#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace hsrnet::numerics {

// xoshiro256** with one independent stream per (seed, stream-id) pair.
//
// The 256-bit state is filled by running SplitMix64 over a key derived from
// both the seed and the stream id, so streams never share a starting point
// and sequences are identical on every platform. Gaussians use the Marsaglia
// polar method on 53-bit uniforms; the second variate of each accepted pair
// is cached and returned by the next call.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (-1, 1).
  double uniform_symmetric();
  double gaussian();
  int rademacher();

  // Child stream for parallel work; split(0) is a fresh copy of this stream's
  // starting state, so sequential and chunk-0 sampling coincide.
  Rng split(std::uint64_t chunk) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint64_t, 4> state_{};
  std::optional<double> spare_;
};

}  // namespace hsrnet::numerics
