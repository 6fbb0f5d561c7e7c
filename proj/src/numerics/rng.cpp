#include "hsrnet/numerics/rng.hpp"

#include <cmath>

namespace hsrnet::numerics {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  // Mix the stream id through its own SplitMix pass before combining so that
  // neighbouring (seed, stream) pairs land far apart.
  std::uint64_t s = stream ^ 0x6A09E667F3BCC909ULL;
  std::uint64_t key = seed ^ splitmix64(s);
  for (auto& word : state_) word = splitmix64(key);
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform_symmetric() {
  // 2u - 1 with u on [0,1) lies in [-1, 1); reject the single -1 value.
  for (;;) {
    const double v = 2.0 * uniform() - 1.0;
    if (v > -1.0) return v;
  }
}

double Rng::gaussian() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  for (;;) {
    const double u = uniform_symmetric();
    const double v = uniform_symmetric();
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      const double scale = std::sqrt(-2.0 * std::log(s) / s);
      spare_ = v * scale;
      return u * scale;
    }
  }
}

int Rng::rademacher() { return (next_u64() >> 63) ? 1 : -1; }

Rng Rng::split(std::uint64_t chunk) const {
  if (chunk == 0) return Rng(seed_, stream_);
  std::uint64_t s = stream_ + 0xD1B54A32D192ED03ULL * chunk;
  return Rng(seed_, splitmix64(s));
}

}  // namespace hsrnet::numerics
