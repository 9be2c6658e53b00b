#pragma once

#include <cstdint>
#include <random>

namespace relqi {

/// Seeded pseudo-random source. Streams are derived from (seed, stream) with
/// SplitMix64 so Monte Carlo chunks can each own an independent generator and
/// results depend only on the seed and the chunk layout.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  Rng substream(std::uint64_t k) const;

  double normal();
  double uniform();  // [0, 1)
  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

/// Samples per Monte Carlo chunk; each chunk draws from its own substream.
inline constexpr std::size_t kMonteCarloChunk = 4096;

}  // namespace relqi
