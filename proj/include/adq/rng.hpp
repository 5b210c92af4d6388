#pragma once

#include <cstdint>
#include <random>

namespace adq {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for an independent stream identified by (seed, stream, substream).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                 std::uint64_t substream = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ (substream * 0xd1b54a32d192ed03ULL));
}

// 64-bit Mersenne twister with portable real/integer draws (the std
// distributions are implementation-defined, which would break byte-level
// reproducibility across standard libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    // Lemire's rejection keeps the draw unbiased.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = engine_();
      const unsigned __int128 m = static_cast<unsigned __int128>(x) * bound;
      if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace adq
