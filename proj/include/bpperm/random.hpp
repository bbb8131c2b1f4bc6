#pragma once

#include <array>
#include <cstdint>

namespace bpperm {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Stateless: the output depends only on (counter, key).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

// Counter-based generator keyed by a 64-bit seed. Draw (a, b) is a pure
// function of (seed, stream, a, b), so samples can be produced in any order
// or on any number of threads with identical results.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint32_t stream = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  std::array<std::uint32_t, 4> block(std::uint64_t a, std::uint32_t b) const {
    return philox4x32({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), b, stream_},
                      key_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t a, std::uint32_t b) const {
    const auto r = block(a, b);
    const std::uint64_t bits = (std::uint64_t{r[0]} << 21) ^ (r[1] >> 11);
    return static_cast<double>(bits & ((std::uint64_t{1} << 53) - 1)) * 0x1.0p-53;
  }

  double uniform(std::uint64_t a, std::uint32_t b, double lo, double hi) const {
    return lo + (hi - lo) * uniform(a, b);
  }

  // Fair +1 / -1.
  int sign(std::uint64_t a, std::uint32_t b) const { return (block(a, b)[0] & 1u) ? 1 : -1; }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_;
};

}  // namespace bpperm
