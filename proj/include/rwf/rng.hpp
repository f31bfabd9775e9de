#pragma once

// Counter-based random numbers (Philox4x32-10, Salmon et al. SC'11).
//
// Every draw is a pure function of (seed, stream, index, block), so
// samples can be regenerated in any order and on any thread.

#include <array>
#include <cstdint>

namespace rwf {

namespace stream {
// Stream identifiers partition the counter space between consumers.
inline constexpr std::uint32_t kRwfFeatures = 1;
inline constexpr std::uint32_t kRffFeatures = 2;
inline constexpr std::uint32_t kDataInputs = 3;
inline constexpr std::uint32_t kDataNoise = 4;
inline constexpr std::uint32_t kSplit = 5;
inline constexpr std::uint32_t kOptimizer = 6;
inline constexpr std::uint32_t kProbe = 7;
}  // namespace stream

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

// splitmix64 finalizer; used to derive independent seeds for repeats.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// Sequential view over the counter space of one (seed, stream, index).
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint32_t stream, std::uint64_t index);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  // Uniform on (0, 1].
  double uniform_open_low() { return 1.0 - uniform(); }
  // Standard normal via Box-Muller; the cosine branch only.
  double normal();

 private:
  PhiloxKey key_;
  PhiloxCounter counter_;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

}  // namespace rwf
