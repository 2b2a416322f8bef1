#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace tof {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11), usable as a
/// UniformRandomBitGenerator.
///
/// The 64-bit seed is the key; the 64-bit stream id occupies the upper half of
/// the counter. Draws for (seed, stream) never depend on any other stream, so
/// work keyed by stream can run in any order or in parallel.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// The raw ten-round bijection.
  static Counter block(Counter counter, Key key) noexcept;

 private:
  Key key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  Counter buffer_{};
  int position_ = 4;
};

}  // namespace tof
