#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace hitlab {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Maps a 128-bit counter and a 64-bit key to 128 bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Identifies one reproducible random sequence.
///
/// The sequence is a pure function of (seed, stream_id, lane) and the draw
/// index, so replicates keyed by stream_id give the same numbers no matter
/// which worker runs them or in which order. `lane` separates independent
/// sub-sequences inside one replicate (e.g. the B and W paths of a pair).
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::uint32_t lane = 0;

  /// Independent sub-sequence of this stream.
  [[nodiscard]] RngStream fork(std::uint32_t k) const;

  /// Stream for replicate `i` of an experiment rooted at this stream.
  [[nodiscard]] RngStream replicate(std::uint64_t i) const;

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// Sequential reader over an RngStream.
class RandomSource {
 public:
  explicit RandomSource(const RngStream& stream);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on (0, 1]; never returns 0.
  double uniform();

  /// Uniform integer in [0, n).
  std::uint32_t below(std::uint32_t n);

  /// Standard normal draw (Box-Muller on consecutive uniforms).
  double normal();

  void fill_normal(std::span<double> out);

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  unsigned pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hitlab
