#include "hitlab/rng.hpp"

#include <cmath>
#include <numbers>

namespace hitlab {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

RngStream RngStream::fork(std::uint32_t k) const {
  const std::uint64_t mixed =
      splitmix64((static_cast<std::uint64_t>(lane) << 32) | k);
  return {seed, stream_id, static_cast<std::uint32_t>(mixed ^ (mixed >> 32))};
}

RngStream RngStream::replicate(std::uint64_t i) const {
  // The parent's own stream id folds into the lane so that nested
  // experiments rooted at different streams stay disjoint.
  RngStream r{seed, i, lane};
  if (stream_id != 0) {
    const std::uint64_t mixed = splitmix64(stream_id ^ (std::uint64_t{lane} << 40));
    r.lane = static_cast<std::uint32_t>(mixed ^ (mixed >> 32));
  }
  return r;
}

RandomSource::RandomSource(const RngStream& s)
    : key_{static_cast<std::uint32_t>(s.seed),
           static_cast<std::uint32_t>(s.seed >> 32)},
      counter_{0, s.lane, static_cast<std::uint32_t>(s.stream_id),
               static_cast<std::uint32_t>(s.stream_id >> 32)} {}

void RandomSource::refill() {
  block_ = philox4x32(counter_, key_);
  ++counter_[0];
  pos_ = 0;
}

std::uint32_t RandomSource::next_u32() {
  if (pos_ == 4) refill();
  return block_[pos_++];
}

std::uint64_t RandomSource::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double RandomSource::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
}

std::uint32_t RandomSource::below(std::uint32_t n) {
  // Lemire's multiply-shift with rejection.
  std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * n;
  auto low = static_cast<std::uint32_t>(m);
  if (low < n) {
    const std::uint32_t threshold = (0u - n) % n;
    while (low < threshold) {
      m = static_cast<std::uint64_t>(next_u32()) * n;
      low = static_cast<std::uint32_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 32);
}

double RandomSource::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

void RandomSource::fill_normal(std::span<double> out) {
  for (double& v : out) v = normal();
}

}  // namespace hitlab
