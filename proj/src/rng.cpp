#include "ergo/rng.hpp"

#include <cmath>

namespace ergo::rng {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// (0,1); never returns 0 so it is safe under log().
inline double u01_from(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t v = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(v >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

std::array<std::uint32_t, 4> Stream::block(std::uint64_t step,
                                           std::uint32_t block_index) const {
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(seed_),
      static_cast<std::uint32_t>(seed_ >> 32)};
  // Counter layout: substream (64 bits), step (32 bits), domain|block.
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(substream_),
      static_cast<std::uint32_t>(substream_ >> 32),
      static_cast<std::uint32_t>(step),
      (static_cast<std::uint32_t>(domain_) << 26) ^
          static_cast<std::uint32_t>(step >> 32 << 20) ^ block_index};
  return philox4x32(ctr, key);
}

double Stream::uniform(std::uint64_t step, std::uint32_t index) const {
  const auto b = block(step, index / 2);
  return (index % 2 == 0) ? u01_from(b[0], b[1]) : u01_from(b[2], b[3]);
}

double Stream::gaussian(std::uint64_t step, std::uint32_t index) const {
  const auto b = block(step, index / 2);
  const double u1 = u01_from(b[0], b[1]);
  const double u2 = u01_from(b[2], b[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return (index % 2 == 0) ? r * std::cos(kTwoPi * u2)
                          : r * std::sin(kTwoPi * u2);
}

void Stream::fill_gaussian(std::uint64_t step, std::span<double> out) const {
  std::size_t i = 0;
  for (std::uint32_t blk = 0; i < out.size(); ++blk) {
    const auto b = block(step, blk);
    const double u1 = u01_from(b[0], b[1]);
    const double u2 = u01_from(b[2], b[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    out[i++] = r * std::cos(kTwoPi * u2);
    if (i < out.size()) out[i++] = r * std::sin(kTwoPi * u2);
  }
}

}  // namespace ergo::rng
