#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace ergo::rng {

// Philox4x32-10 counter-based generator. A block is a pure function of
// (key, counter), so any (seed, path, step, index) tuple maps to the same
// numbers no matter how the work is scheduled across threads.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Sub-stream domains keep draws made for different purposes disjoint even
// when they share (seed, path, step).
enum class Domain : std::uint32_t {
  kPathNoise = 0,
  kSampler = 1,
  kDensitySampling = 2,
  kGeneric = 3,
};

/// One logical random stream, keyed by (seed, substream id, domain).
/// All draws are addressed by (step, index); nothing is cached, so streams
/// are trivially shareable across threads.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t substream,
         Domain domain = Domain::kPathNoise)
      : seed_(seed), substream_(substream), domain_(domain) {}

  /// Uniform draw in (0, 1), 53 usable bits.
  double uniform(std::uint64_t step, std::uint32_t index) const;

  /// Standard normal draw (Box-Muller on a Philox block).
  double gaussian(std::uint64_t step, std::uint32_t index) const;

  /// Fills out with independent standard normals for one step.
  void fill_gaussian(std::uint64_t step, std::span<double> out) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t substream() const { return substream_; }

 private:
  std::array<std::uint32_t, 4> block(std::uint64_t step,
                                     std::uint32_t block_index) const;

  std::uint64_t seed_;
  std::uint64_t substream_;
  Domain domain_;
};

}  // namespace ergo::rng
