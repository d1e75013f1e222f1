#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace onebit {

// Philox4x64-10 counter-based generator.
//
// The raw 64-bit word stream reproduces numpy.random.Philox(key=(seed,
// stream)).random_raw(): the 256-bit counter starts at zero and is
// incremented before each block is produced, so word w belongs to the block
// evaluated at counter value w/4 + 1.  Because every word is addressable by
// index, matrix entries, sign flips and dither draws are pure functions of
// (seed, stream, index) and independent of traversal order or thread count.
class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream);

  // Random access into the word stream.
  std::uint64_t raw_at(std::uint64_t word) const;
  double uniform_at(std::uint64_t word) const;
  double normal_at(std::uint64_t word) const;

  // Sequential draws; next_u64() equals raw_at(0), raw_at(1), ... in order.
  std::uint64_t next_u64();
  double next_uniform();
  double next_normal();

  // Uniform integer on [0, bound) by rejection; consumes a variable number
  // of words from the sequential position.
  std::uint64_t next_below(std::uint64_t bound);

  std::uint64_t position() const { return pos_; }

 private:
  std::array<std::uint64_t, 4> block_at(std::uint64_t block_index) const;

  std::uint64_t key0_, key1_;
  std::uint64_t pos_ = 0;
  mutable std::uint64_t cached_block_ = ~std::uint64_t{0};
  mutable std::array<std::uint64_t, 4> buf_{};
};

// Map a raw word to the open interval (0,1) on the 2^-52 grid.  Both
// endpoints of (0,1) are unreachable: the result lies in [2^-53, 1 - 2^-53],
// which keeps the inverse normal CDF finite.
double to_open_unit(std::uint64_t raw);

// Inverse standard normal CDF, Wichura's PPND16 rational approximations;
// relative error below 2e-15 over (0,1).
double inverse_normal_cdf(double p);

// splitmix64 finalizer (bijective 64-bit mix).
std::uint64_t mix64(std::uint64_t z);

// Order-sensitive hash of a tuple of 64-bit values into one seed; used to
// derive per-trial and per-instance seeds from a master seed.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts);

// Stream ids keeping the substreams of one seed independent.
namespace stream {
inline constexpr std::uint64_t kMatrix = 1;
inline constexpr std::uint64_t kFlip = 2;
inline constexpr std::uint64_t kDither = 3;
inline constexpr std::uint64_t kSupport = 4;
inline constexpr std::uint64_t kAmplitude = 5;
inline constexpr std::uint64_t kMonteCarloG = 6;
inline constexpr std::uint64_t kMonteCarloU = 7;
}  // namespace stream

}  // namespace onebit
