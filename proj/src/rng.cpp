#include "onebit/rng.hpp"

#include <cmath>

namespace onebit {

namespace {

constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kM1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73Bull;

inline std::uint64_t mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t* lo) {
  unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  *lo = static_cast<std::uint64_t>(p);
  return static_cast<std::uint64_t>(p >> 64);
}

}  // namespace

Philox::Philox(std::uint64_t seed, std::uint64_t stream) : key0_(seed), key1_(stream) {}

std::array<std::uint64_t, 4> Philox::block_at(std::uint64_t block_index) const {
  // Counter is pre-incremented before each block, so block b sits at counter
  // value b + 1 (with carry into the second word on wraparound).
  std::uint64_t x0 = block_index + 1;
  std::uint64_t x1 = (x0 == 0) ? 1 : 0;
  std::uint64_t x2 = 0, x3 = 0;
  std::uint64_t k0 = key0_, k1 = key1_;
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k0 += kW0;
      k1 += kW1;
    }
    std::uint64_t lo0, lo1;
    const std::uint64_t hi0 = mulhilo(kM0, x0, &lo0);
    const std::uint64_t hi1 = mulhilo(kM1, x2, &lo1);
    const std::uint64_t n0 = hi1 ^ x1 ^ k0;
    const std::uint64_t n2 = hi0 ^ x3 ^ k1;
    x0 = n0;
    x1 = lo1;
    x2 = n2;
    x3 = lo0;
  }
  return {x0, x1, x2, x3};
}

std::uint64_t Philox::raw_at(std::uint64_t word) const {
  const std::uint64_t b = word >> 2;
  if (b != cached_block_) {
    buf_ = block_at(b);
    cached_block_ = b;
  }
  return buf_[word & 3];
}

double Philox::uniform_at(std::uint64_t word) const { return to_open_unit(raw_at(word)); }

double Philox::normal_at(std::uint64_t word) const {
  return inverse_normal_cdf(to_open_unit(raw_at(word)));
}

std::uint64_t Philox::next_u64() { return raw_at(pos_++); }

double Philox::next_uniform() { return to_open_unit(next_u64()); }

double Philox::next_normal() { return inverse_normal_cdf(next_uniform()); }

std::uint64_t Philox::next_below(std::uint64_t bound) {
  // Classic rejection: discard raws below 2^64 mod bound, then reduce.
  const std::uint64_t min = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= min) return r % bound;
  }
}

double to_open_unit(std::uint64_t raw) {
  // 52-bit grid shifted by half a step; (2^52 - 1) + 0.5 is exactly
  // representable, so the product never rounds up to 1.0.
  return (static_cast<double>(raw >> 12) + 0.5) * 0x1.0p-52;
}

double inverse_normal_cdf(double p) {
  // Wichura (1988), algorithm AS 241, PPND16.
  static constexpr double A[8] = {
      3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3};
  static constexpr double B[8] = {
      1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
      2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
      5.2264952788528545610e3};
  static constexpr double C[8] = {
      1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double D[8] = {
      1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9};
  static constexpr double E[8] = {
      6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double F[8] = {
      1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15};
  auto horner = [](const double (&c)[8], double x) {
    double s = 0.0;
    for (int i = 7; i >= 0; --i) s = s * x + c[i];
    return s;
  };

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(A, r) / horner(B, r);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = horner(C, r) / horner(D, r);
  } else {
    r -= 5.0;
    x = horner(E, r) / horner(F, r);
  }
  return (q < 0.0) ? -x : x;
}

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x1BED0A1C0FFEE123ull;
  for (std::uint64_t p : parts) {
    h = mix64(h ^ mix64(p));
  }
  return h;
}

}  // namespace onebit
