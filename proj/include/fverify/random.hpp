#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fverify::random {

// Philox4x32-10 block function: maps a 128-bit counter and 64-bit key to 128
// random bits. Stateless, so any block of any stream can be computed directly.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Sequential view over the counter space of one (seed, stream) pair. Distinct
// stream ids never share a counter, so replicate r can use Stream(seed, r)
// regardless of which thread runs it.
class Stream {
 public:
  using result_type = std::uint32_t;

  Stream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double normal();
  // Marsaglia-Tsang; shape > 0, unit scale.
  double gamma(double shape);
  double beta(double a, double b);
  bool bernoulli(double p);

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned used_ = 4;
};

}  // namespace fverify::random
