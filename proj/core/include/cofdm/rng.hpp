#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cofdm {

// Deterministic random stream. The mt19937_64 sequence is pinned by the
// standard, and the uniform/normal transforms below are written out explicitly
// so results are identical across platforms and standard libraries
// (std::uniform_real_distribution / std::normal_distribution are not).
//
// Independent streams are derived from (seed, stream_id) so that, e.g., the
// data bits and the per-span ASE noise never share state regardless of the
// order in which stages consume randomness.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view stream_id);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();

  // Standard normal via Box-Muller; second value of each pair is cached.
  double normal();

  // One fair bit (from a buffered 64-bit word, LSB first).
  int bit();

  // The derived engine seed, exposed for tests.
  static std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream_id);

 private:
  std::mt19937_64 engine_;
  std::uint64_t bit_buffer_ = 0;
  int bits_left_ = 0;
  double normal_spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cofdm
