#pragma once

#include <array>
#include <cstdint>

namespace cqcd {

/// Philox4x32-10 block function (Salmon et al., Random123).
/// Pure function of (counter, key); the basis of every random stream here.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// A counter-based random stream addressed by (seed, stream id, substream).
///
/// Two streams with the same address produce identical sequences no matter
/// which thread draws from them or in which order streams are created. Monte
/// Carlo drivers use the replication index as the stream id, which makes
/// results independent of the worker count.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id, std::uint32_t substream = 0);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal variate (Marsaglia polar transform of uniforms).
  double normal();

  /// Exponential variate with the given rate, by inversion.
  double exponential(double rate);

 private:
  std::uint32_t next_u32();
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  unsigned used_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cqcd
