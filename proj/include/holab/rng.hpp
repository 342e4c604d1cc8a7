#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace holab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Output is a pure function of (key, counter), so every random number used
/// by a trajectory can be addressed by (seed, trajectory, step, stream) and
/// reproduced independently of thread scheduling.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// Independent random streams used within one trajectory.
enum class Stream : std::uint32_t {
  kDiffusion = 1,
  kJumpMarks = 2,
  kSkewMarks = 3,
};

/// Random numbers keyed by (seed, trajectory, segment); the caller supplies
/// (stream, step, slot) for each draw.
class KeyedRng {
 public:
  KeyedRng(std::uint64_t seed, std::uint64_t trajectory, std::uint32_t segment = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        trajectory_(trajectory),
        segment_(segment) {}

  KeyedRng with_segment(std::uint32_t segment) const {
    KeyedRng copy = *this;
    copy.segment_ = segment;
    return copy;
  }

  /// Four raw words for counter (stream, step, slot).
  Philox4x32::Block raw(Stream stream, std::uint64_t step, std::uint32_t slot) const {
    // c0: low step bits; c1: stream | slot | high step bits; c2: trajectory; c3: segment.
    const std::uint32_t c1 = (static_cast<std::uint32_t>(stream) << 28) ^ (slot << 12) ^
                             static_cast<std::uint32_t>((step >> 32) & 0xFFFu);
    const std::uint32_t c2 = static_cast<std::uint32_t>(trajectory_) ^
                             static_cast<std::uint32_t>(trajectory_ >> 32) * 0x9E3779B9u;
    return Philox4x32::generate({static_cast<std::uint32_t>(step), c1, c2, segment_}, key_);
  }

  /// Two uniforms in the open interval (0, 1).
  std::array<double, 2> uniforms(Stream stream, std::uint64_t step, std::uint32_t slot) const {
    const auto b = raw(stream, step, slot);
    return {to_open_unit(b[0], b[1]), to_open_unit(b[2], b[3])};
  }

  /// Two independent standard normals (Box-Muller).
  std::array<double, 2> normals(Stream stream, std::uint64_t step, std::uint32_t slot) const {
    const auto u = uniforms(stream, step, slot);
    const double r = std::sqrt(-2.0 * std::log(u[0]));
    const double theta = 2.0 * std::numbers::pi * u[1];
    return {r * std::cos(theta), r * std::sin(theta)};
  }

  /// Exp(rate) variate.
  double exponential(Stream stream, std::uint64_t step, std::uint32_t slot, double rate) const {
    return -std::log(uniforms(stream, step, slot)[0]) / rate;
  }

 private:
  static double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint64_t trajectory_;
  std::uint32_t segment_;
};

}  // namespace holab
