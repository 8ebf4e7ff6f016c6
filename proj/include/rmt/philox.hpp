#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A block of
// four 32-bit words is a pure function of (counter, key), so any entry of any
// replicate can be regenerated independently of worker scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace rmt {

struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

/// Stream tags occupy counter word 1 so different uses of one replicate never overlap.
enum class StreamTag : std::uint32_t {
  noise = 0,
  start_vector = 1,
  sampling = 2,
  /// Extra uniforms for rejection steps, addressed per noise entry.
  noise_retry = 3,
};

/// Random blocks addressed by (seed, stream, tag, attempt, block index).
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream, StreamTag tag, std::uint32_t attempt = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_lo_(static_cast<std::uint32_t>(stream)),
        stream_hi_(static_cast<std::uint32_t>(stream >> 32)),
        tag_((static_cast<std::uint32_t>(tag) & 0xFFFFu) | (attempt << 16)) {}

  Philox4x32::Counter block(std::uint32_t index) const noexcept {
    return Philox4x32::apply({index, tag_, stream_lo_, stream_hi_}, key_);
  }

  /// Two 64-bit words from block `index`.
  std::array<std::uint64_t, 2> words64(std::uint32_t index) const noexcept {
    const auto b = block(index);
    return {(std::uint64_t{b[0]} << 32) | b[1], (std::uint64_t{b[2]} << 32) | b[3]};
  }

  /// Same seed and stream under another tag/attempt.
  CounterStream retagged(StreamTag tag, std::uint32_t attempt = 0) const noexcept {
    CounterStream out = *this;
    out.tag_ = (static_cast<std::uint32_t>(tag) & 0xFFFFu) | (attempt << 16);
    return out;
  }

  static constexpr std::uint32_t kBatch = 16;

  /// words64(first + l) for l < kBatch, written as out[2l], out[2l+1].
  /// Same values as the scalar path; the lanes are laid out so the rounds vectorize.
  /// Kept out of line: once inlined, GCC unrolls the lanes instead of vectorizing them.
  [[gnu::noinline]] void batch64(std::uint32_t first, std::uint64_t* out) const noexcept {
    std::uint32_t c0[kBatch], c1[kBatch], c2[kBatch], c3[kBatch];
    for (std::uint32_t l = 0; l < kBatch; ++l) {
      c0[l] = first + l;
      c1[l] = tag_;
      c2[l] = stream_lo_;
      c3[l] = stream_hi_;
    }
    std::uint32_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      for (std::uint32_t l = 0; l < kBatch; ++l) {
        const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * c0[l];
        const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * c2[l];
        const auto n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1[l] ^ k0;
        const auto n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3[l] ^ k1;
        c1[l] = static_cast<std::uint32_t>(p1);
        c3[l] = static_cast<std::uint32_t>(p0);
        c0[l] = n0;
        c2[l] = n2;
      }
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    for (std::uint32_t l = 0; l < kBatch; ++l) {
      out[2 * l] = (std::uint64_t{c0[l]} << 32) | c1[l];
      out[2 * l + 1] = (std::uint64_t{c2[l]} << 32) | c3[l];
    }
  }

 private:
  Philox4x32::Key key_;
  std::uint32_t stream_lo_;
  std::uint32_t stream_hi_;
  std::uint32_t tag_;
};

/// Uniform in (0, 1): 52 random bits, centred in their cell so neither end
/// occurs (with 53 bits the top cell's midpoint would round up to 1).
inline double open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Box-Muller pair from two 64-bit words.
inline std::array<double, 2> box_muller(std::uint64_t w0, std::uint64_t w1) noexcept {
  const double radius = std::sqrt(-2.0 * std::log(open_unit(w0)));
  const double angle = 2.0 * std::numbers::pi * open_unit(w1);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

/// Sequential adapter satisfying UniformRandomBitGenerator, for callers that
/// want a conventional engine (shuffles, small samples in tests).
class PhiloxEngine {
 public:
  using result_type = std::uint32_t;

  PhiloxEngine(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : stream_(seed, stream, StreamTag::sampling) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (used_ == 4) {
      buffer_ = stream_.block(next_block_++);
      used_ = 0;
    }
    return buffer_[used_++];
  }

  std::uint64_t next64() noexcept {
    const std::uint64_t hi = (*this)();
    return (hi << 32) | (*this)();
  }

  double uniform() noexcept { return open_unit(next64()); }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const std::uint64_t w0 = next64();
    const auto pair = box_muller(w0, next64());
    spare_ = pair[1];
    has_spare_ = true;
    return pair[0];
  }

 private:
  CounterStream stream_;
  std::uint32_t next_block_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rmt
