#pragma once

#include <cmath>
#include <cstdint>

namespace typik {

namespace detail {

// SplitMix64 finalizer (Vigna 2015).
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Counter-based pseudo-random stream.  Each output is a bijective mix of
// (derived key, counter), so streams can be split hierarchically and
// consumed in any order or thread count without changing the numbers drawn.
// The mixer is the SplitMix64 finalizer (Vigna 2015); as a counter generator
// it passes BigCrush.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed),
        stream_id_(stream_id),
        key_(mix(mix(master_seed + kGolden) ^ mix(stream_id + kStreamSalt))) {}

  // Independent child stream; does not advance this stream.
  RngStream derive(std::uint64_t child_id) const {
    RngStream child = *this;
    child.key_ = mix(key_ ^ mix(child_id + kChildSalt));
    child.counter_ = 0;
    child.have_cached_normal_ = false;
    return child;
  }

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64() {
    counter_ += kGolden;
    return mix(key_ + counter_);
  }

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal deviate via the Marsaglia polar method.
  double next_normal() {
    if (have_cached_normal_) {
      have_cached_normal_ = false;
      return cached_normal_;
    }
    double v1 = 0.0, v2 = 0.0, s = 0.0;
    do {
      v1 = 2.0 * next_unit() - 1.0;
      v2 = 2.0 * next_unit() - 1.0;
      s = v1 * v1 + v2 * v2;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_normal_ = v2 * f;
    have_cached_normal_ = true;
    return v1 * f;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ull;
  static constexpr std::uint64_t kChildSalt = 0x8CB92BA72F3D8DD7ull;

  static std::uint64_t mix(std::uint64_t z) { return detail::splitmix64_mix(z); }

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool have_cached_normal_ = false;
};

}  // namespace typik
