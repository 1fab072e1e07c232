#pragma once
#include <cstdint>

namespace aisbn {

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer (Stafford mix 13 variant).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}
} // namespace detail

// Counter-based random stream keyed by a 64-bit identity. substream(id)
// derives an independent stream deterministically, so results never depend
// on how work is split across stages or callers. The algorithm is fixed and
// platform-independent; a given (seed, substream path, draw index) always
// yields the same bits.
class Rng {
public:
  explicit Rng(std::uint64_t seed)
      : key_(detail::mix64(seed + detail::kGolden)) {}

  Rng substream(std::uint64_t id) const {
    return Rng(from_key_tag{},
               detail::mix64(key_ ^ detail::mix64(id * detail::kGolden + detail::kGolden)));
  }

  std::uint64_t next_u64() { return detail::mix64(key_ + (++counter_) * detail::kGolden); }

  // Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be >= 1.
  std::uint64_t next_below(std::uint64_t n) {
    // Rejection-free multiply-shift; bias is negligible for n << 2^64 and
    // irrelevant here (n is a state count or node count).
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  std::uint64_t key() const { return key_; }

private:
  struct from_key_tag {};
  Rng(from_key_tag, std::uint64_t key) : key_(key) {}

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

} // namespace aisbn
