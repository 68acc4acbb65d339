#pragma once

#include <array>
#include <cstdint>

namespace gridruin {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// The output block is a pure function of (key, counter), so any replicate's
// stream can be reproduced without touching any other replicate's state.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

// Per-replicate random stream.
//
// Key = seed, counter = (draw block, replicate id). Distinct replicate ids
// address disjoint counter ranges, so streams never overlap and the draws a
// replicate sees do not depend on scheduling.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t replicate_id) noexcept;

  std::uint64_t next_u64() noexcept;
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double next_uniform() noexcept;
  // Standard normal via Box-Muller; values come in pairs.
  double next_normal() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t replicate_id() const noexcept { return replicate_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t replicate_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int pos_ = 4;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

inline RandomStream make_rng(std::uint64_t seed, std::uint64_t replicate_id) noexcept {
  return RandomStream(seed, replicate_id);
}

}  // namespace gridruin
