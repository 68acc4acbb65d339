#include "gridruin/rng.hpp"

#include <cmath>
#include <numbers>

namespace gridruin {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t replicate_id) noexcept
    : seed_(seed), replicate_(replicate_id) {}

void RandomStream::refill() noexcept {
  const Philox4x32::Counter ctr{
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(replicate_), static_cast<std::uint32_t>(replicate_ >> 32)};
  const Philox4x32::Key key{static_cast<std::uint32_t>(seed_),
                            static_cast<std::uint32_t>(seed_ >> 32)};
  buffer_ = Philox4x32::block(ctr, key);
  ++block_;
  pos_ = 0;
}

std::uint64_t RandomStream::next_u64() noexcept {
  if (pos_ > 2) refill();
  const std::uint64_t v = (static_cast<std::uint64_t>(buffer_[pos_]) << 32) | buffer_[pos_ + 1];
  pos_ += 2;
  return v;
}

double RandomStream::next_uniform() noexcept {
  constexpr double kScale = 0x1.0p-53;
  return (static_cast<double>(next_u64() >> 11) + 0.5) * kScale;
}

double RandomStream::next_normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

}  // namespace gridruin
