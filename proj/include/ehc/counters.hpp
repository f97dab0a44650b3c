#pragma once

#include <cstdint>

namespace ehc {

/// Unsigned counter clamped to [0, 2^Bits - 1].
template <unsigned Bits>
class SaturatingCounter {
  static_assert(Bits >= 1 && Bits <= 16);

 public:
  static constexpr std::uint16_t kMax = static_cast<std::uint16_t>((1u << Bits) - 1);

  constexpr SaturatingCounter() = default;
  constexpr explicit SaturatingCounter(std::uint16_t v) : value_(v > kMax ? kMax : v) {}

  constexpr void increment() {
    if (value_ < kMax) ++value_;
  }
  constexpr void decrement() {
    if (value_ > 0) --value_;
  }
  constexpr std::uint16_t value() const { return value_; }
  constexpr bool saturated_high() const { return value_ == kMax; }

 private:
  std::uint16_t value_ = 0;
};

/// Folds `x` into `bits` bits by XOR-ing consecutive bit slices.
constexpr std::uint32_t xor_fold(std::uint64_t x, unsigned bits) {
  const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
  std::uint64_t h = 0;
  while (x != 0) {
    h ^= x & mask;
    x >>= bits;
  }
  return static_cast<std::uint32_t>(h);
}

}  // namespace ehc
