#pragma once

// Block floating point: 8 values share one 8-bit exponent and keep an 8-bit
// two's-complement mantissa each, 9 bytes per block.

#include <array>
#include <cstdint>
#include <span>

namespace atb {

inline constexpr std::size_t kBfp16BlockSize = 8;
inline constexpr std::size_t kBfp16BlockBytes = 9;
inline constexpr int kBfp16Bias = 127;
inline constexpr int kBfp16MantissaShift = 7;

struct Bfp16Block {
    std::uint8_t shared_exponent = 0;
    std::array<std::int8_t, kBfp16BlockSize> mantissas{};

    friend bool operator==(const Bfp16Block&, const Bfp16Block&) = default;
};

/// Picks the smallest exponent at which every rounded mantissa fits in
/// [-128, 127]. Throws std::invalid_argument on non-finite input or values
/// beyond the largest exponent.
Bfp16Block bfp16_encode(std::span<const double, kBfp16BlockSize> values);

/// mantissa * 2^(shared_exponent - bias - mantissa_shift).
std::array<double, kBfp16BlockSize> bfp16_decode(const Bfp16Block& block);

/// Half of the block's mantissa step: the roundtrip error bound.
double bfp16_half_ulp(const Bfp16Block& block);

std::array<std::uint8_t, kBfp16BlockBytes> bfp16_pack(const Bfp16Block& block);
Bfp16Block bfp16_unpack(std::span<const std::uint8_t, kBfp16BlockBytes> bytes);

}  // namespace atb
