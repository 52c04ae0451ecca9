#include "atb/bfp16.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace atb {

namespace {

constexpr int kScaleOffset = kBfp16Bias + kBfp16MantissaShift;

bool fits(std::span<const double, kBfp16BlockSize> values, int exponent) {
    for (double v : values) {
        const double m = std::nearbyint(std::ldexp(v, kScaleOffset - exponent));
        if (m < -128.0 || m > 127.0) return false;
    }
    return true;
}

}  // namespace

Bfp16Block bfp16_encode(std::span<const double, kBfp16BlockSize> values) {
    double largest = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("bfp16_encode: non-finite input");
        largest = std::max(largest, std::fabs(v));
    }
    Bfp16Block block;
    if (largest == 0.0) return block;

    // |v| < 2^x, so exponent x + 125 still leaves a mantissa of at least 256:
    // the search below starts strictly under the answer unless clamped at 0.
    int x = 0;
    std::frexp(largest, &x);
    int e = std::clamp(x + 125, 0, 255);
    while (e <= 255 && !fits(values, e)) ++e;
    if (e > 255) throw std::invalid_argument("bfp16_encode: value exceeds the exponent range");

    block.shared_exponent = static_cast<std::uint8_t>(e);
    for (std::size_t i = 0; i < kBfp16BlockSize; ++i) {
        block.mantissas[i] =
            static_cast<std::int8_t>(std::nearbyint(std::ldexp(values[i], kScaleOffset - e)));
    }
    return block;
}

std::array<double, kBfp16BlockSize> bfp16_decode(const Bfp16Block& block) {
    std::array<double, kBfp16BlockSize> out{};
    for (std::size_t i = 0; i < kBfp16BlockSize; ++i) {
        out[i] = std::ldexp(static_cast<double>(block.mantissas[i]),
                            static_cast<int>(block.shared_exponent) - kScaleOffset);
    }
    return out;
}

double bfp16_half_ulp(const Bfp16Block& block) {
    return std::ldexp(1.0, static_cast<int>(block.shared_exponent) - kScaleOffset - 1);
}

std::array<std::uint8_t, kBfp16BlockBytes> bfp16_pack(const Bfp16Block& block) {
    std::array<std::uint8_t, kBfp16BlockBytes> out{};
    out[0] = block.shared_exponent;
    for (std::size_t i = 0; i < kBfp16BlockSize; ++i) {
        out[i + 1] = static_cast<std::uint8_t>(block.mantissas[i]);
    }
    return out;
}

Bfp16Block bfp16_unpack(std::span<const std::uint8_t, kBfp16BlockBytes> bytes) {
    Bfp16Block block;
    block.shared_exponent = bytes[0];
    for (std::size_t i = 0; i < kBfp16BlockSize; ++i) {
        block.mantissas[i] = static_cast<std::int8_t>(bytes[i + 1]);
    }
    return block;
}

}  // namespace atb
