#pragma once

#include <cstdint>

#include "atb/arch_model.hpp"
#include "atb/rational.hpp"

namespace atb {

/// Arithmetic intensity of one output tile: flops over bytes moved while the
/// tile is accumulated across the full reduction dimension.
struct AiResult {
    Rational ai;
    std::int64_t numerator_flops = 0;
    Rational denominator_bytes;

    double value() const { return to_double(ai); }
};

/// 2 / (a/t_n + b/t_mc + c/k). Independent of t_k and t_ma.
AiResult ai_tile(std::int64_t t_mc, std::int64_t t_n, std::int64_t k, const PrecisionSpec& prec);

/// Whole-array intensity for data moved from off-chip, using the effective
/// L2 tile (n_rows * t_mc, n_cols * t_n).
AiResult ai_array(const TileConfig& tile, std::int64_t k, const PrecisionSpec& prec,
                  const ArchSpec& arch);

}  // namespace atb
