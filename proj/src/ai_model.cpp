#include "atb/ai_model.hpp"

#include <stdexcept>

namespace atb {

AiResult ai_tile(std::int64_t t_mc, std::int64_t t_n, std::int64_t k, const PrecisionSpec& prec) {
    if (t_mc <= 0 || t_n <= 0 || k <= 0) {
        throw std::invalid_argument("ai_tile: dimensions must be positive");
    }
    prec.validate();
    // Per output tile: 2*t_mc*k*t_n flops against a*t_mc*k + b*k*t_n + c*t_mc*t_n bytes.
    AiResult r;
    r.numerator_flops = 2 * t_mc * k * t_n;
    r.denominator_bytes = prec.byte_cost_a * Rational(t_mc * k) +
                          prec.byte_cost_b * Rational(k * t_n) +
                          prec.byte_cost_c * Rational(t_mc * t_n);
    r.ai = Rational(r.numerator_flops) / r.denominator_bytes;
    return r;
}

AiResult ai_array(const TileConfig& tile, std::int64_t k, const PrecisionSpec& prec,
                  const ArchSpec& arch) {
    const auto l2 = derive_l2_tiles(tile, arch);
    return ai_tile(l2.t_m, l2.t_n, k, prec);
}

}  // namespace atb
