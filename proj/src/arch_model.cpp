#include "atb/arch_model.hpp"

#include <stdexcept>

namespace atb {

void PrecisionSpec::validate() const {
    if (byte_cost_a <= 0 || byte_cost_b <= 0 || byte_cost_c <= 0) {
        throw std::invalid_argument("byte costs must be positive");
    }
}

namespace {

struct NamedPrecision {
    const char* name;
    Rational a, b, c;
    const char* accum;
};

const Rational kBf16{2};
const Rational kBfp16{5, 4};
const Rational kBfp16Physical{9, 8};

const NamedPrecision kPresets[] = {
    {"bf16", kBf16, kBf16, kBf16, "FP32"},
    {"config1", kBf16, kBfp16, kBf16, "BF16"},
    {"config2", kBfp16, kBfp16, kBfp16, "BFP16"},
    {"config3", kBfp16, kBfp16, kBfp16, "BF16"},
    {"bfp16_physical", kBfp16Physical, kBfp16Physical, kBfp16Physical, "BFP16"},
    {"config1_physical", kBf16, kBfp16Physical, kBf16, "BF16"},
    {"config2_physical", kBfp16Physical, kBfp16Physical, kBfp16Physical, "BFP16"},
    {"config3_physical", kBfp16Physical, kBfp16Physical, kBfp16Physical, "BF16"},
};

}  // namespace

PrecisionSpec precision_preset(std::string_view name) {
    for (const auto& p : kPresets) {
        if (name == p.name) return PrecisionSpec{p.a, p.b, p.c, p.accum};
    }
    throw std::invalid_argument("unknown precision preset '" + std::string(name) + "'");
}

std::vector<std::string> precision_preset_names() {
    std::vector<std::string> names;
    for (const auto& p : kPresets) names.emplace_back(p.name);
    return names;
}

void ArchSpec::validate() const {
    if (l1_capacity < 0) throw std::invalid_argument("l1_capacity must be non-negative");
    if (n_rows < 1 || n_cols < 1) throw std::invalid_argument("array dims must be >= 1");
    if (n_cores != n_rows * n_cols) {
        throw std::invalid_argument("n_cores must equal n_rows * n_cols");
    }
    if (peak_macs_per_cycle < 1) throw std::invalid_argument("peak_macs_per_cycle must be >= 1");
    if (!(clock_hz > 0)) throw std::invalid_argument("clock_hz must be positive");
    if (!(offchip_bw > 0)) throw std::invalid_argument("offchip_bw must be positive");
    if (switch_overhead_delta < 0) throw std::invalid_argument("switch_overhead_delta must be >= 0");
    if (buffer_multiplier_a < 1 || buffer_multiplier_b < 1 || buffer_multiplier_c < 1) {
        throw std::invalid_argument("buffer multipliers must be >= 1");
    }
}

void ProblemSpec::validate() const {
    if (m <= 0 || k <= 0 || n <= 0) throw std::invalid_argument("problem dims must be positive");
}

void TileConfig::validate(std::int64_t granularity) const {
    if (t_ma <= 0 || t_mc <= 0 || t_k <= 0 || t_n <= 0) {
        throw std::invalid_argument("tile dims must be positive: " + to_string(*this));
    }
    if (t_mc < t_ma) throw std::invalid_argument("t_mc must be >= t_ma: " + to_string(*this));
    if (t_mc % t_ma != 0) {
        throw std::invalid_argument("t_ma must divide t_mc: " + to_string(*this));
    }
    if (granularity > 1) {
        for (auto d : {t_ma, t_mc, t_k, t_n}) {
            if (d % granularity != 0) {
                throw std::invalid_argument("tile dims must be multiples of " +
                                            std::to_string(granularity) + ": " + to_string(*this));
            }
        }
    }
}

TileConfig TileConfig::from_rho(std::int64_t t_mc, std::int64_t t_k, std::int64_t t_n,
                                std::int64_t rho) {
    if (rho < 1 || t_mc % rho != 0) {
        throw std::invalid_argument("rho must be >= 1 and divide t_mc");
    }
    return TileConfig{t_mc / rho, t_mc, t_k, t_n};
}

std::string to_string(const TileConfig& tile) {
    return "(" + std::to_string(tile.t_ma) + "," + std::to_string(tile.t_mc) + "," +
           std::to_string(tile.t_k) + "," + std::to_string(tile.t_n) + ")";
}

std::string to_string(const ProblemSpec& problem) {
    return std::to_string(problem.m) + "x" + std::to_string(problem.k) + "x" +
           std::to_string(problem.n);
}

Rational buffer_footprint_exact(const TileConfig& tile, const PrecisionSpec& prec,
                                const ArchSpec& arch) {
    tile.validate();
    prec.validate();
    return Rational(arch.buffer_multiplier_a * tile.t_ma * tile.t_k) * prec.byte_cost_a +
           Rational(arch.buffer_multiplier_b * tile.t_k * tile.t_n) * prec.byte_cost_b +
           Rational(arch.buffer_multiplier_c * tile.t_mc * tile.t_n) * prec.byte_cost_c;
}

std::int64_t buffer_footprint(const TileConfig& tile, const PrecisionSpec& prec,
                              const ArchSpec& arch) {
    return ceil_to_int(buffer_footprint_exact(tile, prec, arch));
}

std::int64_t symmetric_footprint(const TileConfig& tile, const PrecisionSpec& prec,
                                 const ArchSpec& arch) {
    return buffer_footprint(TileConfig{tile.t_mc, tile.t_mc, tile.t_k, tile.t_n}, prec, arch);
}

bool check_feasible(const TileConfig& tile, const PrecisionSpec& prec, const ArchSpec& arch) {
    return buffer_footprint(tile, prec, arch) <= arch.l1_capacity;
}

L2Tiles derive_l2_tiles(const TileConfig& tile, const ArchSpec& arch) {
    tile.validate();
    return L2Tiles{arch.n_rows * tile.t_mc, tile.t_k, arch.n_cols * tile.t_n};
}

bool divides_problem(const TileConfig& tile, const ProblemSpec& problem, const ArchSpec& arch) {
    const auto l2 = derive_l2_tiles(tile, arch);
    return problem.m % l2.t_m == 0 && problem.n % l2.t_n == 0 && problem.k % l2.t_k == 0;
}

}  // namespace atb
