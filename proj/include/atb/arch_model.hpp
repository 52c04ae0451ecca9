#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "atb/rational.hpp"

namespace atb {

/// Register microtile edge of the 8x8x8 VMAC; tile dims handed to the
/// scheduler and the search are multiples of this.
inline constexpr std::int64_t kMicrotile = 8;

inline constexpr std::int64_t kKiB = 1024;

/// Per-element byte costs of A, B and C.
struct PrecisionSpec {
    Rational byte_cost_a{2};
    Rational byte_cost_b{2};
    Rational byte_cost_c{2};
    std::string accum_label{"FP32"};

    void validate() const;
};

/// Named presets: bf16, config1, config2, config3 (BFP16 at 5/4 B/elem) and
/// the *_physical variants that charge BFP16 its 9/8 B/elem block density.
PrecisionSpec precision_preset(std::string_view name);
std::vector<std::string> precision_preset_names();

struct ArchSpec {
    std::int64_t l1_capacity = 63 * kKiB;
    std::int64_t n_rows = 4;
    std::int64_t n_cols = 8;
    std::int64_t n_cores = 32;
    std::int64_t peak_macs_per_cycle = 512;
    double clock_hz = 1.8e9;
    double offchip_bw = 65e9;  // bytes/s
    std::int64_t switch_overhead_delta = 50;  // cycles
    std::int64_t buffer_multiplier_a = 2;
    std::int64_t buffer_multiplier_b = 2;
    std::int64_t buffer_multiplier_c = 1;

    std::int64_t peak_flops_per_cycle() const { return 2 * peak_macs_per_cycle; }

    void validate() const;
};

struct ProblemSpec {
    std::int64_t m = 0;
    std::int64_t k = 0;
    std::int64_t n = 0;

    void validate() const;
    std::int64_t flops() const { return 2 * m * k * n; }
};

/// Asymmetric L1 tile: A is buffered T_MA rows at a time, C holds T_MC rows.
struct TileConfig {
    std::int64_t t_ma = 0;
    std::int64_t t_mc = 0;
    std::int64_t t_k = 0;
    std::int64_t t_n = 0;

    std::int64_t rho() const { return t_mc / t_ma; }
    bool symmetric() const { return t_ma == t_mc; }

    /// Throws std::invalid_argument unless dims are positive, t_ma divides
    /// t_mc and every dim is a multiple of `granularity`.
    void validate(std::int64_t granularity = 1) const;

    static TileConfig from_rho(std::int64_t t_mc, std::int64_t t_k, std::int64_t t_n,
                               std::int64_t rho);

    friend bool operator==(const TileConfig&, const TileConfig&) = default;
    friend auto operator<=>(const TileConfig&, const TileConfig&) = default;
};

std::string to_string(const TileConfig& tile);
std::string to_string(const ProblemSpec& problem);

struct L2Tiles {
    std::int64_t t_m = 0;
    std::int64_t t_k = 0;
    std::int64_t t_n = 0;

    friend bool operator==(const L2Tiles&, const L2Tiles&) = default;
};

/// Exact L1 residency under the arch's buffer multipliers.
Rational buffer_footprint_exact(const TileConfig& tile, const PrecisionSpec& prec,
                                const ArchSpec& arch);

/// Ceiling of buffer_footprint_exact in whole bytes.
std::int64_t buffer_footprint(const TileConfig& tile, const PrecisionSpec& prec,
                              const ArchSpec& arch);

/// Footprint of the symmetric tile with the same (t_mc, t_k, t_n).
std::int64_t symmetric_footprint(const TileConfig& tile, const PrecisionSpec& prec,
                                 const ArchSpec& arch);

bool check_feasible(const TileConfig& tile, const PrecisionSpec& prec, const ArchSpec& arch);

/// Effective L2 tile formed by aggregating the array's L1 output tiles.
L2Tiles derive_l2_tiles(const TileConfig& tile, const ArchSpec& arch);

/// True when the L2 tiles exactly tile the problem (no ragged edges).
bool divides_problem(const TileConfig& tile, const ProblemSpec& problem, const ArchSpec& arch);

}  // namespace atb
