#pragma once

// Kernel-switch overhead, effective core efficiency and the two-sided
// roofline for a whole array of cores.

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "atb/ai_model.hpp"
#include "atb/arch_model.hpp"
#include "atb/ilp_model.hpp"
#include "atb/rational.hpp"
#include "atb/sched_sim.hpp"

namespace atb {

enum class BoundKind { memory, compute };
std::string_view to_string(BoundKind kind);

enum class EffMicroSource { calibration_table, closed_form, simulator };
std::string_view to_string(EffMicroSource source);
EffMicroSource parse_eff_micro_source(std::string_view text);

/// Measured microkernel efficiency by T_K, interpolated linearly and clamped
/// at both ends.
struct CalibrationTable {
    std::vector<std::pair<std::int64_t, Rational>> points{
        {8, Rational(20, 100)}, {16, Rational(36, 100)}, {32, Rational(41, 100)},
        {64, Rational(63, 100)}};

    Rational at(std::int64_t t_k) const;
};

struct EffMicroOptions {
    EffMicroSource source = EffMicroSource::calibration_table;
    CalibrationTable table;
    MicrokernelSpec base = bfp16_microkernel();
    DagOptions dag{true, true, true};
};

/// Microkernel efficiency of the kernel that computes one L1 tile.
Rational eff_micro_for(const TileConfig& tile, const EffMicroOptions& options = {});

/// 2*T_MC*K*T_N / (peak * eff_micro) + delta * rho * K / T_K, in cycles.
Rational t_asym(const TileConfig& tile, std::int64_t k, const Rational& eff_micro,
                const ArchSpec& arch);

/// 1 / (1/eff_micro + delta * rho * peak / (2 * T_MC * T_N * T_K)).
Rational eff_core(const TileConfig& tile, const Rational& eff_micro, const ArchSpec& arch);

struct PerfEstimate {
    TileConfig tile;
    ProblemSpec problem;
    Rational ai_array;
    double memory_bound = 0;   // flops/s
    double compute_bound = 0;  // flops/s
    Rational eff_micro;
    Rational eff_core;
    double perf_array = 0;  // flops/s
    BoundKind bound_kind = BoundKind::memory;
    std::int64_t buffer_bytes = 0;
    std::int64_t buffer_bytes_symmetric = 0;
    bool feasible = false;
};

/// min(AI_array * BW, eff_core * peak * n_cores). An infeasible tile yields
/// feasible = false and zero performance; a problem the L2 tiles do not
/// divide throws std::invalid_argument.
PerfEstimate perf_array(const TileConfig& tile, const ProblemSpec& problem,
                        const PrecisionSpec& prec, const ArchSpec& arch,
                        const Rational& eff_micro);

inline double to_tflops(double flops_per_second) { return flops_per_second * 1e-12; }

}  // namespace atb
