#pragma once

// Exhaustive tile search: enumerate feasible L1 tiles, evaluate them with the
// performance model and rank them. The OpenMP versions must agree exactly
// with the *_serial references.

#include <cstdint>
#include <optional>
#include <vector>

#include "atb/arch_model.hpp"
#include "atb/perf_model.hpp"

namespace atb {

struct SearchSpace {
    std::int64_t step = kMicrotile;
    std::int64_t max_t_mc = 512;
    std::int64_t max_t_k = 512;
    std::int64_t max_t_n = 512;
    std::vector<std::int64_t> rho_candidates{1, 2, 4, 6, 8};
    std::optional<ProblemSpec> divisibility_problem;
    EffMicroOptions eff;

    void validate() const;
};

/// Every (t_mc, t_k, t_n, rho) on the grid, t_mc outermost and rho innermost,
/// whose T_MA is a whole multiple of the step, that fits L1 and whose L2
/// tiles divide the problem when one is given.
std::vector<TileConfig> enumerate_feasible(const SearchSpace& space, const PrecisionSpec& prec,
                                           const ArchSpec& arch);
std::vector<TileConfig> enumerate_feasible_serial(const SearchSpace& space,
                                                  const PrecisionSpec& prec, const ArchSpec& arch);

struct RankedEntry {
    TileConfig tile;
    PerfEstimate perf;
};

struct RankedResult {
    std::vector<RankedEntry> ranked;
    std::optional<std::size_t> best_overall;
    std::optional<std::size_t> best_symmetric;

    /// best_overall / best_symmetric when both exist.
    std::optional<double> atb_gain() const;
};

/// Orders by predicted bound (descending), then eff_core (descending), buffer
/// bytes (ascending) and the tile itself. Throws on empty input.
RankedResult rank(const std::vector<TileConfig>& configs, const ProblemSpec& problem,
                  const PrecisionSpec& prec, const ArchSpec& arch, const EffMicroOptions& eff);
RankedResult rank_serial(const std::vector<TileConfig>& configs, const ProblemSpec& problem,
                         const PrecisionSpec& prec, const ArchSpec& arch,
                         const EffMicroOptions& eff);

/// Which M extent the sweep holds fixed while rho varies.
enum class SweepAnchor { t_mc, t_ma };

struct SweepFixed {
    SweepAnchor anchor = SweepAnchor::t_mc;
    std::int64_t t_m = 128;
    std::int64_t t_n = 128;
};

struct SweepRow {
    std::int64_t t_k = 0;
    std::int64_t rho = 0;
    TileConfig tile;
    Rational eff_micro;
    Rational eff_core;
    bool feasible = false;
    std::int64_t buffer_bytes = 0;
};

/// Grid in t_k-major order.
std::vector<SweepRow> sweep_grid(const std::vector<std::int64_t>& tk_values,
                                 const std::vector<std::int64_t>& rho_values,
                                 const SweepFixed& fixed, const PrecisionSpec& prec,
                                 const ArchSpec& arch, const EffMicroOptions& eff = {});

}  // namespace atb
