#include "atb/dse.hpp"

#include <algorithm>
#include <exception>
#include <stdexcept>
#include <string>

#include <omp.h>

namespace atb {

void SearchSpace::validate() const {
    if (step < 1 || step % kMicrotile != 0) {
        throw std::invalid_argument("search step must be a positive multiple of 8");
    }
    if (max_t_mc < step || max_t_k < step || max_t_n < step) {
        throw std::invalid_argument("search caps must be at least one step");
    }
    if (rho_candidates.empty()) throw std::invalid_argument("rho_candidates must not be empty");
    for (auto r : rho_candidates) {
        if (r < 1) throw std::invalid_argument("rho candidates must be >= 1");
    }
    if (divisibility_problem) divisibility_problem->validate();
}

namespace {

std::vector<std::int64_t> sorted_unique(std::vector<std::int64_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// All feasible tiles sharing one t_mc, in enumeration order.
std::vector<TileConfig> feasible_for_mc(std::int64_t t_mc, const SearchSpace& space,
                                        const std::vector<std::int64_t>& rhos,
                                        const PrecisionSpec& prec, const ArchSpec& arch) {
    std::vector<TileConfig> out;
    for (std::int64_t t_k = space.step; t_k <= space.max_t_k; t_k += space.step) {
        for (std::int64_t t_n = space.step; t_n <= space.max_t_n; t_n += space.step) {
            for (const auto rho : rhos) {
                if (t_mc % rho != 0) continue;
                const TileConfig tile{t_mc / rho, t_mc, t_k, t_n};
                if (tile.t_ma % space.step != 0) continue;
                if (!check_feasible(tile, prec, arch)) continue;
                if (space.divisibility_problem &&
                    !divides_problem(tile, *space.divisibility_problem, arch)) {
                    continue;
                }
                out.push_back(tile);
            }
        }
    }
    return out;
}

bool ranks_before(const RankedEntry& x, const RankedEntry& y) {
    if (x.perf.perf_array != y.perf.perf_array) return x.perf.perf_array > y.perf.perf_array;
    if (x.perf.eff_core != y.perf.eff_core) return x.perf.eff_core > y.perf.eff_core;
    if (x.perf.buffer_bytes != y.perf.buffer_bytes) {
        return x.perf.buffer_bytes < y.perf.buffer_bytes;
    }
    return x.tile < y.tile;
}

RankedEntry evaluate(const TileConfig& tile, const ProblemSpec& problem,
                     const PrecisionSpec& prec, const ArchSpec& arch,
                     const EffMicroOptions& eff) {
    return RankedEntry{tile, perf_array(tile, problem, prec, arch, eff_micro_for(tile, eff))};
}

RankedResult finish(std::vector<RankedEntry> entries) {
    std::sort(entries.begin(), entries.end(), ranks_before);
    RankedResult r;
    r.ranked = std::move(entries);
    for (std::size_t i = 0; i < r.ranked.size(); ++i) {
        const auto& e = r.ranked[i];
        if (!e.perf.feasible) continue;
        if (!r.best_overall) r.best_overall = i;
        if (!r.best_symmetric && e.tile.symmetric()) r.best_symmetric = i;
    }
    return r;
}

}  // namespace

std::vector<TileConfig> enumerate_feasible_serial(const SearchSpace& space,
                                                  const PrecisionSpec& prec, const ArchSpec& arch) {
    space.validate();
    const auto rhos = sorted_unique(space.rho_candidates);
    std::vector<TileConfig> out;
    for (std::int64_t t_mc = space.step; t_mc <= space.max_t_mc; t_mc += space.step) {
        const auto part = feasible_for_mc(t_mc, space, rhos, prec, arch);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

std::vector<TileConfig> enumerate_feasible(const SearchSpace& space, const PrecisionSpec& prec,
                                           const ArchSpec& arch) {
    space.validate();
    const auto rhos = sorted_unique(space.rho_candidates);
    const std::int64_t n_mc = space.max_t_mc / space.step;
    std::vector<std::vector<TileConfig>> parts(static_cast<std::size_t>(n_mc));
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n_mc; ++i) {
        parts[static_cast<std::size_t>(i)] =
            feasible_for_mc((i + 1) * space.step, space, rhos, prec, arch);
    }
    std::vector<TileConfig> out;
    for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

std::optional<double> RankedResult::atb_gain() const {
    if (!best_overall || !best_symmetric) return std::nullopt;
    const double sym = ranked[*best_symmetric].perf.perf_array;
    if (sym <= 0) return std::nullopt;
    return ranked[*best_overall].perf.perf_array / sym;
}

RankedResult rank_serial(const std::vector<TileConfig>& configs, const ProblemSpec& problem,
                         const PrecisionSpec& prec, const ArchSpec& arch,
                         const EffMicroOptions& eff) {
    if (configs.empty()) throw std::invalid_argument("rank: no configurations to rank");
    std::vector<RankedEntry> entries;
    entries.reserve(configs.size());
    for (const auto& t : configs) entries.push_back(evaluate(t, problem, prec, arch, eff));
    return finish(std::move(entries));
}

RankedResult rank(const std::vector<TileConfig>& configs, const ProblemSpec& problem,
                  const PrecisionSpec& prec, const ArchSpec& arch, const EffMicroOptions& eff) {
    if (configs.empty()) throw std::invalid_argument("rank: no configurations to rank");
    std::vector<RankedEntry> entries(configs.size());
    std::exception_ptr error;
    const auto n = static_cast<std::int64_t>(configs.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            entries[static_cast<std::size_t>(i)] =
                evaluate(configs[static_cast<std::size_t>(i)], problem, prec, arch, eff);
        } catch (...) {
#pragma omp critical(atb_rank_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return finish(std::move(entries));
}

std::vector<SweepRow> sweep_grid(const std::vector<std::int64_t>& tk_values,
                                 const std::vector<std::int64_t>& rho_values,
                                 const SweepFixed& fixed, const PrecisionSpec& prec,
                                 const ArchSpec& arch, const EffMicroOptions& eff) {
    std::vector<SweepRow> rows;
    for (const auto t_k : tk_values) {
        for (const auto rho : rho_values) {
            TileConfig tile = fixed.anchor == SweepAnchor::t_mc
                                  ? TileConfig::from_rho(fixed.t_m, t_k, fixed.t_n, rho)
                                  : TileConfig{fixed.t_m, fixed.t_m * rho, t_k, fixed.t_n};
            SweepRow row;
            row.t_k = t_k;
            row.rho = rho;
            row.tile = tile;
            row.eff_micro = eff_micro_for(tile, eff);
            row.eff_core = eff_core(tile, row.eff_micro, arch);
            row.buffer_bytes = buffer_footprint(tile, prec, arch);
            row.feasible = row.buffer_bytes <= arch.l1_capacity;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace atb
